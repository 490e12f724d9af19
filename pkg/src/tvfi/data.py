"""Series loading and deterministic CSV/manifest writing.

Two external formats are understood besides plain one-column CSVs:

  * monthly temperature-anomaly text files, one month per row, either
    "YYYY/MM value ..." or "YYYY MM value ..." with any further columns
    (ensemble bounds etc.) ignored;
  * daily price CSVs with a header, from which the closing-price column is
    taken ("Close"/"close" if present, otherwise the second column); rows
    with missing values are dropped.

Floats are written with repr, which round-trips exactly and keeps repeated
runs byte-identical.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

_HADCRUT_SLASH = re.compile(r"^\d{4}/\d{1,2}$")


def load_series(path, kind: str = "auto") -> np.ndarray:
    """Load a numeric series.  kind: auto, series, monthly_text or prices."""
    path = Path(path)
    if kind == "auto":
        kind = _sniff_kind(path)
    if kind == "monthly_text":
        return load_monthly_text(path)
    if kind == "prices":
        return load_price_csv(path)
    if kind == "series":
        return load_single_column(path)
    raise ValueError(f"unknown data kind {kind!r}")


def load_single_column(path) -> np.ndarray:
    vals = []
    with open(path) as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            tok = row[0].strip()
            try:
                vals.append(float(tok))
            except ValueError:
                continue  # header line
    if not vals:
        raise ValueError(f"no numeric values found in {path}")
    return np.array(vals)


def load_monthly_text(path) -> np.ndarray:
    vals = []
    with open(path) as fh:
        for line in fh:
            toks = line.split()
            if not toks:
                continue
            if _HADCRUT_SLASH.match(toks[0]) and len(toks) >= 2:
                vals.append(float(toks[1]))
            elif (len(toks) >= 3 and _is_int(toks[0]) and _is_int(toks[1])
                  and 1 <= int(toks[1]) <= 12):
                vals.append(float(toks[2]))
    if not vals:
        raise ValueError(f"no monthly rows recognised in {path}")
    return np.array(vals)


def load_price_csv(path) -> np.ndarray:
    with open(path) as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path} is empty")
    header = [c.strip().lower() for c in rows[0]]
    col = 1 if len(header) > 1 else 0
    for i, name in enumerate(header):
        if name == "close":
            col = i
            break
    vals = []
    for row in rows[1:]:
        if col >= len(row):
            continue
        tok = row[col].strip()
        if not tok or tok.lower() in ("null", "na", "nan"):
            continue
        try:
            vals.append(float(tok))
        except ValueError:
            continue
    if not vals:
        raise ValueError(f"no usable price rows in {path}")
    return np.array(vals)


def _sniff_kind(path: Path) -> str:
    with open(path) as fh:
        head = [line for _, line in zip(range(5), fh)]
    for line in head:
        toks = line.split()
        if toks and _HADCRUT_SLASH.match(toks[0]):
            return "monthly_text"
        if len(toks) >= 3 and _is_int(toks[0]) and _is_int(toks[1]) and not "," in line:
            return "monthly_text"
    if head and "close" in head[0].lower() and "," in head[0]:
        return "prices"
    return "series"


def _is_int(tok: str) -> bool:
    try:
        int(tok)
        return True
    except ValueError:
        return False


def write_series_csv(path, y: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["y"])
        for v in y:
            wr.writerow([repr(float(v))])


def write_manifest(path, payload: dict) -> None:
    """Reproducibility manifest: resolved config, seeds, versions, outputs.

    Deliberately carries no timestamps so re-runs stay byte-identical.
    """
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj)!r}")
