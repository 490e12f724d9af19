"""Data generating processes with a prescribed memory-parameter path.

The simulator inverts the truncated AR(inf) form directly:

    y_t = eps_t - sum_{j=1}^{min(t-1, max_lags)} pi_j(d_t) y_{t-j},

i.e. the coefficient set of time t applies to the whole lag window.  With a
full history there is no approximation error beyond the startup transient,
so no burn-in is applied by default; an optional burn-in that holds d at the
path's first value is available.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from tvfi.recursions import tvfi_sim_core

DGP_KINDS = ("constant", "linear_trend", "logistic_regime", "custom_path")


@dataclass
class DgpSpec:
    """Specification of one simulated series.

    kind selects the d_t path:
      constant         d_t = d
      linear_trend     d_t = 0.1 + 0.3 t / n
      logistic_regime  d_t = 0.1 + 0.3 Phi((t - n/2) / (3 sqrt(n)))
      custom_path      d_t = path[t-1]
    """

    kind: str
    n: int
    sigma: float = 1.0
    seed: int = 0
    d: float | None = None
    path: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in DGP_KINDS:
            raise ValueError(f"unknown dgp kind {self.kind!r}, expected one of {DGP_KINDS}")
        if self.n <= 0:
            raise ValueError(f"n must be positive, got {self.n}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.kind == "constant" and self.d is None:
            raise ValueError("constant dgp needs d")
        if self.kind == "custom_path":
            if self.path is None:
                raise ValueError("custom_path dgp needs path")
            self.path = np.asarray(self.path, dtype=float)
            if self.path.shape != (self.n,):
                raise ValueError(f"path must have shape ({self.n},), got {self.path.shape}")


def dt_path(spec: DgpSpec) -> np.ndarray:
    """Memory-parameter path d_1 .. d_n; always inside (-0.5, 0.5)."""
    t = np.arange(1.0, spec.n + 1.0)
    if spec.kind == "constant":
        path = np.full(spec.n, float(spec.d))
    elif spec.kind == "linear_trend":
        path = 0.1 + 0.3 * t / spec.n
    elif spec.kind == "logistic_regime":
        path = 0.1 + 0.3 * norm.cdf((t - spec.n / 2.0) / (3.0 * np.sqrt(spec.n)))
    else:
        path = spec.path.copy()
    if np.any(path <= -0.5) or np.any(path >= 0.5):
        raise ValueError("d path leaves the open stationarity interval (-0.5, 0.5)")
    return path


def simulate_tvfi(spec: DgpSpec, max_lags: int | None = None, burn_in: int = 0) -> np.ndarray:
    """Draw one series of length spec.n with seeded Gaussian innovations."""
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    path = dt_path(spec)
    if burn_in:
        path = np.concatenate([np.full(burn_in, path[0]), path])
    rng = np.random.default_rng(spec.seed)
    eps = spec.sigma * rng.standard_normal(path.shape[0])
    ml = 0 if max_lags is None else int(max_lags)
    y = tvfi_sim_core(path, eps, ml)
    return y[burn_in:]
