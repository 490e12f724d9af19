"""Command-line entry point.

Subcommands: simulate, mc, fit, forecast, eval.  Every option can also be
supplied through a JSON config file (--config); explicit flags win over the
config file, which wins over built-in defaults.  All outputs land in the
--out directory together with a manifest recording the resolved options, the
seeds and the package version; outputs are byte-identical across runs with
the same resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from tvfi import __version__
from tvfi.data import load_series, write_manifest, write_series_csv
from tvfi.estimate import (FitConfig, fi_fit_dict, fit_fi, fit_report,
                           fit_result_dict, fit_tvfi)
from tvfi.filtering import gas_filter
from tvfi.forecast import draws_to_csv, predict_multi_step, predict_one_step
from tvfi.harness import (MCStudySpec, RollingSpec, run_mc_study,
                          run_rolling_eval, write_eval_cs_csv,
                          write_eval_scores_csv, write_eval_summary_csv,
                          write_mc_csv, centered_absolute_returns)
from tvfi.simulate import DgpSpec, simulate_tvfi

_DEFAULTS = {
    "simulate": {"kind": "linear_trend", "n": 1000, "sigma": 2.0, "seed": 0,
                 "d": None},
    "mc": {"dgp": "linear_trend", "n": 1000, "sigma": 2.0, "reps": 200,
           "seed": 0, "d": None, "multistart": 5, "max_iters": 4000,
           "n_jobs": 1},
    "fit": {"data": None, "data_kind": "auto", "model": "both", "seed": 0,
            "multistart": 5, "max_lags": None, "gamma": 0.5, "link_a": -0.4,
            "link_b": 0.6, "fix_omega": True, "standard_errors": False},
    "forecast": {"data": None, "data_kind": "auto", "model": "tvfi",
                 "horizon": 12, "n_sims": 5000, "seed": 0, "multistart": 5,
                 "max_lags": None},
    "eval": {"data": None, "data_kind": "auto", "initial_window": 1000,
             "refit_every": 200, "horizons": "1,2,3,6,9,12", "n_sims": 5000,
             "seed": 0, "multistart": 5, "max_lags": None,
             "evolve_state": True},
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    opts = _resolve_options(args, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        outputs = _COMMANDS[args.command](opts, out_dir)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_manifest(out_dir / "manifest.json", {
        "command": args.command,
        "options": opts,
        "package_version": __version__,
        "outputs": sorted(outputs),
    })
    for name in sorted(outputs) + ["manifest.json"]:
        print(out_dir / name)
    return 0


def _cmd_simulate(opts: dict, out_dir: Path) -> list[str]:
    spec = DgpSpec(kind=opts["kind"], n=int(opts["n"]), sigma=float(opts["sigma"]),
                   seed=int(opts["seed"]),
                   d=None if opts["d"] is None else float(opts["d"]))
    y = simulate_tvfi(spec)
    write_series_csv(out_dir / "y.csv", y)
    return ["y.csv"]


def _cmd_mc(opts: dict, out_dir: Path) -> list[str]:
    fit_config = FitConfig(multistart=int(opts["multistart"]),
                           max_iters=int(opts["max_iters"]))
    spec = MCStudySpec(dgp_kind=opts["dgp"], n=int(opts["n"]),
                       sigma=float(opts["sigma"]), reps=int(opts["reps"]),
                       d=None if opts["d"] is None else float(opts["d"]),
                       fit_config=fit_config, seed=int(opts["seed"]),
                       n_jobs=int(opts["n_jobs"]))
    result = run_mc_study(spec)
    write_mc_csv(result, out_dir / "mc_paths.csv")
    _write_mc_reps(result, out_dir / "mc_reps.csv")
    return ["mc_paths.csv", "mc_reps.csv"]


def _cmd_fit(opts: dict, out_dir: Path) -> list[str]:
    y = _load(opts)
    outputs = []
    reports = []
    if opts["model"] in ("tvfi", "both"):
        res = fit_tvfi(y, _fit_config(opts))
        with open(out_dir / "fit_tvfi.json", "w") as fh:
            json.dump(fit_result_dict(res), fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs.append("fit_tvfi.json")
        reports.append(fit_report(res))
    if opts["model"] in ("fi", "both"):
        res_fi = fit_fi(y, max_lags=opts["max_lags"])
        with open(out_dir / "fit_fi.json", "w") as fh:
            json.dump(fi_fit_dict(res_fi), fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs.append("fit_fi.json")
        reports.append(fit_report(res_fi))
    with open(out_dir / "fit_report.txt", "w") as fh:
        fh.write("\n\n".join(reports) + "\n")
    outputs.append("fit_report.txt")
    return outputs


def _cmd_forecast(opts: dict, out_dir: Path) -> list[str]:
    y = _load(opts)
    horizon = int(opts["horizon"])
    if opts["model"] == "tvfi":
        fit = fit_tvfi(y, _fit_config(opts))
        params, evolve = fit.params, True
    else:
        from tvfi.harness import _fi_params
        params, evolve = _fi_params(fit_fi(y, max_lags=opts["max_lags"])), False
    one = predict_one_step(y, params, max_lags=opts["max_lags"])
    dists = predict_multi_step(y, params, horizon, n_sims=int(opts["n_sims"]),
                               seed=int(opts["seed"]), max_lags=opts["max_lags"],
                               evolve_state=evolve)
    draws_to_csv(out_dir / "forecast_draws.csv", dists)
    summary = {
        "model": opts["model"], "horizon": horizon,
        "n_sims": int(opts["n_sims"]),
        "one_step_mean": one.mean, "one_step_sd": one.sd,
        "sample_means": {d.horizon: float(np.mean(d.draws)) for d in dists},
    }
    with open(out_dir / "forecast_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["forecast_draws.csv", "forecast_summary.json"]


def _cmd_eval(opts: dict, out_dir: Path) -> list[str]:
    y = _load(opts)
    horizons = tuple(int(tok) for tok in str(opts["horizons"]).split(",") if tok)
    spec = RollingSpec(initial_window=int(opts["initial_window"]),
                       refit_every=int(opts["refit_every"]),
                       horizons=horizons, n_sims=int(opts["n_sims"]),
                       fit_config=FitConfig(multistart=int(opts["multistart"]),
                                            max_lags=opts["max_lags"]),
                       seed=int(opts["seed"]),
                       evolve_state=bool(opts["evolve_state"]))
    report = run_rolling_eval(y, spec)
    write_eval_scores_csv(report, out_dir / "eval_scores.csv")
    write_eval_summary_csv(report, out_dir / "eval_summary.csv")
    outputs = ["eval_scores.csv", "eval_summary.csv"]
    if report.cs_h1 is not None:
        write_eval_cs_csv(report, out_dir / "eval_cs.csv")
        outputs.append("eval_cs.csv")
    return outputs


_COMMANDS = {
    "simulate": _cmd_simulate,
    "mc": _cmd_mc,
    "fit": _cmd_fit,
    "forecast": _cmd_forecast,
    "eval": _cmd_eval,
}


def _load(opts: dict) -> np.ndarray:
    if not opts["data"]:
        raise ValueError("--data is required for this command")
    series = load_series(opts["data"], kind=opts["data_kind"])
    if opts["data_kind"] == "prices":
        series = centered_absolute_returns(series)
    return series


def _fit_config(opts: dict) -> FitConfig:
    return FitConfig(
        fix_omega=bool(opts.get("fix_omega", True)),
        link_a=float(opts.get("link_a", -0.4)),
        link_b=float(opts.get("link_b", 0.6)),
        gamma=float(opts.get("gamma", 0.5)),
        max_lags=opts.get("max_lags"),
        multistart=int(opts.get("multistart", 5)),
        seed=int(opts.get("seed", 0)),
        standard_errors=bool(opts.get("standard_errors", False)),
    )


def _write_mc_reps(result, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["rep", "converged", "loglik", "beta", "alpha", "sigma2", "d0"])
        for s in result.rep_summaries:
            wr.writerow([s["rep"], int(s["converged"]), repr(float(s["loglik"])),
                         repr(float(s["beta"])), repr(float(s["alpha"])),
                         repr(float(s["sigma2"])), repr(float(s["d0"]))])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvfi",
        description="Time-varying long-memory model: simulation, estimation, "
                    "forecasting and forecast evaluation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("simulate", help="simulate one series from a d-path DGP")
    add_common(p)
    p.add_argument("--kind", choices=["constant", "linear_trend", "logistic_regime"])
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--d", type=float, help="memory parameter for kind=constant")

    p = sub.add_parser("mc", help="Monte Carlo path-tracking study")
    add_common(p)
    p.add_argument("--dgp", choices=["constant", "linear_trend", "logistic_regime"])
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--multistart", type=int)
    p.add_argument("--max-iters", type=int, dest="max_iters")
    p.add_argument("--n-jobs", type=int, dest="n_jobs")

    p = sub.add_parser("fit", help="fit the score-driven and/or constant-d model")
    add_common(p)
    _add_data_args(p)
    p.add_argument("--model", choices=["tvfi", "fi", "both"])
    p.add_argument("--seed", type=int)
    p.add_argument("--multistart", type=int)
    p.add_argument("--max-lags", type=int, dest="max_lags")
    p.add_argument("--gamma", type=float)
    p.add_argument("--link-a", type=float, dest="link_a")
    p.add_argument("--link-b", type=float, dest="link_b")
    p.add_argument("--fix-omega", action=argparse.BooleanOptionalAction,
                   dest="fix_omega", default=None)
    p.add_argument("--standard-errors", action=argparse.BooleanOptionalAction,
                   dest="standard_errors", default=None)

    p = sub.add_parser("forecast", help="density forecasts from the end of a series")
    add_common(p)
    _add_data_args(p)
    p.add_argument("--model", choices=["tvfi", "fi"])
    p.add_argument("--horizon", type=int)
    p.add_argument("--n-sims", type=int, dest="n_sims")
    p.add_argument("--seed", type=int)
    p.add_argument("--multistart", type=int)
    p.add_argument("--max-lags", type=int, dest="max_lags")

    p = sub.add_parser("eval", help="rolling out-of-sample forecast evaluation")
    add_common(p)
    _add_data_args(p)
    p.add_argument("--initial-window", type=int, dest="initial_window")
    p.add_argument("--refit-every", type=int, dest="refit_every")
    p.add_argument("--horizons", help="comma-separated, e.g. 1,2,3,6,9,12")
    p.add_argument("--n-sims", type=int, dest="n_sims")
    p.add_argument("--seed", type=int)
    p.add_argument("--multistart", type=int)
    p.add_argument("--max-lags", type=int, dest="max_lags")
    p.add_argument("--evolve-state", action=argparse.BooleanOptionalAction,
                   dest="evolve_state", default=None)

    return parser


def _add_data_args(p) -> None:
    p.add_argument("--data", help="input series file")
    p.add_argument("--data-kind", dest="data_kind",
                   choices=["auto", "series", "monthly_text", "prices"])


def _resolve_options(args: argparse.Namespace, config: dict) -> dict:
    opts = {}
    for key, builtin in _DEFAULTS[args.command].items():
        v = getattr(args, key, None)
        if v is None:
            v = config.get(key, builtin)
        opts[key] = v
    return opts


if __name__ == "__main__":
    sys.exit(main())
