"""End-to-end acceptance suite.

Each test checks one release gate and prints a single PASS/FAIL line to the
terminal (bypassing capture) so the run log shows the verdicts directly.
The data-dependent gate is skipped, not failed, when no data files are
present; see the module docstring of tvfi.data for the accepted formats.
"""

import math
import os
import shutil
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from oracles import crps_by_quadrature, crps_double_sum, pi_by_recursion
from tvfi.data import _sniff_kind, load_series
from tvfi.estimate import FitConfig, fit_fi, fit_tvfi
from tvfi.filtering import gas_filter, score_and_scale
from tvfi.fracdiff import (d2pi_weights, dpi_weights, dpi_weights_digamma_form,
                           pi_weights, pi_weights_gamma_form)
from tvfi.harness import (MCStudySpec, RollingSpec, centered_absolute_returns,
                          run_mc_study, run_rolling_eval)
from tvfi.scoring import ScoreSeries, crps_gaussian, crps_sample, dm_test
from tvfi.simulate import DgpSpec, simulate_tvfi

DATA_DIR = Path(os.environ.get("TVFI_DATA_DIR",
                               Path(__file__).resolve().parent.parent / "data"))


@pytest.fixture()
def announce(capsys):
    def _announce(num, name, ok, extra=""):
        tag = "PASS" if ok else "FAIL"
        suffix = f" ({extra})" if extra else ""
        with capsys.disabled():
            print(f"\ncriterion {num} ({name}): {tag}{suffix}")
    return _announce


def test_criterion_1_coefficient_oracles(announce):
    t0 = time.perf_counter()
    ok = True

    # recursion vs log-gamma closed form
    for d in (-0.4, -0.1, 0.1, 0.4):
        mine = pi_weights(d, 50)
        gamma_form = pi_weights_gamma_form(d, 50)
        ok &= bool(np.allclose(mine, gamma_form, rtol=1e-12, atol=0.0))
        ok &= bool(np.allclose(mine, pi_by_recursion(d, 50), rtol=1e-13,
                               atol=0.0))

    # first and second derivative recursions vs central differences
    for d in (-0.3, 0.0, 0.2, 0.45):
        h = 1e-4
        fd1 = (pi_weights(d + h, 50) - pi_weights(d - h, 50)) / (2 * h)
        ok &= bool(np.allclose(dpi_weights(d, 50), fd1, atol=5e-8, rtol=0.0))
        fd2 = (pi_weights(d + h, 50) - 2.0 * pi_weights(d, 50)
               + pi_weights(d - h, 50)) / (h * h)
        ok &= bool(np.allclose(d2pi_weights(d, 50), fd2, atol=1e-6, rtol=0.0))

    # digamma closed form away from the d=0 singularity
    for d in np.linspace(-0.49, 0.49, 21):
        if abs(d) <= 1e-3:
            continue
        ok &= bool(np.allclose(dpi_weights(float(d), 200),
                               dpi_weights_digamma_form(float(d), 200),
                               atol=1e-10, rtol=0.0))

    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    announce(1, "coefficient oracles", ok, f"{elapsed:.2f}s")
    assert ok


def test_criterion_2_score_and_information(announce):
    t0 = time.perf_counter()
    ok = True
    rng = np.random.default_rng(123)

    # analytic score vs finite differences of the likelihood contribution
    worst_rel = 0.0
    for _ in range(50):
        m = int(rng.integers(10, 80))
        past = rng.standard_normal(m)
        d = float(rng.uniform(-0.35, 0.55))
        sigma2 = float(np.exp(rng.uniform(-1.5, 2.0)))
        y_t = float(rng.normal(scale=math.sqrt(sigma2)))
        grad, _ = score_and_scale(past, y_t, d, sigma2, m)

        def contrib(dd):
            e = y_t + float(pi_weights(dd, m) @ past)
            return -0.5 * math.log(2.0 * math.pi * sigma2) \
                - e * e / (2.0 * sigma2)

        h = 1e-6
        fd = (contrib(d + h) - contrib(d - h)) / (2 * h)
        worst_rel = max(worst_rel, abs(fd - grad) / max(abs(grad), 1e-12))
    ok &= worst_rel < 1e-6

    # information equals the Monte Carlo mean of minus the score derivative
    rng = np.random.default_rng(77)
    worst_dev = 0.0
    for _ in range(5):
        m = int(rng.integers(20, 60))
        past = rng.standard_normal(m)
        d = float(rng.uniform(-0.3, 0.5))
        sigma2 = float(np.exp(rng.uniform(-1.0, 1.5)))
        base = -float(pi_weights(d, m) @ past)   # y_t making e = 0
        _, fisher = score_and_scale(past, base, d, sigma2, m)
        eps = math.sqrt(sigma2) * rng.standard_normal(10000)

        # the score is affine in y_t, so two evaluations per perturbed d give
        # the whole batch; the third point checks that affinity on the way
        h = 1e-4
        probes = {}
        for dd in (d + h, d - h):
            g0, _ = score_and_scale(past, base, dd, sigma2, m)
            g1, _ = score_and_scale(past, base + 1.0, dd, sigma2, m)
            g2, _ = score_and_scale(past, base + 2.0, dd, sigma2, m)
            assert g2 == pytest.approx(g0 + 2.0 * (g1 - g0), rel=1e-9)
            probes[dd] = (g0, g1 - g0)
        up = probes[d + h][0] + probes[d + h][1] * eps
        dn = probes[d - h][0] + probes[d - h][1] * eps
        per_draw = -(up - dn) / (2 * h)
        se = float(np.std(per_draw, ddof=1)) / math.sqrt(eps.shape[0])
        worst_dev = max(worst_dev, abs(float(np.mean(per_draw)) - fisher) / se)
    ok &= worst_dev < 3.0

    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30.0
    announce(2, "score and information identities", ok,
             f"max rel {worst_rel:.1e}, max dev {worst_dev:.2f} SE, {elapsed:.1f}s")
    assert ok


def test_criterion_3_path_tracking_study(announce):
    t0 = time.perf_counter()
    ok = True
    details = []
    for kind in ("linear_trend", "logistic_regime"):
        res = run_mc_study(MCStudySpec(dgp_kind=kind, n=500, sigma=2.0,
                                       reps=50, seed=2024))
        sl = slice(49, 500)          # t in [0.1 n, n]
        err = res.mean_path[sl] - res.true_path[sl]
        rmse = float(np.sqrt(np.mean(err ** 2)))
        inside = (res.band_lo[sl] <= res.true_path[sl]) \
            & (res.true_path[sl] <= res.band_hi[sl])
        cover = float(np.mean(inside))
        ok &= rmse < 0.08 and cover >= 0.90 and res.n_failed == 0
        details.append(f"{kind}: rmse={rmse:.4f} cover={cover:.3f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 900.0
    announce(3, "replication path tracking", ok,
             "; ".join(details) + f", {elapsed:.0f}s")
    assert ok


def test_criterion_4_crps_oracles(announce):
    t0 = time.perf_counter()
    ok = True

    worst_quad = 0.0
    for sd in (0.1, 1.0, 10.0):
        for z in np.linspace(-5.0, 5.0, 21):
            obs = float(sd * z)
            gap = abs(crps_gaussian(0.0, sd, obs)
                      - crps_by_quadrature(0.0, sd, obs))
            worst_quad = max(worst_quad, gap)
    ok &= worst_quad < 1e-7

    rng = np.random.default_rng(5)
    worst_sum = 0.0
    for k in (1, 2, 17, 100, 500):
        draws = rng.standard_normal(k)
        obs = float(rng.normal())
        a, b = crps_sample(draws, obs), crps_double_sum(draws, obs)
        worst_sum = max(worst_sum, abs(a - b) / max(1.0, abs(b)))
    ok &= worst_sum < 1e-12

    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10.0
    announce(4, "scoring rule oracles", ok,
             f"quad gap {worst_quad:.1e}, sum gap {worst_sum:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_comparison_test_size(announce):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    zeros = np.zeros(500)
    rejections = 0
    reps = 2000
    for _ in range(reps):
        a = ScoreSeries("a", 1, rng.standard_normal(500))
        b = ScoreSeries("b", 1, zeros.copy())
        if dm_test(a, b).p_value < 0.05:
            rejections += 1
    rate = rejections / reps
    elapsed = time.perf_counter() - t0
    ok = 0.03 <= rate <= 0.08 and elapsed < 60.0
    announce(5, "equal-skill rejection rate", ok,
             f"rate={rate:.4f}, {elapsed:.1f}s")
    assert ok


def test_criterion_6_constant_memory_recovery(announce):
    t0 = time.perf_counter()
    hits = 0
    for seed in range(20):
        y = simulate_tvfi(DgpSpec(kind="constant", n=1000, sigma=2.0, d=0.25,
                                  seed=seed))
        res = fit_tvfi(y, FitConfig(seed=seed))
        d_path = gas_filter(y, res.params).d[:1000]
        if abs(float(np.mean(d_path)) - 0.25) <= 0.05:
            hits += 1
    elapsed = time.perf_counter() - t0
    ok = hits >= 18 and elapsed < 600.0
    announce(6, "constant memory recovery", ok,
             f"{hits}/20 seeds, {elapsed:.0f}s")
    assert ok


def _find_data_files():
    if not DATA_DIR.is_dir():
        return None, None
    temperature = prices = None
    for path in sorted(DATA_DIR.iterdir()):
        if not path.is_file():
            continue
        try:
            kind = _sniff_kind(path)
        except OSError:
            continue
        if kind == "monthly_text" and temperature is None:
            temperature = path
        elif kind == "prices" and prices is None:
            prices = path
    return temperature, prices


def test_criterion_7_observed_series(announce):
    temperature, prices = _find_data_files()
    if temperature is None or prices is None:
        pytest.skip(f"no data files under {DATA_DIR} "
                    "(need a monthly-anomaly text file and a price CSV)")
    ok = True
    details = []

    anomalies = load_series(temperature, kind="monthly_text")
    d_temp = fit_fi(anomalies).d_hat
    ok &= abs(d_temp - 0.498) <= 0.02
    details.append(f"temperature d={d_temp:.3f}")

    vol = centered_absolute_returns(load_series(prices, kind="prices"))
    d_fx = fit_fi(vol).d_hat
    ok &= abs(d_fx - 0.131) <= 0.02
    details.append(f"fx d={d_fx:.3f}")

    spec = RollingSpec(initial_window=1000, refit_every=200,
                       horizons=(1, 2, 3, 6, 9, 12), n_sims=2000,
                       fit_config=FitConfig(multistart=3, max_lags=1000),
                       seed=0)
    for label, series in (("temperature", anomalies), ("fx", vol)):
        report = run_rolling_eval(series, spec)
        for h in report.horizons:
            ok &= report.avg_crps["tvfi"][h] <= report.avg_crps["fi"][h] + 1e-12
        if label == "fx":
            for h in report.horizons:
                if h >= 2:
                    ok &= report.dm[h].p_value < 0.05
        gaps = ", ".join(f"h{h}:{report.avg_crps['fi'][h] - report.avg_crps['tvfi'][h]:+.2e}"
                         for h in report.horizons)
        details.append(f"{label} crps gaps {gaps}")

    announce(7, "observed series reproduction", ok, "; ".join(details))
    assert ok


def _cli_command():
    exe = shutil.which("tvfi")
    if exe:
        return [exe]
    return [sys.executable, "-m", "tvfi.cli"]


def _run_cli(args):
    proc = subprocess.run(_cli_command() + args, capture_output=True,
                          text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


def _same_bytes(dir_a, dir_b, names):
    return all((dir_a / n).read_bytes() == (dir_b / n).read_bytes()
               for n in names)


def test_criterion_8_run_determinism(announce, tmp_path):
    t0 = time.perf_counter()
    mc_args = ["mc", "--dgp", "constant", "--d", "0.2", "--n", "120",
               "--sigma", "1.0", "--reps", "2", "--multistart", "1",
               "--seed", "7"]
    a, b = tmp_path / "mc_a", tmp_path / "mc_b"
    _run_cli(mc_args + ["--out", str(a)])
    _run_cli(mc_args + ["--out", str(b)])
    ok = _same_bytes(a, b, ["mc_paths.csv", "mc_reps.csv", "manifest.json"])

    data_dir = tmp_path / "data"
    _run_cli(["simulate", "--out", str(data_dir), "--kind", "constant",
              "--d", "0.2", "--n", "260", "--sigma", "1.0", "--seed", "13"])
    eval_args = ["eval", "--data", str(data_dir / "y.csv"),
                 "--initial-window", "200", "--refit-every", "30",
                 "--horizons", "1,2,3", "--n-sims", "1200",
                 "--multistart", "2", "--seed", "3"]
    c, d = tmp_path / "ev_a", tmp_path / "ev_b"
    _run_cli(eval_args + ["--out", str(c)])
    _run_cli(eval_args + ["--out", str(d)])
    ok &= _same_bytes(c, d, ["eval_scores.csv", "eval_summary.csv",
                             "eval_cs.csv", "manifest.json"])

    elapsed = time.perf_counter() - t0
    announce(8, "repeat-run determinism", ok, f"{elapsed:.0f}s")
    assert ok
