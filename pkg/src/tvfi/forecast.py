"""Predictive distributions at the end of a sample.

One step ahead the predictive law is Gaussian in closed form: the filter
state g_{n+1} is known after the forward pass, so

    y_{n+1} | F_n  ~  N( -sum_j pi_j(d_{n+1}) y_{n+1-j} , sigma2 ).

Beyond one step the evolving memory parameter makes the distribution
non-Gaussian, so it is represented by simulated trajectories.  By default
each trajectory keeps updating the filter state from its own simulated
observations; evolve_state=False freezes d at d_{n+1} instead, which is also
how the constant-d benchmark produces its multi-step forecasts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from tvfi.filtering import StaticParams, gas_filter
from tvfi.fracdiff import pi_weights
from tvfi.recursions import forecast_sim_core


@dataclass
class PredictiveDist:
    """Forecast distribution for one horizon.

    kind is "gaussian" (mean/sd set, horizon 1 only) or "sample" (draws set).
    origin is the number of observations the forecast conditions on.
    """

    horizon: int
    kind: str
    origin: int
    mean: float | None = None
    sd: float | None = None
    draws: np.ndarray | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.kind == "gaussian":
            if self.horizon != 1:
                raise ValueError("gaussian predictive is only available at horizon 1")
            if self.mean is None or self.sd is None or not self.sd > 0.0:
                raise ValueError("gaussian predictive needs mean and sd > 0")
        elif self.kind == "sample":
            if self.draws is None or len(self.draws) < 1:
                raise ValueError("sample predictive needs at least one draw")
            if not np.all(np.isfinite(self.draws)):
                raise ValueError("sample predictive has non-finite draws")
        else:
            raise ValueError(f"unknown predictive kind {self.kind!r}")


def predict_one_step(y: np.ndarray, params: StaticParams,
                     max_lags: int | None = None) -> PredictiveDist:
    """Closed-form Gaussian one-step-ahead predictive."""
    y = np.ascontiguousarray(y, dtype=float)
    out = gas_filter(y, params, max_lags=max_lags)
    n = y.shape[0]
    d_next = out.d[n]
    jt = n if max_lags is None else min(n, max_lags)
    mean = 0.0
    if jt > 0:
        window = y[::-1][:jt]
        mean = -float(pi_weights(d_next, jt) @ window)
    return PredictiveDist(horizon=1, kind="gaussian", origin=n,
                          mean=mean, sd=float(np.sqrt(params.sigma2)))


def predict_multi_step(y: np.ndarray, params: StaticParams, horizon: int,
                       n_sims: int = 5000,
                       seed: int | np.random.SeedSequence = 0,
                       max_lags: int | None = None,
                       evolve_state: bool = True) -> list[PredictiveDist]:
    """Simulated predictive distributions for horizons 1 .. horizon.

    Innovation draws are assigned to trajectories by index up front, so the
    result is reproducible for a given seed regardless of how the simulation
    is executed.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if n_sims < 1:
        raise ValueError(f"n_sims must be >= 1, got {n_sims}")
    y = np.ascontiguousarray(y, dtype=float)
    out = gas_filter(y, params, max_lags=max_lags)
    n = y.shape[0]
    g_start = out.g[n]

    rng = np.random.default_rng(seed)
    eps = np.sqrt(params.sigma2) * rng.standard_normal((n_sims, horizon))
    ml = 0 if max_lags is None else int(max_lags)
    sims = forecast_sim_core(y, eps, g_start, params.omega, params.beta,
                             params.alpha, params.sigma2, params.link_a,
                             params.link_b, params.gamma, ml, evolve_state)
    return [PredictiveDist(horizon=h, kind="sample", origin=n, draws=sims[:, h - 1])
            for h in range(1, horizon + 1)]


def draws_to_csv(path, dists: list[PredictiveDist]) -> None:
    """Write sampled predictive draws in long format (horizon, draw)."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["horizon", "draw"])
        for dist in dists:
            if dist.kind != "sample":
                raise ValueError("draws_to_csv needs sample predictives")
            for v in dist.draws:
                wr.writerow([dist.horizon, repr(float(v))])
