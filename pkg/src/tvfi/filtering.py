"""Score-driven filter for the time-varying memory parameter.

The observation equation is a fractionally integrated Gaussian noise whose
memory parameter d_t follows the filtered recursion

    g_{t+1} = omega + beta * g_t + alpha * s_t,        d_t = link(g_t),

where s_t is the scaled score of the time-t log-likelihood contribution with
respect to g_t.  The recursion lives on the unconstrained scale; the logistic
link keeps d_t inside (a, b) for every finite parameter vector.

Per-step quantities, writing e_t for the truncated-AR residual and w_t for
its derivative in d_t:

    e_t = y_t + sum_j pi_j(d_t) y_{t-j}
    w_t = sum_j dpi_j(d_t) y_{t-j}
    loglik_t = -0.5 log(2 pi sigma2) - e_t^2 / (2 sigma2)
    grad_d   = -e_t w_t / sigma2          (score in d)
    fisher_d = w_t^2 / sigma2             (conditional information in d)

The score is moved to the g scale with the chain rule and scaled by the
information raised to -gamma; gamma = 0.5 gives the square-root-information
scaling, under which s_t collapses to -sign(w_t) * e_t / sigma.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from tvfi.fracdiff import dpi_weights, pi_weights
from tvfi.recursions import gas_filter_core


class FilterDivergenceError(RuntimeError):
    """Raised when the state update produces a non-finite value."""

    def __init__(self, t: int):
        self.t = t
        super().__init__(f"filter state became non-finite at step t={t}")


@dataclass
class StaticParams:
    """Static parameter vector of the filter.

    d0 seeds the recursion through g_1 = inv_link(d0); omega is kept as an
    explicit parameter even though the identified default fixes it at zero.
    """

    omega: float
    beta: float
    alpha: float
    sigma2: float
    d0: float
    link_a: float = -0.4
    link_b: float = 0.6
    gamma: float = 0.5

    def __post_init__(self):
        if not self.sigma2 > 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if not self.link_a < self.link_b:
            raise ValueError(f"need link_a < link_b, got ({self.link_a}, {self.link_b})")
        if not self.link_a < self.d0 < self.link_b:
            raise ValueError(
                f"d0={self.d0} outside the open link interval ({self.link_a}, {self.link_b})"
            )
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        for name in ("omega", "beta", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass
class FilterOutput:
    """Filtered paths; g and d carry one extra entry for the post-sample state."""

    g: np.ndarray
    d: np.ndarray
    s: np.ndarray
    resid: np.ndarray
    loglik_t: np.ndarray
    loglik: float

    def to_csv(self, path) -> None:
        n = self.s.shape[0]
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "g", "d", "s", "resid", "loglik_t"])
            for t in range(n):
                wr.writerow([t + 1, repr(float(self.g[t])), repr(float(self.d[t])),
                             repr(float(self.s[t])), repr(float(self.resid[t])),
                             repr(float(self.loglik_t[t]))])
            wr.writerow([n + 1, repr(float(self.g[n])), repr(float(self.d[n])), "", "", ""])


def link(g, a: float = -0.4, b: float = 0.6):
    """Map the unconstrained state to d in (a, b).  Accepts scalars or arrays."""
    res = a + (b - a) * expit(g)
    return float(res) if np.ndim(res) == 0 else res


def inv_link(d: float, a: float = -0.4, b: float = 0.6) -> float:
    """Inverse of link; requires d strictly inside (a, b)."""
    if not a < d < b:
        raise ValueError(f"d={d} not inside the open interval ({a}, {b})")
    p = (d - a) / (b - a)
    return math.log(p / (1.0 - p))


def link_slope(g, a: float = -0.4, b: float = 0.6):
    """Derivative of link with respect to g."""
    p = expit(g)
    res = (b - a) * p * (1.0 - p)
    return float(res) if np.ndim(res) == 0 else res


def score_and_scale(y_past: np.ndarray, y_t: float, d_t: float, sigma2: float,
                    max_lags: int | None = None) -> tuple[float, float]:
    """Score and conditional information of loglik_t with respect to d_t.

    y_past holds the available history most-recent-first, i.e. y_past[0] is
    y_{t-1}.  An empty history (t = 1) gives (0, 0).
    """
    if not sigma2 > 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    y_past = np.asarray(y_past, dtype=float)
    jt = y_past.shape[0]
    if max_lags is not None and max_lags < jt:
        jt = max_lags
    if jt == 0:
        return 0.0, 0.0
    window = y_past[:jt]
    e = y_t + pi_weights(d_t, jt) @ window
    w = dpi_weights(d_t, jt) @ window
    return -e * w / sigma2, w * w / sigma2


def gas_filter(y: np.ndarray, params: StaticParams,
               max_lags: int | None = None) -> FilterOutput:
    """Run the filter over y and return all per-step paths."""
    y = np.ascontiguousarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] < 1:
        raise ValueError("y must be a one-dimensional array with at least one value")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    g_init = inv_link(params.d0, params.link_a, params.link_b)
    ml = 0 if max_lags is None else int(max_lags)
    g, d, s, resid, loglik_t, fail_t = gas_filter_core(
        y, params.omega, params.beta, params.alpha, params.sigma2, g_init,
        params.link_a, params.link_b, params.gamma, ml,
    )
    if fail_t >= 0:
        raise FilterDivergenceError(fail_t + 1)
    return FilterOutput(g=g, d=d, s=s, resid=resid, loglik_t=loglik_t,
                        loglik=float(np.sum(loglik_t)))


def loglik(y: np.ndarray, params: StaticParams, max_lags: int | None = None) -> float:
    """Total Gaussian log-likelihood of y under the filtered model."""
    return gas_filter(y, params, max_lags=max_lags).loglik
