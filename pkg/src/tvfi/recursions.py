"""Compiled inner loops.

The filter, the simulator and the trajectory sampler all walk the data once
and rebuild the fractional differencing coefficients at the current memory
parameter inside each step, so the work is O(n * max_lags) with a tiny
constant.  These loops are the only hot spots in the package and are the only
numba-compiled code; everything else is plain numpy.

Conventions shared by all cores:
  * max_lags <= 0 means "use the full available history".
  * the unconstrained state g maps to the memory parameter through the
    logistic link d = a + (b - a) / (1 + exp(-g)).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _sigmoid(g):
    # two-branch form, no overflow for large |g|
    if g >= 0.0:
        z = np.exp(-g)
        return 1.0 / (1.0 + z)
    z = np.exp(g)
    return z / (1.0 + z)


@njit(cache=True, nogil=True)
def gas_filter_core(y, omega, beta, alpha, sigma2, g_init, a, b, gamma, max_lags):
    """One forward pass of the score-driven filter.

    Returns (g, d, s, resid, loglik_t, fail_t) where g and d have n + 1
    entries (the last one is the one-step-ahead state after the sample) and
    fail_t is -1 on success, else the 0-based step at which the state update
    stopped being finite.
    """
    n = y.shape[0]
    g = np.empty(n + 1)
    d = np.empty(n + 1)
    s = np.zeros(n)
    resid = np.empty(n)
    loglik_t = np.empty(n)
    const = 0.5 * np.log(2.0 * np.pi * sigma2)
    span = b - a

    g[0] = g_init
    fail_t = -1
    for t in range(n):
        sig = _sigmoid(g[t])
        dt = a + span * sig
        d[t] = dt
        slope = span * sig * (1.0 - sig)

        jt = t
        if max_lags > 0 and max_lags < t:
            jt = max_lags

        e = y[t]
        w = 0.0
        pi_prev = 1.0
        dpi_prev = 0.0
        for j in range(1, jt + 1):
            fac = (j - 1.0 - dt) / j
            pi_j = pi_prev * fac
            dpi_j = dpi_prev * fac - pi_prev / j
            yl = y[t - j]
            e += pi_j * yl
            w += dpi_j * yl
            pi_prev = pi_j
            dpi_prev = dpi_j

        resid[t] = e
        loglik_t[t] = -const - e * e / (2.0 * sigma2)

        grad_d = -e * w / sigma2
        fisher_d = w * w / sigma2
        grad_g = grad_d * slope
        fisher_g = fisher_d * slope * slope
        if fisher_g > 0.0:
            st = fisher_g ** (-gamma) * grad_g
        else:
            st = 0.0
        s[t] = st

        g_next = omega + beta * g[t] + alpha * st
        if not np.isfinite(g_next):
            fail_t = t
            g[t + 1] = np.nan
            d[t + 1] = np.nan
            break
        g[t + 1] = g_next

    if fail_t < 0:
        sig = _sigmoid(g[n])
        d[n] = a + span * sig
    return g, d, s, resid, loglik_t, fail_t


@njit(cache=True, nogil=True)
def tvfi_sim_core(d_path, eps, max_lags):
    """Generate y_t = eps_t - sum_j pi_j(d_t) y_{t-j} along a given d path."""
    n = d_path.shape[0]
    y = np.empty(n)
    for t in range(n):
        dt = d_path[t]
        jt = t
        if max_lags > 0 and max_lags < t:
            jt = max_lags
        acc = eps[t]
        pi_prev = 1.0
        for j in range(1, jt + 1):
            pi_j = pi_prev * (j - 1.0 - dt) / j
            acc -= pi_j * y[t - j]
            pi_prev = pi_j
        y[t] = acc
    return y


@njit(cache=True, nogil=True)
def forecast_sim_core(y, eps, g_start, omega, beta, alpha, sigma2, a, b, gamma,
                      max_lags, evolve_state):
    """Simulate forecast trajectories beyond the sample.

    eps has shape (n_sims, horizon) and already carries the innovation scale.
    Each trajectory starts from the filter state g_start at the forecast
    origin; when evolve_state is True the score recursion keeps running on the
    trajectory's own simulated observations, otherwise the state is frozen.
    Returns the simulated observations, shape (n_sims, horizon).
    """
    n = y.shape[0]
    n_sims, horizon = eps.shape
    out = np.empty((n_sims, horizon))
    span = b - a

    for i in range(n_sims):
        g = g_start
        for k in range(horizon):
            sig = _sigmoid(g)
            dt = a + span * sig

            avail = n + k
            jt = avail
            if max_lags > 0 and max_lags < avail:
                jt = max_lags

            acc = 0.0
            w = 0.0
            pi_prev = 1.0
            dpi_prev = 0.0
            for j in range(1, jt + 1):
                fac = (j - 1.0 - dt) / j
                pi_j = pi_prev * fac
                dpi_j = dpi_prev * fac - pi_prev / j
                if j <= k:
                    yl = out[i, k - j]
                else:
                    yl = y[n - (j - k)]
                acc += pi_j * yl
                w += dpi_j * yl
                pi_prev = pi_j
                dpi_prev = dpi_j

            e = eps[i, k]
            out[i, k] = e - acc

            if evolve_state:
                slope = span * sig * (1.0 - sig)
                grad_g = (-e * w / sigma2) * slope
                fisher_g = (w * w / sigma2) * slope * slope
                if fisher_g > 0.0:
                    st = fisher_g ** (-gamma) * grad_g
                else:
                    st = 0.0
                g = omega + beta * g + alpha * st
    return out
