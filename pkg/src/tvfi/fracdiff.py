"""Coefficients of the fractional differencing operator and their d-derivatives.

The AR(inf) representation of (1-B)^d y_t = eps_t uses the expansion

    (1-B)^d = sum_{j>=0} pi_j(d) B^j,   pi_0 = 1,

with the one-term recursion

    pi_j(d) = pi_{j-1}(d) * (j - 1 - d) / j.

Everything downstream (simulator, filter, likelihood) consumes these
coefficients together with their first derivative in d, so both are computed
by the same recursion: differentiating once and twice in d gives

    dpi_j  = dpi_{j-1} * (j-1-d)/j - pi_{j-1}/j
    d2pi_j = d2pi_{j-1} * (j-1-d)/j - 2*dpi_{j-1}/j

with dpi_0 = d2pi_0 = 0.  Unlike the digamma/trigamma closed forms the
recursions have no removable singularity at d = 0, which matters because the
filtered memory parameter can cross zero.  The closed forms are kept below as
independent cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln, gammasgn, polygamma


def pi_weights(d: float, n_terms: int) -> np.ndarray:
    """First n_terms fractional differencing coefficients pi_1 .. pi_n.

    pi_0 = 1 is implicit and not returned.  Defined for every finite d.
    """
    _check_terms(n_terms)
    k = np.arange(1.0, n_terms + 1.0)
    return np.cumprod((k - 1.0 - d) / k)


def dpi_weights(d: float, n_terms: int) -> np.ndarray:
    """First derivative of pi_j with respect to d, j = 1 .. n_terms."""
    _check_terms(n_terms)
    out = np.empty(n_terms)
    pi_prev = 1.0
    dpi_prev = 0.0
    for j in range(1, n_terms + 1):
        fac = (j - 1.0 - d) / j
        dpi_j = dpi_prev * fac - pi_prev / j
        out[j - 1] = dpi_j
        pi_prev = pi_prev * fac
        dpi_prev = dpi_j
    return out


def d2pi_weights(d: float, n_terms: int) -> np.ndarray:
    """Second derivative of pi_j with respect to d, j = 1 .. n_terms."""
    _check_terms(n_terms)
    out = np.empty(n_terms)
    pi_prev = 1.0
    dpi_prev = 0.0
    d2pi_prev = 0.0
    for j in range(1, n_terms + 1):
        fac = (j - 1.0 - d) / j
        d2pi_j = d2pi_prev * fac - 2.0 * dpi_prev / j
        dpi_j = dpi_prev * fac - pi_prev / j
        out[j - 1] = d2pi_j
        pi_prev = pi_prev * fac
        dpi_prev = dpi_j
        d2pi_prev = d2pi_j
    return out


@dataclass(frozen=True)
class FracCoefs:
    """Coefficient bundle for one value of the memory parameter."""

    d: float
    pi: np.ndarray
    dpi: np.ndarray
    d2pi: np.ndarray | None = None


def frac_coefs(d: float, n_terms: int, second_order: bool = False) -> FracCoefs:
    """Compute pi / dpi (and optionally d2pi) in one call."""
    return FracCoefs(
        d=float(d),
        pi=pi_weights(d, n_terms),
        dpi=dpi_weights(d, n_terms),
        d2pi=d2pi_weights(d, n_terms) if second_order else None,
    )


# ---------------------------------------------------------------------------
# Closed forms.  Used as independent oracles in the test-suite; the digamma
# and trigamma expressions blow up as d -> 0 and must not be used in the
# filter itself.
# ---------------------------------------------------------------------------


def pi_weights_gamma_form(d: float, n_terms: int) -> np.ndarray:
    """pi_j = Gamma(j - d) / (Gamma(-d) Gamma(j + 1)) via log-gamma.

    Requires -d not to be a non-positive integer (d = 0, 1, 2, ... excluded).
    """
    _check_terms(n_terms)
    j = np.arange(1.0, n_terms + 1.0)
    sign = gammasgn(j - d) * gammasgn(-d)
    mag = gammaln(j - d) - gammaln(-d) - gammaln(j + 1.0)
    return sign * np.exp(mag)


def dpi_weights_digamma_form(d: float, n_terms: int) -> np.ndarray:
    """dpi_j = pi_j * (-psi(j - d) + psi(1 - d) + 1/d).  Singular at d = 0."""
    _check_terms(n_terms)
    if d == 0.0:
        raise ZeroDivisionError("digamma closed form is singular at d = 0")
    j = np.arange(1.0, n_terms + 1.0)
    return pi_weights(d, n_terms) * (-digamma(j - d) + digamma(1.0 - d) + 1.0 / d)


def d2pi_weights_trigamma_form(d: float, n_terms: int) -> np.ndarray:
    """Second derivative via digamma/trigamma.  Singular at d = 0."""
    _check_terms(n_terms)
    if d == 0.0:
        raise ZeroDivisionError("trigamma closed form is singular at d = 0")
    j = np.arange(1.0, n_terms + 1.0)
    pi = pi_weights(d, n_terms)
    dpi = dpi_weights(d, n_terms)
    a = -digamma(j - d) + digamma(1.0 - d) + 1.0 / d
    b = polygamma(1, j - d) - polygamma(1, 1.0 - d) - 1.0 / d**2
    return dpi * a + pi * b


def _check_terms(n_terms: int) -> None:
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
