"""Probabilistic forecast scoring and forecast comparison tests.

CRPS conventions follow Gneiting & Raftery (2007): lower is better.  The
Gaussian closed form is

    crps = sd * ( z (2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi) ),   z = (obs - mean)/sd,

and the sample version uses the energy form

    crps = mean |X - obs| - 0.5 mean |X - X'|,

computed from the order statistics in O(k log k).

Model comparison uses the Diebold-Mariano statistic on a score-difference
series with a Bartlett-weighted HAC long-run variance,

    sigma2_hat = gamma_0 + 2 sum_{j=1}^{J} (1 - j/J) gamma_j,   J = floor(l^(1/4)),

and reports the one-sided lower-tail p-value Phi(statistic), so negative
statistics favor the first model.  Identically zero differences yield the
degenerate result (statistic 0, p 0.5) rather than a division by zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm


@dataclass
class ScoreSeries:
    """Per-origin scores of one model at one horizon."""

    model_label: str
    horizon: int
    scores: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        if self.scores.ndim != 1:
            raise ValueError("scores must be one-dimensional")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("scores contain non-finite values")


@dataclass
class DMResult:
    statistic: float
    p_value: float
    hac_variance: float
    truncation_lags: int
    degenerate: bool


def crps_gaussian(mean: float, sd: float, obs: float) -> float:
    """CRPS of a Gaussian predictive against one observation."""
    if not sd > 0.0:
        raise ValueError(f"sd must be positive, got {sd}")
    z = (obs - mean) / sd
    return sd * (z * (2.0 * norm.cdf(z) - 1.0) + 2.0 * norm.pdf(z) - 1.0 / math.sqrt(math.pi))


def crps_sample(draws: np.ndarray, obs: float) -> float:
    """CRPS of an empirical predictive sample against one observation."""
    x = np.sort(np.asarray(draws, dtype=float))
    k = x.shape[0]
    if k == 0:
        raise ValueError("draws must be non-empty")
    term1 = float(np.mean(np.abs(x - obs)))
    # 0.5 * mean |X - X'| over all ordered pairs, from the order statistics
    i = np.arange(1, k + 1)
    term2 = float(np.sum(x * (2.0 * i - 1.0 - k))) / (k * k)
    return term1 - term2


def log_score_gaussian(mean: float, sd: float, obs: float) -> float:
    """Negative Gaussian log density.  Reported as a diagnostic only; model
    ranking in the evaluation harness is by CRPS."""
    if not sd > 0.0:
        raise ValueError(f"sd must be positive, got {sd}")
    z = (obs - mean) / sd
    return 0.5 * math.log(2.0 * math.pi * sd * sd) + 0.5 * z * z


def dm_test(scores_a: ScoreSeries, scores_b: ScoreSeries) -> DMResult:
    """Diebold-Mariano comparison of two score series (first minus second)."""
    if scores_a.horizon != scores_b.horizon:
        raise ValueError(
            f"horizon mismatch: {scores_a.horizon} vs {scores_b.horizon}")
    da, db = scores_a.scores, scores_b.scores
    if da.shape[0] != db.shape[0]:
        raise ValueError(f"length mismatch: {da.shape[0]} vs {db.shape[0]}")
    l = da.shape[0]
    if l < 10:
        raise ValueError(f"need at least 10 scores, got {l}")

    diff = da - db
    trunc = int(math.floor(l ** 0.25))
    centered = diff - np.mean(diff)
    gamma0 = float(centered @ centered) / l
    hac = gamma0
    for j in range(1, trunc + 1):
        cov_j = float(centered[j:] @ centered[:-j]) / l
        hac += 2.0 * (1.0 - j / trunc) * cov_j

    if hac <= 0.0 or not math.isfinite(hac) or hac < 1e-300:
        return DMResult(statistic=0.0, p_value=0.5, hac_variance=0.0,
                        truncation_lags=trunc, degenerate=True)

    stat = math.sqrt(l) * float(np.mean(diff)) / math.sqrt(hac)
    return DMResult(statistic=stat, p_value=float(norm.cdf(stat)),
                    hac_variance=hac, truncation_lags=trunc, degenerate=False)


def cumulative_score_diff(baseline: ScoreSeries, challenger: ScoreSeries) -> np.ndarray:
    """Running sum of (baseline - challenger) scores; upward drift means the
    challenger is accumulating an advantage."""
    if baseline.scores.shape[0] != challenger.scores.shape[0]:
        raise ValueError("score series must have equal length")
    return np.cumsum(baseline.scores - challenger.scores)
