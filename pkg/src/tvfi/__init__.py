"""Fractionally integrated noise with a score-driven time-varying memory
parameter: simulation, filtering, estimation, density forecasting and
probabilistic forecast evaluation."""

from tvfi.fracdiff import (FracCoefs, d2pi_weights, dpi_weights, frac_coefs,
                           pi_weights)
from tvfi.filtering import (FilterDivergenceError, FilterOutput, StaticParams,
                            gas_filter, inv_link, link, link_slope, loglik,
                            score_and_scale)
from tvfi.simulate import DgpSpec, dt_path, simulate_tvfi
from tvfi.estimate import (FiFit, FitConfig, FitResult, fit_fi, fit_report,
                           fit_tvfi)
from tvfi.forecast import PredictiveDist, predict_multi_step, predict_one_step
from tvfi.scoring import (DMResult, ScoreSeries, crps_gaussian, crps_sample,
                          cumulative_score_diff, dm_test, log_score_gaussian)
from tvfi.harness import (EvalReport, MCStudySpec, MCStudyResult, RollingSpec,
                          centered_absolute_returns, run_mc_study,
                          run_rolling_eval)

__version__ = "0.1.0"

__all__ = [
    "FracCoefs", "pi_weights", "dpi_weights", "d2pi_weights", "frac_coefs",
    "StaticParams", "FilterOutput", "FilterDivergenceError", "link",
    "inv_link", "link_slope", "score_and_scale", "gas_filter", "loglik",
    "DgpSpec", "dt_path", "simulate_tvfi",
    "FitConfig", "FitResult", "FiFit", "fit_tvfi", "fit_fi", "fit_report",
    "PredictiveDist", "predict_one_step", "predict_multi_step",
    "ScoreSeries", "DMResult", "crps_gaussian", "crps_sample",
    "log_score_gaussian", "dm_test", "cumulative_score_diff",
    "MCStudySpec", "MCStudyResult", "RollingSpec", "EvalReport",
    "run_mc_study", "run_rolling_eval", "centered_absolute_returns",
    "__version__",
]
