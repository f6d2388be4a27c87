from voltext.series import ForecastSeries, check_aligned
from voltext.evaluation.bootstrap import (
    RealityCheckResult,
    reality_check,
    stationary_bootstrap_batch,
    stationary_bootstrap_indices,
)
from voltext.evaluation.compare import delta_aggregate, ensemble_mean
from voltext.evaluation.days import DaySplit, classify_days
from voltext.evaluation.losses import mda, mse, mse_daily, qlike, qlike_daily

__all__ = [
    "DaySplit",
    "ForecastSeries",
    "RealityCheckResult",
    "check_aligned",
    "classify_days",
    "delta_aggregate",
    "ensemble_mean",
    "mda",
    "mse",
    "mse_daily",
    "qlike",
    "qlike_daily",
    "reality_check",
    "stationary_bootstrap_batch",
    "stationary_bootstrap_indices",
]
