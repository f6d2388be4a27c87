"""Forecast loss functions: MSE, QLIKE, and mean directional accuracy."""

from __future__ import annotations

import numpy as np

from voltext.errors import NonPositiveForecast, TooShortSeries
from voltext.series import ForecastSeries


def mse(series: ForecastSeries) -> float:
    return float(np.mean((series.forecast - series.actual) ** 2))


def qlike(series: ForecastSeries) -> float:
    """Mean of RV/forecast - log(RV/forecast) - 1; zero iff forecast = actual."""
    if np.any(series.forecast <= 0):
        raise NonPositiveForecast("QLIKE requires strictly positive forecasts")
    if np.any(series.actual <= 0):
        raise NonPositiveForecast("QLIKE requires strictly positive actuals")
    ratio = series.actual / series.forecast
    return float(np.mean(ratio - np.log(ratio) - 1.0))


def mse_daily(series: ForecastSeries) -> np.ndarray:
    return (series.forecast - series.actual) ** 2


def qlike_daily(series: ForecastSeries) -> np.ndarray:
    if np.any(series.forecast <= 0) or np.any(series.actual <= 0):
        raise NonPositiveForecast("QLIKE requires strictly positive values")
    ratio = series.actual / series.forecast
    return ratio - np.log(ratio) - 1.0


def mda(series: ForecastSeries) -> float:
    """Fraction of days whose forecast direction (vs the previous actual)
    matches the realized direction.

    Direction is sign(forecast_t - actual_{t-1}) against
    sign(actual_t - actual_{t-1}); a zero change counts as correct only when
    both sides are zero.
    """
    if len(series) < 2:
        raise TooShortSeries("MDA needs at least 2 days")
    prev = series.actual[:-1]
    pred_dir = np.sign(series.forecast[1:] - prev)
    real_dir = np.sign(series.actual[1:] - prev)
    return float(np.mean(pred_dir == real_dir))


LOSS_FUNCTIONS = {"mse": mse, "qlike": qlike, "mda": mda}
DAILY_LOSS_FUNCTIONS = {"mse": mse_daily, "qlike": qlike_daily}
