"""Cross-ticker loss aggregates and the ensemble forecast."""

from __future__ import annotations

import numpy as np

from voltext.errors import MisalignedSeries
from voltext.series import ForecastSeries, check_aligned
from voltext.evaluation.losses import LOSS_FUNCTIONS


def delta_aggregate(
    models: list[ForecastSeries],
    benchmarks: list[ForecastSeries],
    loss: str = "mse",
) -> tuple[float, float]:
    """(average, median) per-ticker loss difference model - benchmark.

    Negative values mean improvement for MSE/QLIKE; positive for MDA.
    ``models[i]`` and ``benchmarks[i]`` must cover the same ticker and days.
    """
    if len(models) != len(benchmarks):
        raise MisalignedSeries("need one benchmark series per model series")
    fn = LOSS_FUNCTIONS[loss]
    diffs = []
    for m, b in zip(models, benchmarks):
        check_aligned(m, b)
        diffs.append(fn(m) - fn(b))
    diffs = np.array(diffs)
    return float(diffs.mean()), float(np.median(diffs))


def ensemble_mean(a: ForecastSeries, b: ForecastSeries) -> ForecastSeries:
    """Element-wise arithmetic mean of two forecast series, aligned by date."""
    check_aligned(a, b)
    return ForecastSeries(
        ticker=a.ticker,
        dates=list(a.dates),
        actual=a.actual.copy(),
        forecast=(a.forecast + b.forecast) / 2.0,
        model_id=f"ensemble({a.model_id},{b.model_id})",
    )
