"""Aligned actual/forecast series shared by the forecasting and scoring modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np
import pandas as pd

from voltext.errors import MisalignedSeries


@dataclass
class ForecastSeries:
    ticker: str
    dates: list[date]
    actual: np.ndarray
    forecast: np.ndarray
    model_id: str = ""

    def __post_init__(self) -> None:
        self.actual = np.asarray(self.actual, dtype=float)
        self.forecast = np.asarray(self.forecast, dtype=float)
        if not (len(self.dates) == self.actual.size == self.forecast.size):
            raise MisalignedSeries(
                f"lengths differ: {len(self.dates)} dates, {self.actual.size} actual, {self.forecast.size} forecast"
            )

    def __len__(self) -> int:
        return len(self.dates)

    def subset(self, idx: np.ndarray) -> "ForecastSeries":
        return ForecastSeries(
            ticker=self.ticker,
            dates=[self.dates[i] for i in np.atleast_1d(idx)],
            actual=self.actual[idx],
            forecast=self.forecast[idx],
            model_id=self.model_id,
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "date": self.dates,
                "actual_rv": self.actual,
                "forecast_rv": self.forecast,
                "model_id": self.model_id,
                "ticker": self.ticker,
            }
        )

    def save(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def load(cls, path: str | Path) -> "ForecastSeries":
        df = pd.read_csv(path, parse_dates=["date"])
        return cls(
            ticker=str(df["ticker"].iloc[0]) if "ticker" in df and len(df) else "",
            dates=[d.date() for d in df["date"]],
            actual=df["actual_rv"].to_numpy(),
            forecast=df["forecast_rv"].to_numpy(),
            model_id=str(df["model_id"].iloc[0]) if "model_id" in df and len(df) else "",
        )


def check_aligned(*series: ForecastSeries) -> None:
    """Raise MisalignedSeries unless all series share the same dates."""
    ref = series[0].dates
    for s in series[1:]:
        if s.dates != ref:
            raise MisalignedSeries(f"{s.model_id or 'series'} dates differ from {series[0].model_id or 'reference'}")
