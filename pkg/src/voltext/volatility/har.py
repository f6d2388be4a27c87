"""HAR-family forecasters: feature construction, OLS, rolling forecasts."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from voltext.errors import DegenerateDesign, InsufficientHistory
from voltext.series import ForecastSeries
from voltext.volatility.measures import DailyVolRecord


class HARFamily(str, Enum):
    AR1 = "ar1"
    HAR = "har"
    HARJ = "harj"
    CHAR = "char"
    SHAR = "shar"
    ARQ = "arq"
    HARQ = "harq"
    HARQF = "harqf"


@dataclass(frozen=True)
class HARSpec:
    family: HARFamily = HARFamily.CHAR
    lags: tuple[int, int, int] = (1, 7, 21)


@dataclass(frozen=True)
class RollingProtocol:
    train_len: int = 2046
    oos_len: int = 300
    retrain_every: int = 1  # HAR models refit daily; the CNN uses 5


def _trailing_mean(values: np.ndarray, t: int, lag: int) -> float:
    """Mean of values[t-lag+1 .. t] (simple trailing mean including day t)."""
    return float(values[t - lag + 1 : t + 1].mean())


def build_har_features(history: list[DailyVolRecord], spec: HARSpec, t: int) -> np.ndarray:
    """Regressors at day index ``t`` for forecasting RV at ``t+1``.

    Requires at least ``max(lags)`` records up to and including t.
    """
    lag_d, lag_w, lag_m = spec.lags
    if t + 1 < lag_m:
        raise InsufficientHistory(f"need {lag_m} records, have {t + 1}")
    rv = np.array([r.rv for r in history])
    fam = spec.family

    if fam is HARFamily.AR1:
        return np.array([rv[t]])

    rv_d = _trailing_mean(rv, t, lag_d)
    rv_w = _trailing_mean(rv, t, lag_w)
    rv_m = _trailing_mean(rv, t, lag_m)

    if fam is HARFamily.HAR:
        return np.array([rv_d, rv_w, rv_m])
    if fam is HARFamily.HARJ:
        return np.array([rv_d, rv_w, rv_m, history[t].jump])
    if fam is HARFamily.CHAR:
        bpv = np.array([r.bpv for r in history])
        return np.array(
            [_trailing_mean(bpv, t, lag_d), _trailing_mean(bpv, t, lag_w), _trailing_mean(bpv, t, lag_m)]
        )
    if fam is HARFamily.SHAR:
        return np.array([history[t].rv_pos, history[t].rv_neg, rv_w, rv_m])

    rq = np.array([r.rq for r in history])
    rq_d = _trailing_mean(rq, t, lag_d)
    if fam is HARFamily.ARQ:
        return np.array([rv_d, np.sqrt(rq_d) * rv_d])
    if fam is HARFamily.HARQ:
        return np.array([rv_d, rv_w, rv_m, np.sqrt(rq_d) * rv_d])
    # HARQ-F: quarticity interaction on all three horizons.
    rq_w = _trailing_mean(rq, t, lag_w)
    rq_m = _trailing_mean(rq, t, lag_m)
    return np.array(
        [rv_d, rv_w, rv_m, np.sqrt(rq_d) * rv_d, np.sqrt(rq_w) * rv_w, np.sqrt(rq_m) * rv_m]
    )


def ols_fit(X: np.ndarray, y: np.ndarray, strict: bool = False) -> np.ndarray:
    """Least-squares coefficients; rank-deficient designs get the minimum-norm
    solution.  ``strict`` rejects all-zero columns instead."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < X.shape[1]:
        raise DegenerateDesign(f"{X.shape[0]} rows < {X.shape[1]} columns")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite design or targets")
    if strict and np.any(~X.any(axis=0)):
        raise DegenerateDesign("all-zero column in design matrix")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef


def _with_intercept(X: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(X.shape[0]), X])


def insanity_filter(forecast: float, train_rvs: np.ndarray) -> float:
    """Replace forecasts outside the training RV range with the training mean."""
    train_rvs = np.asarray(train_rvs, dtype=float)
    if forecast > train_rvs.max() or forecast < train_rvs.min():
        return float(train_rvs.mean())
    return float(forecast)


def rolling_forecast(
    records: list[DailyVolRecord],
    spec: HARSpec,
    protocol: RollingProtocol,
    ticker: str = "",
    apply_insanity: bool = True,
) -> ForecastSeries:
    """One-step-ahead rolling-window forecasts for the last ``oos_len`` days.

    Each out-of-sample day refits on the trailing ``train_len`` target days,
    forecasts one step ahead, and advances one day.
    """
    n = len(records)
    lag_m = spec.lags[2]
    needed = protocol.train_len + protocol.oos_len + lag_m
    if n < needed:
        raise InsufficientHistory(f"need {needed} records, have {n}")

    rv = np.array([r.rv for r in records])
    feats = {}

    def features_at(t: int) -> np.ndarray:
        if t not in feats:
            feats[t] = build_har_features(records, spec, t)
        return feats[t]

    dates, actual, forecast = [], [], []
    coef = None
    for step, d in enumerate(range(n - protocol.oos_len, n)):
        target_idx = np.arange(d - protocol.train_len, d)
        if coef is None or step % protocol.retrain_every == 0:
            X = _with_intercept(np.stack([features_at(t - 1) for t in target_idx]))
            coef = ols_fit(X, rv[target_idx])
        pred = float(np.concatenate([[1.0], features_at(d - 1)]) @ coef)
        if apply_insanity:
            pred = insanity_filter(pred, rv[target_idx])
        dates.append(records[d].date)
        actual.append(rv[d])
        forecast.append(pred)

    return ForecastSeries(
        ticker=ticker,
        dates=dates,
        actual=np.array(actual),
        forecast=np.array(forecast),
        model_id=spec.family.value,
    )
