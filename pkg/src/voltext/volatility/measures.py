"""Realized measures from intraday returns: RV, BPV, jumps, semivariance, RQ."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, time
from pathlib import Path

import numpy as np
import pandas as pd

from voltext.errors import TooFewReturns

SESSION_OPEN = time(9, 30)
SESSION_CLOSE = time(16, 0)

# mu_1 = sqrt(2/pi) = E|Z| for standard normal Z; 1/mu_1^2 = pi/2.
MU1_SQ = 2.0 / np.pi


@dataclass(frozen=True)
class IntradayDay:
    date: date
    returns: np.ndarray  # intraday log-returns within the session

    def __post_init__(self) -> None:
        object.__setattr__(self, "returns", np.asarray(self.returns, dtype=float))
        if not np.isfinite(self.returns).all():
            raise ValueError("returns must be finite")


@dataclass(frozen=True)
class DailyVolRecord:
    date: date
    rv: float
    bpv: float
    jump: float
    rv_pos: float
    rv_neg: float
    rq: float


def compute_rv(day: IntradayDay) -> float:
    """Sum of squared intraday returns."""
    return float(np.square(day.returns).sum())


def compute_bpv(day: IntradayDay) -> float:
    """Bipower variation: (pi/2) * sum |r_i||r_{i+1}|, jump-robust."""
    r = day.returns
    if r.size < 2:
        raise TooFewReturns(f"bipower variation needs >= 2 returns, got {r.size}")
    return float(np.abs(r[:-1] * r[1:]).sum() / MU1_SQ)


def compute_semivariance(day: IntradayDay) -> tuple[float, float]:
    """(rv_pos, rv_neg): squared returns split by sign; zeros count in neither."""
    r = day.returns
    rv_pos = float(np.square(r[r > 0]).sum())
    rv_neg = float(np.square(r[r < 0]).sum())
    return rv_pos, rv_neg


def compute_rq(day: IntradayDay) -> float:
    """Realized quarticity: (M/3) * sum r^4."""
    r = day.returns
    return float(r.size / 3.0 * np.power(r, 4).sum())


def daily_record(day: IntradayDay) -> DailyVolRecord:
    """All realized measures for one day; jump = max(rv - bpv, 0)."""
    rv = compute_rv(day)
    bpv = compute_bpv(day)
    rv_pos, rv_neg = compute_semivariance(day)
    return DailyVolRecord(
        date=day.date,
        rv=rv,
        bpv=bpv,
        jump=max(rv - bpv, 0.0),
        rv_pos=rv_pos,
        rv_neg=rv_neg,
        rq=compute_rq(day),
    )


def days_from_prices(
    prices: pd.DataFrame,
    scale: float = 100.0,
    session_open: time = SESSION_OPEN,
    session_close: time = SESSION_CLOSE,
    resample: str | None = "5min",
) -> list[IntradayDay]:
    """Build per-day return series from a `timestamp,price` frame.

    Prices are filtered to the trading session, optionally resampled to a
    fixed grid (last price per bin), and turned into log-returns scaled by
    ``scale`` (returns in percent by default, so RV is in squared percent).
    """
    df = prices.copy()
    try:
        ts = pd.to_datetime(df["timestamp"])
    except ValueError:
        # Mixed UTC offsets (e.g. a DST boundary): parse as UTC, then bring
        # back to exchange wall-clock time for session filtering.
        ts = pd.to_datetime(df["timestamp"], utc=True).dt.tz_convert("America/New_York")
    if getattr(ts.dt, "tz", None) is not None:
        ts = ts.dt.tz_convert("America/New_York").dt.tz_localize(None)
    df["timestamp"] = ts
    df = df.set_index("timestamp").sort_index()
    df = df.between_time(session_open, session_close)
    days = []
    for day, grp in df.groupby(df.index.date):
        px = grp["price"]
        if resample:
            px = px.resample(resample).last().dropna()
        if len(px) < 3:
            continue
        rets = scale * np.diff(np.log(px.to_numpy(dtype=float)))
        days.append(IntradayDay(date=day, returns=rets))
    return days


def records_to_frame(records: list[DailyVolRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "date": [r.date for r in records],
            "rv": [r.rv for r in records],
            "bpv": [r.bpv for r in records],
            "jump": [r.jump for r in records],
            "rv_pos": [r.rv_pos for r in records],
            "rv_neg": [r.rv_neg for r in records],
            "rq": [r.rq for r in records],
        }
    )


def save_records(records: list[DailyVolRecord], path: str | Path) -> None:
    records_to_frame(records).to_csv(path, index=False)


def load_records(path: str | Path) -> list[DailyVolRecord]:
    df = pd.read_csv(path, parse_dates=["date"])
    return [
        DailyVolRecord(
            date=row.date.date() if hasattr(row.date, "date") else row.date,
            rv=float(row.rv),
            bpv=float(row.bpv),
            jump=float(row.jump),
            rv_pos=float(row.rv_pos),
            rv_neg=float(row.rv_neg),
            rq=float(row.rq),
        )
        for row in df.itertuples()
    ]
