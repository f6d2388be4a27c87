"""Synthetic desk-scale data: prices with volatility jumps and a token-model
news feed with planted jump-precursor signals."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta

import numpy as np
import pandas as pd

from voltext.textprep.corpus import EASTERN, RawNewsItem
from voltext.volatility.measures import DailyVolRecord, IntradayDay, daily_record


@dataclass
class SynthSpec:
    n_days: int = 500
    intraday_m: int = 78  # 5-minute bins over a 6.5h session
    base_vol: float = 1.0  # daily return std in percent
    vol_persistence: float = 0.9
    vol_noise: float = 0.2
    jump_intensity: float = 0.05  # per-day jump probability
    jump_size: float = 6.0  # variance multiplier on jump days
    headlines_per_day: float = 3.0
    vocab: tuple[str, ...] = tuple(f"word{i}" for i in range(50))
    signal_token: str = "blowup"
    p_signal: float = 0.9
    ticker: str = "SYN"
    start_date: date = date(2010, 1, 4)
    seed: int = 0


@dataclass
class SynthData:
    spec: SynthSpec
    dates: list[date]
    records: list[DailyVolRecord]
    jump_labels: np.ndarray  # bool per day
    news: list[RawNewsItem]
    prices: pd.DataFrame  # timestamp, price
    daily_tokens: list[list[str]] = field(default_factory=list)

    def labels_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"date": self.dates, "jump": self.jump_labels})


def _business_days(start: date, n: int) -> list[date]:
    days = []
    d = start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return days


def generate_synthetic(spec: SynthSpec) -> SynthData:
    """Generate aligned prices, realized measures, news, and jump labels.

    Daily variance follows a log-AR(1) process; jump days multiply the
    variance by ``jump_size``.  With probability ``p_signal`` the signal
    token appears in headlines during the news window preceding each jump
    day's session (day t's window for a jump on day t+1).
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    dates = _business_days(spec.start_date, spec.n_days)

    # Latent daily variance and jump labels.
    log_var = np.zeros(spec.n_days)
    base = 2.0 * np.log(spec.base_vol) if spec.base_vol > 0 else 0.0
    x = 0.0
    for t in range(spec.n_days):
        x = spec.vol_persistence * x + spec.vol_noise * rng.standard_normal()
        log_var[t] = base + x
    jumps = rng.random(spec.n_days) < spec.jump_intensity
    variance = np.exp(log_var) * np.where(jumps, spec.jump_size, 1.0)

    # Intraday returns and the price path (returns are in percent).
    m = spec.intraday_m
    records = []
    price_rows = []
    log_price = np.log(100.0)
    session = np.linspace(0, 1, m + 1)
    for t, d in enumerate(dates):
        rets = rng.standard_normal(m) * np.sqrt(variance[t] / m)
        records.append(daily_record(IntradayDay(date=d, returns=rets)))
        open_dt = datetime.combine(d, time(9, 30), tzinfo=EASTERN)
        for i in range(m + 1):
            ts = open_dt + timedelta(minutes=390 * session[i])
            price_rows.append((ts, np.exp(log_price)))
            if i < m:
                log_price += rets[i] / 100.0
    prices = pd.DataFrame(price_rows, columns=["timestamp", "price"])

    # News: headlines per day from a Poisson model over the vocabulary;
    # the signal token is planted in the window before each jump day.
    vocab = np.array(spec.vocab)
    news: list[RawNewsItem] = []
    daily_tokens: list[list[str]] = []
    item_id = 0
    for t, d in enumerate(dates):
        window_start = datetime.combine(d, time(9, 30), tzinfo=EASTERN)
        n_heads = int(rng.poisson(spec.headlines_per_day))
        tokens_today: list[str] = []
        headlines = []
        for _ in range(n_heads):
            words = list(rng.choice(vocab, size=int(rng.integers(4, 9))))
            headlines.append(words)
        next_is_jump = t + 1 < spec.n_days and jumps[t + 1]
        if next_is_jump and rng.random() < spec.p_signal:
            if not headlines:
                headlines.append(list(rng.choice(vocab, size=4)))
            slot = int(rng.integers(0, len(headlines)))
            headlines[slot].insert(0, spec.signal_token)
        for words in headlines:
            ts = window_start + timedelta(minutes=float(rng.uniform(0, 1430)))
            news.append(
                RawNewsItem(
                    id=f"syn-{item_id}",
                    timestamp=ts,
                    headline=" ".join(words),
                    body="",
                    tags=frozenset({f"about:{spec.ticker.lower()}"}),
                )
            )
            item_id += 1
            tokens_today.extend(words)
        daily_tokens.append(tokens_today)
    news.sort(key=lambda it: (it.timestamp, it.id))

    return SynthData(
        spec=spec,
        dates=dates,
        records=records,
        jump_labels=jumps,
        news=news,
        prices=prices,
        daily_tokens=daily_tokens,
    )


def generator_self_test(data: SynthData, alpha: float = 0.01) -> bool:
    """RV on labeled jump days must stochastically dominate normal days."""
    from scipy import stats

    rv = np.array([r.rv for r in data.records])
    jump_rv = rv[data.jump_labels]
    normal_rv = rv[~data.jump_labels]
    if jump_rv.size == 0 or normal_rv.size == 0:
        return data.spec.jump_intensity == 0.0
    stat = stats.mannwhitneyu(jump_rv, normal_rv, alternative="greater")
    return bool(stat.pvalue < alpha)
