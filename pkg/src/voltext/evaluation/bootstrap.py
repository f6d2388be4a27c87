"""Stationary bootstrap and the reality-check test for forecast comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from voltext.errors import MisalignedSeries
from voltext.series import ForecastSeries, check_aligned
from voltext.evaluation.losses import DAILY_LOSS_FUNCTIONS


@dataclass(frozen=True)
class RealityCheckResult:
    statistic: float
    p_value: float
    n_bootstrap: int
    avg_block: float


def stationary_bootstrap_indices(n: int, avg_block: float, rng: np.random.Generator) -> np.ndarray:
    """One resample of [0, n): geometric block lengths with mean ``avg_block``,
    uniform start points, wrap-around at the series end."""
    return stationary_bootstrap_batch(n, avg_block, rng, 1)[0]


def stationary_bootstrap_batch(n: int, avg_block: float, rng: np.random.Generator, n_resamples: int) -> np.ndarray:
    """(n_resamples, n) index matrix, vectorized over resamples.

    Position t restarts a block with probability p = 1/avg_block (always at
    t = 0); otherwise it continues the previous index + 1 modulo n.
    """
    p = 1.0 / avg_block
    restart = rng.random((n_resamples, n)) < p
    restart[:, 0] = True
    starts = rng.integers(0, n, size=(n_resamples, n))
    t_idx = np.arange(n)
    # Index of the most recent restart at or before t, per position.
    last_restart = np.maximum.accumulate(np.where(restart, t_idx, 0), axis=1)
    start_at_restart = np.take_along_axis(starts, last_restart, axis=1)
    return (start_at_restart + (t_idx - last_restart)) % n


def reality_check(
    candidate: ForecastSeries,
    benchmarks: list[ForecastSeries],
    loss: str = "mse",
    n_boot: int = 999,
    avg_block: float = 5.0,
    day_subset: np.ndarray | None = None,
    seed: int = 0,
) -> RealityCheckResult:
    """Bootstrap reality check of the candidate against a benchmark set.

    The statistic is the minimum over benchmarks of the mean loss
    differential (benchmark minus candidate); rejection of the null means
    the candidate's loss is significantly smaller than every benchmark's.
    The bootstrap recenters each differential series and recomputes the
    min-statistic over stationary-bootstrap resamples; the p-value is the
    fraction of resampled statistics at or above the observed one.
    """
    if not benchmarks:
        raise ValueError("need at least one benchmark")
    check_aligned(candidate, *benchmarks)
    daily = DAILY_LOSS_FUNCTIONS[loss]
    cand_losses = daily(candidate)
    diffs = np.stack([daily(b) - cand_losses for b in benchmarks])  # (K, n)
    if day_subset is not None:
        diffs = diffs[:, day_subset]
    n = diffs.shape[1]
    if n == 0:
        raise MisalignedSeries("empty day subset")

    means = diffs.mean(axis=1)
    statistic = float(means.min())

    rng = np.random.Generator(np.random.PCG64(seed))
    idx = stationary_bootstrap_batch(n, avg_block, rng, n_boot)  # (B, n)
    centered = diffs - means[:, None]
    # (K, B): mean of each recentered differential over each resample.
    boot_means = centered[:, idx].mean(axis=2)
    boot_stats = boot_means.min(axis=0)
    p_value = float(np.mean(boot_stats >= statistic))
    return RealityCheckResult(statistic=statistic, p_value=p_value, n_bootstrap=n_boot, avg_block=avg_block)
