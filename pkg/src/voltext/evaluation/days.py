"""Normal-day / jump-day classification of an evaluation sample."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DaySplit:
    normal_idx: np.ndarray
    jump_idx: np.ndarray
    threshold: float


def classify_days(actual: np.ndarray, quantile_sample: np.ndarray | None = None) -> DaySplit:
    """Split days at Q3 + 1.5*IQR of the RV sample (type-7 quantiles).

    Quantiles come from the full evaluation sample by default; pass
    ``quantile_sample`` (e.g. the training window) to use another basis.
    """
    actual = np.asarray(actual, dtype=float)
    basis = actual if quantile_sample is None else np.asarray(quantile_sample, dtype=float)
    q1, q3 = np.quantile(basis, [0.25, 0.75])
    threshold = q3 + 1.5 * (q3 - q1)
    jump = actual > threshold
    return DaySplit(
        normal_idx=np.flatnonzero(~jump),
        jump_idx=np.flatnonzero(jump),
        threshold=float(threshold),
    )
