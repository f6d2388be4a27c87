"""Rolling retraining schedule for the CNN forecaster."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from voltext.errors import InsufficientHistory
from voltext.series import ForecastSeries
from voltext.volatility.har import RollingProtocol, insanity_filter
from voltext.nlpml.input import SentenceMatrix
from voltext.nlpml.model import (
    CnnConfig,
    NlpModelParams,
    adam_step,
    backward_batch,
    forward_batch,
    loss_batch,
    resolve_batch,
)


@dataclass
class TrainedEvent:
    """A model trained at one retraining event, with its training-window RVs."""

    params: NlpModelParams
    train_rvs: np.ndarray
    step: int


def train_model(
    inputs: list[SentenceMatrix],
    targets: np.ndarray,
    cfg: CnnConfig,
    dim: int,
    embedding_matrix: np.ndarray | None = None,
) -> NlpModelParams:
    """Train one model from scratch on (inputs, targets) with minibatch Adam.

    The same seed re-initializes parameters, shuffling, and dropout at every
    call, so retraining events are reproducible.  When ``embedding_matrix``
    is given and the config marks the embedding trainable, input-row
    gradients are applied to it in place.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    params = NlpModelParams.initialize(cfg, dim, rng)
    state: dict = {}
    n = len(inputs)
    best_loss = np.inf
    patience = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            batch_idx = order[start : start + cfg.batch_size]
            batch = [inputs[i] for i in batch_idx]
            X = resolve_batch(batch, params)
            y, cache = forward_batch(X, params, cfg, train_mode=True, rng=rng)
            cache["inputs"] = batch
            t = targets[batch_idx]
            epoch_loss += loss_batch(y, t, params, cfg) * len(batch_idx)
            grads, dX = backward_batch(cache, t, params, cfg)
            adam_step(params, grads, state, cfg.adam)
            if cfg.embedding_trainable and embedding_matrix is not None:
                _apply_embedding_grads(batch, dX, embedding_matrix, cfg.adam.lr)
        epoch_loss /= n
        if best_loss - epoch_loss < cfg.early_stop_tol:
            patience += 1
            if patience >= cfg.early_stop_patience:
                break
        else:
            patience = 0
        best_loss = min(best_loss, epoch_loss)
    return params


def _apply_embedding_grads(
    batch: list[SentenceMatrix],
    dX: np.ndarray,
    embedding_matrix: np.ndarray,
    lr: float,
) -> None:
    # Plain SGD on embedding rows; rows are shared across samples so
    # gradients accumulate through repeated subtraction.
    for b, sm in enumerate(batch):
        real = ~sm.pad_mask
        ids = sm.token_ids[real]
        valid = ids >= 0
        np.subtract.at(embedding_matrix, ids[valid], lr * dX[b, : real.sum()][valid])
        refreshed = sm.resolved[real]
        refreshed[valid] = embedding_matrix[ids[valid]]
        sm.resolved[real] = refreshed


def retrain_steps(oos_len: int, retrain_every: int) -> list[int]:
    """Out-of-sample steps at which a new model is trained (0, r, 2r, ...)."""
    return list(range(0, oos_len, retrain_every))


def train_rolling(
    daily_inputs: list[SentenceMatrix],
    rv_series: np.ndarray,
    cfg: CnnConfig,
    protocol: RollingProtocol,
    dates: list[date] | None = None,
    ticker: str = "",
    model_id: str = "nlpml",
    embedding_matrix: np.ndarray | None = None,
) -> ForecastSeries:
    """Rolling forecasts with periodic retraining and the insanity filter.

    ``daily_inputs[t]`` holds day t's news; its target is ``rv_series[t+1]``.
    A fresh model is trained every ``cfg.retrain_every`` out-of-sample days
    on the trailing ``protocol.train_len`` target days; intervening days use
    the last trained model.
    """
    rv_series = np.asarray(rv_series, dtype=float)
    n = rv_series.size
    if len(daily_inputs) != n:
        raise InsufficientHistory("inputs and RV series must be aligned")
    if n < protocol.train_len + protocol.oos_len + 1:
        raise InsufficientHistory(
            f"need {protocol.train_len + protocol.oos_len + 1} days, have {n}"
        )

    events = set(retrain_steps(protocol.oos_len, cfg.retrain_every))
    current: TrainedEvent | None = None
    out_dates, actual, forecast = [], [], []
    for step, d in enumerate(range(n - protocol.oos_len, n)):
        if step in events:
            target_idx = np.arange(d - protocol.train_len, d)
            train_inputs = [daily_inputs[t - 1] for t in target_idx]
            current = TrainedEvent(
                params=train_model(
                    train_inputs,
                    rv_series[target_idx],
                    cfg,
                    daily_inputs[0].resolved.shape[1],
                    embedding_matrix=embedding_matrix,
                ),
                train_rvs=rv_series[target_idx],
                step=step,
            )
        assert current is not None
        X = resolve_batch([daily_inputs[d - 1]], current.params)
        y, _ = forward_batch(X, current.params, cfg, train_mode=False)
        pred = insanity_filter(float(y[0]), current.train_rvs)
        out_dates.append(dates[d] if dates is not None else date.fromordinal(730000 + d))
        actual.append(rv_series[d])
        forecast.append(pred)

    return ForecastSeries(
        ticker=ticker,
        dates=out_dates,
        actual=np.array(actual),
        forecast=np.array(forecast),
        model_id=model_id,
    )
