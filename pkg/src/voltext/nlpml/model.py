"""The CNN-over-headlines forecaster: numpy forward/backward and Adam.

The network follows the text-CNN layout: multi-width valid convolutions with
ReLU, global max pooling per feature map, dropout on the pooled vector, and a
ReLU dense output that keeps forecasts non-negative.  Gradients are written
by hand so they can be verified against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from voltext.errors import KernelTooLarge, ShapeMismatch
from voltext.nlpml.input import MAX_LEN, SentenceMatrix


@dataclass
class AdamHyper:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class CnnConfig:
    filter_widths: tuple[int, ...] = (3, 4, 5)
    filters: int = 3  # feature maps per width
    dropout_rate: float = 0.5
    l2_decay: float = 3.0
    adam: AdamHyper = field(default_factory=AdamHyper)
    seed: int = 1
    retrain_every: int = 5
    embedding_trainable: bool = False
    input_days: int = 1
    max_len: int = MAX_LEN
    epochs: int = 20
    batch_size: int = 32
    early_stop_tol: float = 1e-6
    early_stop_patience: int = 3

    def validate(self, dim: int) -> None:
        for h in self.filter_widths:
            if h > self.max_len:
                raise KernelTooLarge(f"filter width {h} exceeds input length {self.max_len}")
        if dim < 1:
            raise ShapeMismatch("embedding dimension must be positive")


class NlpModelParams:
    """Trainable tensors, stored in a name-keyed dict for optimizer plumbing.

    Keys: ``conv_w_<h>`` (h, M, F), ``conv_b_<h>`` (F,), ``dense_w`` (P,),
    ``dense_b`` (), ``no_news`` (M,) with P = n_widths * F.
    """

    def __init__(self, arrays: dict[str, np.ndarray], widths: tuple[int, ...], dim: int):
        self.arrays = arrays
        self.widths = widths
        self.dim = dim

    @classmethod
    def initialize(cls, cfg: CnnConfig, dim: int, rng: np.random.Generator) -> "NlpModelParams":
        cfg.validate(dim)
        arrays: dict[str, np.ndarray] = {}
        for h in cfg.filter_widths:
            scale = np.sqrt(2.0 / (h * dim))
            arrays[f"conv_w_{h}"] = rng.normal(0.0, scale, size=(h, dim, cfg.filters))
            arrays[f"conv_b_{h}"] = np.zeros(cfg.filters)
        pooled = len(cfg.filter_widths) * cfg.filters
        arrays["dense_w"] = rng.normal(0.0, np.sqrt(2.0 / pooled), size=pooled)
        arrays["dense_b"] = np.zeros(())
        arrays["no_news"] = rng.normal(0.0, 0.1, size=dim)
        return cls(arrays, cfg.filter_widths, dim)

    def copy(self) -> "NlpModelParams":
        return NlpModelParams({k: v.copy() for k, v in self.arrays.items()}, self.widths, self.dim)

    def n_parameters(self) -> int:
        return sum(int(np.prod(v.shape)) for v in self.arrays.values())

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.arrays.items()}


def resolve_batch(inputs: list[SentenceMatrix], params: NlpModelParams) -> np.ndarray:
    """Stack resolved matrices, substituting the no-news vector on empty days."""
    X = np.stack([sm.resolved for sm in inputs]).astype(float)
    for b, sm in enumerate(inputs):
        if sm.no_news:
            X[b, 0] = params.arrays["no_news"]
    return X


def conv_valid(resolved: np.ndarray, kernel: np.ndarray, bias: float | np.ndarray) -> np.ndarray:
    """Valid stride-1 convolution with ReLU over one input matrix.

    ``resolved`` is (L, M), ``kernel`` (h, M) or (h, M, F); the feature map
    has length L - h + 1.
    """
    L, M = resolved.shape
    single = kernel.ndim == 2
    K = kernel[:, :, None] if single else kernel
    h = K.shape[0]
    if h > L:
        raise KernelTooLarge(f"kernel height {h} exceeds input length {L}")
    if K.shape[1] != M:
        raise ShapeMismatch(f"kernel width {K.shape[1]} != embedding dim {M}")
    out_len = L - h + 1
    pre = np.zeros((out_len, K.shape[2]))
    for j in range(h):
        pre += resolved[j : j + out_len] @ K[j]
    pre += np.asarray(bias)
    fmap = np.maximum(pre, 0.0)
    return fmap[:, 0] if single else fmap


def forward_batch(
    X: np.ndarray,
    params: NlpModelParams,
    cfg: CnnConfig,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, dict]:
    """Forward pass over a batch (B, L, M) -> non-negative forecasts (B,).

    Returns a cache for the backward pass.  Dropout (inverted scaling) only
    runs in train mode; evaluation is deterministic.
    """
    if X.ndim != 3 or X.shape[2] != params.dim:
        raise ShapeMismatch(f"expected (B, L, {params.dim}) input, got {X.shape}")
    B, L, _ = X.shape
    cache: dict = {"X": X, "pre": {}, "argmax": {}}
    pooled_parts = []
    for h in cfg.filter_widths:
        K = params.arrays[f"conv_w_{h}"]
        if h > L:
            raise KernelTooLarge(f"filter width {h} exceeds input length {L}")
        out_len = L - h + 1
        pre = np.zeros((B, out_len, cfg.filters))
        for j in range(h):
            pre += X[:, j : j + out_len, :] @ K[j]
        pre += params.arrays[f"conv_b_{h}"]
        fmap = np.maximum(pre, 0.0)
        amax = fmap.argmax(axis=1)  # (B, F)
        pooled_parts.append(np.take_along_axis(fmap, amax[:, None, :], axis=1)[:, 0, :])
        cache["pre"][h] = pre
        cache["argmax"][h] = amax
    z = np.concatenate(pooled_parts, axis=1)  # (B, P)

    if train_mode and cfg.dropout_rate > 0.0:
        if rng is None:
            raise ValueError("train-mode forward needs an rng for dropout")
        keep = 1.0 - cfg.dropout_rate
        mask = (rng.random(z.shape) < keep) / keep
    else:
        mask = np.ones_like(z)
    z_drop = z * mask

    dense_pre = z_drop @ params.arrays["dense_w"] + params.arrays["dense_b"]
    y = np.maximum(dense_pre, 0.0)
    cache.update(z=z, mask=mask, z_drop=z_drop, dense_pre=dense_pre, y=y)
    return y, cache


def forward(
    sm: SentenceMatrix,
    params: NlpModelParams,
    cfg: CnnConfig,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[float, dict]:
    """Single-sample forward; see ``forward_batch``."""
    X = resolve_batch([sm], params)
    y, cache = forward_batch(X, params, cfg, train_mode=train_mode, rng=rng)
    cache["inputs"] = [sm]
    return float(y[0]), cache


def loss_batch(y: np.ndarray, targets: np.ndarray, params: NlpModelParams, cfg: CnnConfig) -> float:
    """Mean squared error plus the L2 weight penalty (weights only, no biases)."""
    mse = float(np.mean((y - targets) ** 2))
    reg = sum(float(np.sum(params.arrays[k] ** 2)) for k in params.arrays if k.startswith("conv_w"))
    reg += float(np.sum(params.arrays["dense_w"] ** 2))
    return mse + cfg.l2_decay * reg


def backward_batch(
    cache: dict,
    targets: np.ndarray,
    params: NlpModelParams,
    cfg: CnnConfig,
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Gradients of ``loss_batch`` for every trainable tensor.

    Also returns the gradient with respect to the resolved input X (used for
    attribution, the no-news vector, and trainable-embedding updates).
    """
    X = cache["X"]
    B, L, _ = X.shape
    y = cache["y"]
    grads = params.zeros_like()

    dy = 2.0 * (y - targets) / B
    dpre_dense = dy * (cache["dense_pre"] > 0)
    grads["dense_w"] = cache["z_drop"].T @ dpre_dense + 2.0 * cfg.l2_decay * params.arrays["dense_w"]
    grads["dense_b"] = np.asarray(dpre_dense.sum())
    dz = np.outer(dpre_dense, params.arrays["dense_w"]) * cache["mask"]

    dX = np.zeros_like(X)
    offset = 0
    for h in cfg.filter_widths:
        K = params.arrays[f"conv_w_{h}"]
        pre = cache["pre"][h]
        amax = cache["argmax"][h]
        out_len = pre.shape[1]
        dpooled = dz[:, offset : offset + cfg.filters]
        offset += cfg.filters

        # Route the pooled gradient to the argmax positions, through ReLU.
        dfmap_at_max = dpooled * (np.take_along_axis(pre, amax[:, None, :], axis=1)[:, 0, :] > 0)
        dpre = np.zeros_like(pre)
        np.put_along_axis(dpre, amax[:, None, :], dfmap_at_max[:, None, :], axis=1)

        grads[f"conv_b_{h}"] = dpre.sum(axis=(0, 1))
        dK = np.zeros_like(K)
        for j in range(h):
            window = X[:, j : j + out_len, :]
            dK[j] = np.einsum("blm,blf->mf", window, dpre)
            dX[:, j : j + out_len, :] += dpre @ K[j].T
        grads[f"conv_w_{h}"] = dK + 2.0 * cfg.l2_decay * K

    inputs = cache.get("inputs")
    if inputs is not None:
        for b, sm in enumerate(inputs):
            if sm.no_news:
                grads["no_news"] += dX[b, 0]
    return grads, dX


def input_gradient(sm: SentenceMatrix, params: NlpModelParams, cfg: CnnConfig) -> np.ndarray:
    """d forecast / d resolved-input for one sample, evaluation mode."""
    X = resolve_batch([sm], params)
    return input_gradient_batch(X, params, cfg)[1]


def input_gradient_batch(X: np.ndarray, params: NlpModelParams, cfg: CnnConfig) -> tuple[np.ndarray, np.ndarray]:
    """Forecasts and d forecast / dX for a batch of resolved inputs.

    Differentiates the raw model output (no loss, no regularization).
    """
    y, cache = forward_batch(X, params, cfg, train_mode=False)
    B = X.shape[0]
    dout = (cache["dense_pre"] > 0).astype(float)  # dy/d dense_pre per sample
    dz = np.outer(dout, params.arrays["dense_w"])
    dX = np.zeros_like(X)
    offset = 0
    for h in cfg.filter_widths:
        K = params.arrays[f"conv_w_{h}"]
        pre = cache["pre"][h]
        amax = cache["argmax"][h]
        out_len = pre.shape[1]
        dpooled = dz[:, offset : offset + cfg.filters]
        offset += cfg.filters
        dfmap_at_max = dpooled * (np.take_along_axis(pre, amax[:, None, :], axis=1)[:, 0, :] > 0)
        dpre = np.zeros_like(pre)
        np.put_along_axis(dpre, amax[:, None, :], dfmap_at_max[:, None, :], axis=1)
        for j in range(h):
            dX[:, j : j + out_len, :] += dpre @ K[j].T
    return y, dX


def adam_step(
    params: NlpModelParams,
    grads: dict[str, np.ndarray],
    state: dict,
    hyper: AdamHyper,
) -> None:
    """Standard Adam update with bias correction, in place."""
    if not state:
        state["t"] = 0
        state["m"] = params.zeros_like()
        state["v"] = params.zeros_like()
    state["t"] += 1
    t = state["t"]
    for key, g in grads.items():
        m = state["m"][key]
        v = state["v"][key]
        m *= hyper.beta1
        m += (1 - hyper.beta1) * g
        v *= hyper.beta2
        v += (1 - hyper.beta2) * np.square(g)
        m_hat = m / (1 - hyper.beta1**t)
        v_hat = v / (1 - hyper.beta2**t)
        params.arrays[key] -= hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.eps)
