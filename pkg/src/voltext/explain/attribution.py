"""Integrated Gradients and Shapley attribution for the CNN forecaster."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from voltext.errors import NonFiniteGradient, TooManyTokens
from voltext.nlpml.input import SentenceMatrix
from voltext.nlpml.model import CnnConfig, NlpModelParams, forward_batch, input_gradient_batch, resolve_batch

SHAPLEY_EXACT_CAP = 12


class Method(str, Enum):
    IG = "ig"
    SHAPLEY_EXACT = "shapley_exact"
    SHAPLEY_SAMPLED = "shapley_sampled"


class Quadrature(str, Enum):
    GAUSS_LEGENDRE = "gauss-legendre"
    RIEMANN = "riemann"


@dataclass(frozen=True)
class QuadratureSpec:
    method: Quadrature = Quadrature.GAUSS_LEGENDRE
    steps: int = 50
    batch: int = 100

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Interpolation points in (0, 1] and weights summing to 1."""
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.method is Quadrature.GAUSS_LEGENDRE:
            x, w = np.polynomial.legendre.leggauss(self.steps)
            return (x + 1.0) / 2.0, w / 2.0
        # Right-endpoint Riemann sum: k/m for k = 1..m, each weighted 1/m.
        k = np.arange(1, self.steps + 1)
        return k / self.steps, np.full(self.steps, 1.0 / self.steps)


@dataclass
class AttributionVector:
    """Per-slot scalar attributions aligned to the fixed-length input."""

    values: np.ndarray  # (max_len,)
    baseline_value: float
    method: Method
    tokens: list[str] = field(default_factory=list)
    std_errors: np.ndarray | None = None

    @property
    def total(self) -> float:
        return float(self.values.sum())


def integrated_gradients(
    params: NlpModelParams,
    cfg: CnnConfig,
    sm: SentenceMatrix,
    quad: QuadratureSpec = QuadratureSpec(),
) -> AttributionVector:
    """Path-integral attribution from the all-zero baseline to the input.

    Per-coordinate attribution is X_i times the quadrature-weighted average
    gradient along the straight-line path; per-token (per-slot) attribution
    sums that token's embedding coordinates.  Path points are evaluated in
    batches of ``quad.batch``.
    """
    X = resolve_batch([sm], params)[0]  # (L, M); baseline is zeros
    nodes, weights = quad.nodes_weights()
    avg_grad = np.zeros_like(X)
    for start in range(0, nodes.size, quad.batch):
        ts = nodes[start : start + quad.batch]
        ws = weights[start : start + quad.batch]
        batch = ts[:, None, None] * X[None, :, :]
        _, grads = input_gradient_batch(batch, params, cfg)
        if not np.isfinite(grads).all():
            raise NonFiniteGradient("non-finite gradient along the interpolation path")
        avg_grad += np.einsum("b,blm->lm", ws, grads)
    coord_attrib = X * avg_grad
    baseline_out, _ = forward_batch(np.zeros_like(X)[None], params, cfg)
    return AttributionVector(
        values=coord_attrib.sum(axis=1),
        baseline_value=float(baseline_out[0]),
        method=Method.IG,
        tokens=list(sm.tokens),
    )


def _coalition_forecasts(
    params: NlpModelParams,
    cfg: CnnConfig,
    base: np.ndarray,
    full: np.ndarray,
    masks: np.ndarray,
    n_tokens: int,
    eval_batch: int = 256,
) -> np.ndarray:
    """Model forecasts for coalition bitmasks over the first ``n_tokens`` rows.

    Rows of tokens outside the coalition are replaced by the baseline
    (padding) row.
    """
    out = np.empty(masks.size)
    member = ((masks[:, None] >> np.arange(n_tokens)) & 1).astype(bool)  # (C, n)
    for start in range(0, masks.size, eval_batch):
        sel = member[start : start + eval_batch]
        batch = np.repeat(base[None], sel.shape[0], axis=0)
        batch[:, :n_tokens][sel] = np.repeat(full[None, :n_tokens], sel.shape[0], axis=0)[sel]
        y, _ = forward_batch(batch, params, cfg)
        out[start : start + eval_batch] = y
    return out


def shapley_exact(
    params: NlpModelParams,
    cfg: CnnConfig,
    sm: SentenceMatrix,
    cap: int = SHAPLEY_EXACT_CAP,
) -> AttributionVector:
    """Exact Shapley values by full coalition enumeration (n <= cap tokens).

    f(S) is the forecast with tokens outside S replaced by the padding row;
    local accuracy (sum of values = f(all) - f(none)) holds to accumulation
    precision.
    """
    n = sm.n_real
    if n > cap:
        raise TooManyTokens(f"{n} tokens exceeds the exact-enumeration cap of {cap}")
    full = resolve_batch([sm], params)[0]
    base = full.copy()
    base[:n] = 0.0  # padding row is the zero embedding

    masks = np.arange(1 << n, dtype=np.int64)
    f = _coalition_forecasts(params, cfg, base, full, masks, n)

    # Precomputed coalition weights |S|! (n-|S|-1)! / n!
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n + 1)))]) if n else np.array([0.0])
    sizes = np.array([bin(m).count("1") for m in range(1 << n)])
    values = np.zeros(sm.pad_mask.size)
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        s = sizes[without]
        w = np.exp(log_fact[s] + log_fact[n - s - 1] - log_fact[n])
        values[i] = float(np.sum(w * (f[without | bit] - f[without])))
    return AttributionVector(
        values=values,
        baseline_value=float(f[0]),
        method=Method.SHAPLEY_EXACT,
        tokens=list(sm.tokens),
    )


def shapley_sampled(
    params: NlpModelParams,
    cfg: CnnConfig,
    sm: SentenceMatrix,
    n_permutations: int = 200,
    rng: np.random.Generator | None = None,
) -> AttributionVector:
    """Monte Carlo Shapley estimate over uniform random permutations.

    Each permutation contributes one marginal contribution per token; the
    reported standard error is the per-token sample std over permutations
    divided by sqrt(n_permutations).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    n = sm.n_real
    full = resolve_batch([sm], params)[0]
    base = full.copy()
    base[:n] = 0.0

    contribs = np.zeros((n_permutations, n))
    for p in range(n_permutations):
        order = rng.permutation(n)
        # Forecasts along the permutation's prefix chain, batched.
        chain = np.repeat(base[None], n + 1, axis=0)
        for pos, tok in enumerate(order):
            chain[pos + 1 :, tok] = full[tok]
        y, _ = forward_batch(chain, params, cfg)
        contribs[p, order] = np.diff(y)
    values = np.zeros(sm.pad_mask.size)
    ses = np.zeros(sm.pad_mask.size)
    values[:n] = contribs.mean(axis=0)
    if n_permutations > 1:
        ses[:n] = contribs.std(axis=0, ddof=1) / np.sqrt(n_permutations)
    baseline_out, _ = forward_batch(base[None], params, cfg)
    return AttributionVector(
        values=values,
        baseline_value=float(baseline_out[0]),
        method=Method.SHAPLEY_SAMPLED,
        tokens=list(sm.tokens),
        std_errors=ses,
    )
