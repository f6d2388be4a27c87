"""Embedding matrices and the negative-sampling gradient steps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from voltext.embedding.subword import SubwordIndex
from voltext.embedding.vocab import Vocabulary


@dataclass
class EmbeddingMatrix:
    """Input (target-side) and output (context-side) vector stores.

    For FastText the input matrix has extra rows for hashed n-gram buckets;
    the output matrix always has one row per vocabulary token.
    """

    input_vectors: np.ndarray
    output_vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    @classmethod
    def initialize(cls, n_input_rows: int, n_vocab: int, dim: int, rng: np.random.Generator) -> "EmbeddingMatrix":
        # Standard Word2Vec init: input uniform in [-0.5/M, 0.5/M), output zero.
        inp = (rng.random((n_input_rows, dim)) - 0.5) / dim
        out = np.zeros((n_vocab, dim))
        return cls(input_vectors=inp, output_vectors=out)

    def copy(self) -> "EmbeddingMatrix":
        return EmbeddingMatrix(self.input_vectors.copy(), self.output_vectors.copy())


def sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-x))


def negative_sample(
    vocab: Vocabulary,
    rng: np.random.Generator,
    k: int,
    exclude: int,
    ns_exponent: float = 0.75,
) -> np.ndarray:
    """Draw K indices i.i.d. from the counts**exponent distribution.

    Draws equal to ``exclude`` are redrawn so every sample is a true negative.
    """
    probs = vocab.sampling_distribution(ns_exponent)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    out = np.empty(k, dtype=np.int64)
    filled = 0
    while filled < k:
        draws = np.searchsorted(cdf, rng.random(k - filled), side="right")
        draws = draws[draws != exclude]
        out[filled : filled + draws.size] = draws
        filled += draws.size
        if len(vocab) == 1:
            # Degenerate vocabulary: the only token is always returned.
            out[:] = 0
            break
    return out


def sgns_loss(target_vec: np.ndarray, context_vec: np.ndarray, negative_vecs: np.ndarray) -> float:
    """Binary-logistic negative-sampling loss for one (target, context) pair."""
    pos = float(context_vec @ target_vec)
    neg = negative_vecs @ target_vec
    return float(-np.log(sigmoid(pos)) - np.log(sigmoid(-neg)).sum())


def sgns_pair_step(
    target: int,
    context: int,
    negatives: np.ndarray,
    mats: EmbeddingMatrix,
    alpha: float,
) -> EmbeddingMatrix:
    """One in-place SGD step on the SGNS loss; returns ``mats``.

    Only the target's input row and the context/negative output rows change.
    Duplicate negatives accumulate their gradients before the update.
    """
    u_tgt = mats.input_vectors[target]
    u_ctx = mats.output_vectors[context]
    u_neg = mats.output_vectors[negatives]

    g_pos = sigmoid(u_ctx @ u_tgt) - 1.0
    g_neg = sigmoid(u_neg @ u_tgt)

    grad_tgt = g_pos * u_ctx + g_neg @ u_neg
    mats.output_vectors[context] -= alpha * g_pos * u_tgt
    np.subtract.at(mats.output_vectors, negatives, alpha * np.outer(g_neg, u_tgt))
    mats.input_vectors[target] -= alpha * grad_tgt
    return mats


def cbow_loss(context_vecs: np.ndarray, target_vec: np.ndarray, negative_vecs: np.ndarray) -> float:
    """CBOW negative-sampling loss: target scored against the context mean."""
    h = context_vecs.mean(axis=0)
    pos = float(target_vec @ h)
    neg = negative_vecs @ h
    return float(-np.log(sigmoid(pos)) - np.log(sigmoid(-neg)).sum())


def cbow_step(
    context_window: np.ndarray,
    target: int,
    negatives: np.ndarray,
    mats: EmbeddingMatrix,
    alpha: float,
) -> EmbeddingMatrix:
    """One in-place SGD step on the CBOW loss; returns ``mats``.

    The context mean plays the input-side role; its gradient is split over
    the context rows (1/C each, the exact gradient of the mean).  An empty
    context window is a no-op.
    """
    context_window = np.asarray(context_window)
    if context_window.size == 0:
        return mats
    h = mats.input_vectors[context_window].mean(axis=0)
    u_tgt = mats.output_vectors[target]
    u_neg = mats.output_vectors[negatives]

    g_pos = sigmoid(u_tgt @ h) - 1.0
    g_neg = sigmoid(u_neg @ h)

    grad_h = g_pos * u_tgt + g_neg @ u_neg
    mats.output_vectors[target] -= alpha * g_pos * h
    np.subtract.at(mats.output_vectors, negatives, alpha * np.outer(g_neg, h))
    np.subtract.at(
        mats.input_vectors,
        context_window,
        alpha * grad_h / context_window.size,
    )
    return mats


def fasttext_vector(token: str, vocab: Vocabulary, idx: SubwordIndex, mats: EmbeddingMatrix) -> np.ndarray:
    """Token vector as the sum of its subword rows (plus its own row in-vocab)."""
    if token in vocab:
        rows = idx.token_rows(vocab.index[token])
    else:
        rows = idx.oov_rows(token)
    return mats.input_vectors[rows].sum(axis=0)


def softmax_probabilities(mats: EmbeddingMatrix, query_vec: np.ndarray, n_vocab: int) -> np.ndarray:
    """Full-softmax distribution over the vocabulary given an input-side vector.

    Tiny-vocabulary testing mode only; training itself uses negative sampling.
    """
    scores = mats.output_vectors[:n_vocab] @ query_vec
    scores -= scores.max()
    e = np.exp(scores)
    return e / e.sum()
