"""Shared fixtures and hand-built model helpers."""

from __future__ import annotations

import numpy as np
import pytest

from voltext.embedding.model import EmbeddingMatrix
from voltext.embedding.train import TrainedEmbedding
from voltext.embedding.vocab import TrainConfig, Vocabulary
from voltext.nlpml.model import CnnConfig, NlpModelParams


def make_embedding(tokens: list[str], vectors: np.ndarray, counts=None) -> TrainedEmbedding:
    """A Word2Vec-style embedding with explicitly chosen vectors."""
    vectors = np.asarray(vectors, dtype=float)
    if counts is None:
        counts = np.full(len(tokens), 10, dtype=np.int64)
    vocab = Vocabulary(tokens=list(tokens), counts=np.asarray(counts, dtype=np.int64))
    mats = EmbeddingMatrix(input_vectors=vectors.copy(), output_vectors=np.zeros_like(vectors))
    return TrainedEmbedding(vocab=vocab, mats=mats, cfg=TrainConfig(dim=vectors.shape[1]))


def toy_cnn(dim: int = 4, max_len: int = 12, filters: int = 2, seed: int = 0,
            widths: tuple[int, ...] = (2, 3)) -> tuple[NlpModelParams, CnnConfig]:
    """A small randomly-initialized CNN for oracle and gradient tests."""
    cfg = CnnConfig(filter_widths=widths, filters=filters, max_len=max_len,
                    dropout_rate=0.0, l2_decay=0.0, seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    params = NlpModelParams.initialize(cfg, dim, rng)
    # A positive dense bias keeps the output off the final ReLU kink.
    params.arrays["dense_b"] = np.array(1.0)
    return params, cfg


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
