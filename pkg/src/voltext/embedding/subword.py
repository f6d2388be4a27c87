"""Character n-gram subword index for FastText-style embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from voltext.errors import NoSubwords
from voltext.embedding.vocab import Vocabulary

BOUNDARY_START = "<"
BOUNDARY_END = ">"


def char_ngrams(token: str, ngram_min: int, ngram_max: int) -> list[str]:
    """Boundary-wrapped character n-grams, excluding the full wrapped token."""
    wrapped = BOUNDARY_START + token + BOUNDARY_END
    grams = []
    for n in range(ngram_min, ngram_max + 1):
        if n >= len(wrapped):
            break
        for i in range(len(wrapped) - n + 1):
            grams.append(wrapped[i : i + n])
    return grams


def hash_ngram(gram: str, buckets: int) -> int:
    """FNV-1a hash of the n-gram, reduced modulo the bucket count."""
    h = 2166136261
    for byte in gram.encode("utf-8"):
        h ^= byte
        h = (h * 16777619) & 0xFFFFFFFF
    return h % buckets


@dataclass
class SubwordIndex:
    """Maps each vocabulary token to its embedding row ids.

    Row layout: rows [0, n_vocab) hold whole-token vectors, rows
    [n_vocab, n_vocab + buckets) hold hashed n-gram buckets.  Each in-vocab
    token's row list contains its own whole-token row plus its n-gram rows.
    """

    n_vocab: int
    buckets: int
    ngram_min: int
    ngram_max: int
    row_ids: np.ndarray  # int32, flattened per-token row lists
    offsets: np.ndarray  # int64, len n_vocab + 1

    @classmethod
    def build(cls, vocab: Vocabulary, ngram_min: int, ngram_max: int, buckets: int) -> "SubwordIndex":
        rows: list[int] = []
        offsets = [0]
        n = len(vocab)
        for i, token in enumerate(vocab.tokens):
            rows.append(i)
            for gram in char_ngrams(token, ngram_min, ngram_max):
                rows.append(n + hash_ngram(gram, buckets))
            offsets.append(len(rows))
        return cls(
            n_vocab=n,
            buckets=buckets,
            ngram_min=ngram_min,
            ngram_max=ngram_max,
            row_ids=np.array(rows, dtype=np.int32),
            offsets=np.array(offsets, dtype=np.int64),
        )

    def token_rows(self, token_id: int) -> np.ndarray:
        return self.row_ids[self.offsets[token_id] : self.offsets[token_id + 1]]

    def oov_rows(self, token: str) -> np.ndarray:
        """N-gram rows for a token not in the vocabulary."""
        grams = char_ngrams(token, self.ngram_min, self.ngram_max)
        if not grams:
            raise NoSubwords(f"token {token!r} too short for n-grams >= {self.ngram_min}")
        return np.array([self.n_vocab + hash_ngram(g, self.buckets) for g in grams], dtype=np.int32)
