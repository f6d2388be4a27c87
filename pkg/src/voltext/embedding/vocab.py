"""Vocabulary construction and training configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from voltext.errors import EmptyVocabulary
from voltext.textprep.corpus import SentenceCorpus


class Mode(str, Enum):
    SKIP_GRAM = "skipgram"
    CBOW = "cbow"


class Algo(str, Enum):
    WORD2VEC = "word2vec"
    FASTTEXT = "fasttext"


@dataclass
class TrainConfig:
    mode: Mode = Mode.SKIP_GRAM
    algo: Algo = Algo.WORD2VEC
    window: int = 5
    min_count: int = 5
    negatives: int = 5
    epochs: int = 5
    alpha0: float = 0.025
    alpha_min: float = 0.0001
    ns_exponent: float = 0.75
    dim: int = 300
    max_vocab: int = 30_000_000
    ngram_min: int = 3
    ngram_max: int = 6
    subword_buckets: int = 2**21
    subsample: float = 0.0
    seed: int = 1


@dataclass
class Vocabulary:
    tokens: list[str]
    counts: np.ndarray  # int64, aligned with tokens

    def __post_init__(self) -> None:
        self.index = {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    @property
    def total_tokens(self) -> int:
        return int(self.counts.sum())

    def sampling_distribution(self, exponent: float = 0.75) -> np.ndarray:
        """Unigram distribution raised to ``exponent`` and renormalized."""
        weights = self.counts.astype(np.float64) ** exponent
        return weights / weights.sum()


def build_vocab(corpus: SentenceCorpus, cfg: TrainConfig) -> Vocabulary:
    """Retain tokens with count >= min_count, most frequent first.

    Ties order by first occurrence in the corpus, so indices are
    deterministic across runs.
    """
    first_seen: dict[str, int] = {}
    pos = 0
    for sent in corpus.sentences:
        for tok in sent:
            if tok not in first_seen:
                first_seen[tok] = pos
            pos += 1
    items = [
        (tok, cnt)
        for tok, cnt in corpus.token_counts.items()
        if cnt >= cfg.min_count
    ]
    items.sort(key=lambda tc: (-tc[1], first_seen[tc[0]]))
    items = items[: cfg.max_vocab]
    if not items:
        raise EmptyVocabulary(f"no token reaches min_count={cfg.min_count}")
    tokens = [tok for tok, _ in items]
    counts = np.array([cnt for _, cnt in items], dtype=np.int64)
    return Vocabulary(tokens=tokens, counts=counts)
