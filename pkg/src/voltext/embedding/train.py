"""Corpus-level embedding training (Skip-gram / CBOW, Word2Vec / FastText).

The inner loop is a numba kernel over the flattened corpus.  With a fixed
seed it is bit-deterministic: the kernel is single-threaded and uses the
global numpy legacy RNG, seeded once at entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from voltext.errors import NoSubwords, TokenNotFound
from voltext.embedding.model import EmbeddingMatrix, fasttext_vector
from voltext.embedding.subword import SubwordIndex
from voltext.embedding.vocab import Algo, Mode, TrainConfig, Vocabulary, build_vocab
from voltext.textprep.corpus import SentenceCorpus

NEG_TABLE_SIZE = 1 << 22


@dataclass
class TrainedEmbedding:
    """A trained embedding bundle: vocabulary, matrices, optional subwords."""

    vocab: Vocabulary
    mats: EmbeddingMatrix
    cfg: TrainConfig
    subwords: SubwordIndex | None = None

    def __post_init__(self) -> None:
        self._token_matrix: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.mats.dim

    def vector(self, token: str) -> np.ndarray:
        """Input-side vector for a token; FastText resolves OOV via n-grams."""
        if self.subwords is not None:
            return fasttext_vector(token, self.vocab, self.subwords, self.mats)
        try:
            return self.mats.input_vectors[self.vocab.index[token]]
        except KeyError:
            raise TokenNotFound(f"token {token!r} not in the vocabulary list") from None

    def resolvable(self, token: str) -> bool:
        try:
            self.vector(token)
            return True
        except (TokenNotFound, NoSubwords):
            return False

    def token_matrix(self) -> np.ndarray:
        """Per-vocabulary-token vectors (subword sums for FastText), cached."""
        if self._token_matrix is None:
            if self.subwords is None:
                self._token_matrix = self.mats.input_vectors[: len(self.vocab)]
            else:
                mat = np.empty((len(self.vocab), self.dim), dtype=self.mats.input_vectors.dtype)
                for i in range(len(self.vocab)):
                    rows = self.subwords.token_rows(i)
                    mat[i] = self.mats.input_vectors[rows].sum(axis=0)
                self._token_matrix = mat
        return self._token_matrix


def corpus_to_ids(corpus: SentenceCorpus, vocab: Vocabulary) -> tuple[np.ndarray, np.ndarray]:
    """Flatten the corpus into vocab ids plus sentence offsets, dropping OOV."""
    ids: list[int] = []
    offsets = [0]
    index = vocab.index
    for sent in corpus.sentences:
        kept = [index[t] for t in sent if t in index]
        if kept:
            ids.extend(kept)
            offsets.append(len(ids))
    return np.array(ids, dtype=np.int32), np.array(offsets, dtype=np.int64)


def build_negative_table(vocab: Vocabulary, ns_exponent: float, size: int = NEG_TABLE_SIZE) -> np.ndarray:
    probs = vocab.sampling_distribution(ns_exponent)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, (np.arange(size) + 0.5) / size, side="right").astype(np.int32)


def _identity_subwords(n_vocab: int) -> tuple[np.ndarray, np.ndarray]:
    """Word2Vec degenerate subword layout: each token maps to its own row."""
    return np.arange(n_vocab, dtype=np.int32), np.arange(n_vocab + 1, dtype=np.int64)


@njit(cache=True)
def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@njit(cache=True)
def _train_kernel(
    token_ids,
    sent_offsets,
    sub_rows,
    sub_offsets,
    inp,
    out,
    neg_table,
    window,
    n_negative,
    epochs,
    alpha0,
    alpha_min,
    seed,
    cbow_mode,
):
    np.random.seed(seed)
    dim = inp.shape[1]
    table_size = neg_table.shape[0]
    total = token_ids.shape[0] * epochs
    processed = 0

    tvec = np.zeros(dim)
    gacc = np.zeros(dim)

    for _ in range(epochs):
        for s in range(sent_offsets.shape[0] - 1):
            start = sent_offsets[s]
            end = sent_offsets[s + 1]
            for i in range(start, end):
                alpha = alpha0 * (1.0 - processed / total)
                if alpha < alpha_min:
                    alpha = alpha_min
                processed += 1
                radius = 1 + np.random.randint(window)
                lo = i - radius
                if lo < start:
                    lo = start
                hi = i + radius + 1
                if hi > end:
                    hi = end
                center = token_ids[i]

                if cbow_mode:
                    # Context mean predicts the center token.
                    n_ctx = 0
                    for m in range(dim):
                        tvec[m] = 0.0
                    for j in range(lo, hi):
                        if j == i:
                            continue
                        ctx = token_ids[j]
                        for r in range(sub_offsets[ctx], sub_offsets[ctx + 1]):
                            row = sub_rows[r]
                            for m in range(dim):
                                tvec[m] += inp[row, m]
                        n_ctx += 1
                    if n_ctx == 0:
                        continue
                    for m in range(dim):
                        tvec[m] /= n_ctx
                    for m in range(dim):
                        gacc[m] = 0.0
                    _pair_update(out, neg_table, table_size, center, n_negative, alpha, tvec, gacc, dim)
                    scale = alpha / n_ctx
                    for j in range(lo, hi):
                        if j == i:
                            continue
                        ctx = token_ids[j]
                        for r in range(sub_offsets[ctx], sub_offsets[ctx + 1]):
                            row = sub_rows[r]
                            for m in range(dim):
                                inp[row, m] -= scale * gacc[m]
                else:
                    # Skip-gram: center token predicts each context token.
                    for m in range(dim):
                        tvec[m] = 0.0
                    for r in range(sub_offsets[center], sub_offsets[center + 1]):
                        row = sub_rows[r]
                        for m in range(dim):
                            tvec[m] += inp[row, m]
                    for j in range(lo, hi):
                        if j == i:
                            continue
                        ctx = token_ids[j]
                        for m in range(dim):
                            gacc[m] = 0.0
                        _pair_update(out, neg_table, table_size, ctx, n_negative, alpha, tvec, gacc, dim)
                        for r in range(sub_offsets[center], sub_offsets[center + 1]):
                            row = sub_rows[r]
                            for m in range(dim):
                                inp[row, m] -= alpha * gacc[m]
                        # Refresh the summed target vector after the update.
                        for m in range(dim):
                            tvec[m] -= (sub_offsets[center + 1] - sub_offsets[center]) * alpha * gacc[m]


@njit(cache=True)
def _pair_update(out, neg_table, table_size, positive, n_negative, alpha, tvec, gacc, dim):
    """Positive + K negative logistic updates against output rows.

    Accumulates the input-side gradient into ``gacc`` and updates the output
    rows in place.
    """
    dot = 0.0
    for m in range(dim):
        dot += out[positive, m] * tvec[m]
    g = _sigmoid(dot) - 1.0
    for m in range(dim):
        gacc[m] += g * out[positive, m]
        out[positive, m] -= alpha * g * tvec[m]
    for _ in range(n_negative):
        neg = neg_table[np.random.randint(table_size)]
        attempts = 0
        while neg == positive and attempts < 64:
            neg = neg_table[np.random.randint(table_size)]
            attempts += 1
        if neg == positive:
            continue
        dot = 0.0
        for m in range(dim):
            dot += out[neg, m] * tvec[m]
        g = _sigmoid(dot)
        for m in range(dim):
            gacc[m] += g * out[neg, m]
            out[neg, m] -= alpha * g * tvec[m]


def subsample_corpus(ids: np.ndarray, offsets: np.ndarray, vocab: Vocabulary, t: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Frequent-token subsampling with keep probability min(1, sqrt(t/f) + t/f)."""
    freq = vocab.counts / vocab.total_tokens
    keep_prob = np.minimum(1.0, np.sqrt(t / freq) + t / freq)
    keep = rng.random(ids.shape[0]) < keep_prob[ids]
    new_ids: list[int] = []
    new_offsets = [0]
    for s in range(offsets.shape[0] - 1):
        kept = ids[offsets[s] : offsets[s + 1]][keep[offsets[s] : offsets[s + 1]]]
        if kept.size:
            new_ids.extend(kept.tolist())
            new_offsets.append(len(new_ids))
    return np.array(new_ids, dtype=np.int32), np.array(new_offsets, dtype=np.int64)


def train(corpus: SentenceCorpus, cfg: TrainConfig) -> TrainedEmbedding:
    """Train an embedding over the corpus per the configuration.

    Fixed seed, single logical worker: output is bit-reproducible.
    """
    vocab = build_vocab(corpus, cfg)
    ids, offsets = corpus_to_ids(corpus, vocab)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    if cfg.subsample > 0.0:
        ids, offsets = subsample_corpus(ids, offsets, vocab, cfg.subsample, rng)

    subwords = None
    n_input_rows = len(vocab)
    if cfg.algo is Algo.FASTTEXT:
        subwords = SubwordIndex.build(vocab, cfg.ngram_min, cfg.ngram_max, cfg.subword_buckets)
        n_input_rows = len(vocab) + cfg.subword_buckets
        sub_rows, sub_offsets = subwords.row_ids, subwords.offsets
    else:
        sub_rows, sub_offsets = _identity_subwords(len(vocab))

    mats = EmbeddingMatrix.initialize(n_input_rows, len(vocab), cfg.dim, rng)
    if cfg.epochs > 0 and ids.size > 0:
        table = build_negative_table(vocab, cfg.ns_exponent)
        _train_kernel(
            ids,
            offsets,
            sub_rows,
            sub_offsets,
            mats.input_vectors,
            mats.output_vectors,
            table,
            cfg.window,
            cfg.negatives,
            cfg.epochs,
            cfg.alpha0,
            cfg.alpha_min,
            cfg.seed,
            cfg.mode is Mode.CBOW,
        )
    return TrainedEmbedding(vocab=vocab, mats=mats, cfg=cfg, subwords=subwords)
