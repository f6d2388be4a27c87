"""Bigram phrase detection: merge frequent token pairs into single tokens."""

from __future__ import annotations

from collections import Counter

from voltext.textprep.corpus import SentenceCorpus

GLUE = "_"


def bigram_score(pair_count: int, count_a: int, count_b: int, total: int, min_count: int) -> float:
    """(count(ab) - min_count) * total / (count(a) * count(b))."""
    return (pair_count - min_count) * total / (count_a * count_b)


def detect_bigrams(
    corpus: SentenceCorpus,
    min_count: int = 5,
    threshold: float = 10.0,
    max_vocab: int = 30_000_000,
    passes: int = 1,
) -> SentenceCorpus:
    """Merge consecutive token pairs scoring above threshold into "a_b" tokens.

    A single left-to-right pass per invocation; merged pairs do not overlap
    (after "a b" merges, "b c" cannot also merge at the same position).
    Extra passes (``passes`` > 1) produce trigrams and longer phrases.
    Afterwards the vocabulary is truncated to the ``max_vocab`` most frequent
    tokens and rarer tokens are dropped from the sentences.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    if threshold <= 0:
        raise ValueError("threshold must be > 0")

    result = corpus
    for _ in range(passes):
        result = _merge_pass(result, min_count, threshold)

    if len(result.token_counts) > max_vocab:
        keep = {tok for tok, _ in result.token_counts.most_common(max_vocab)}
        sentences = [[t for t in sent if t in keep] for sent in result.sentences]
        result = SentenceCorpus.from_sentences(sentences)
    return result


def _merge_pass(corpus: SentenceCorpus, min_count: int, threshold: float) -> SentenceCorpus:
    counts = corpus.token_counts
    total = corpus.total_tokens
    pair_counts: Counter = Counter()
    for sent in corpus.sentences:
        for a, b in zip(sent, sent[1:]):
            pair_counts[(a, b)] += 1

    merge = {
        pair
        for pair, pc in pair_counts.items()
        if bigram_score(pc, counts[pair[0]], counts[pair[1]], total, min_count) > threshold
    }
    if not merge:
        return corpus

    sentences = []
    for sent in corpus.sentences:
        out = []
        i = 0
        while i < len(sent):
            if i + 1 < len(sent) and (sent[i], sent[i + 1]) in merge:
                out.append(sent[i] + GLUE + sent[i + 1])
                i += 2
            else:
                out.append(sent[i])
                i += 1
        sentences.append(out)
    return SentenceCorpus.from_sentences(sentences)
