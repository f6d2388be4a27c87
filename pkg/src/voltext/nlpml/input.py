"""Fixed-length daily token inputs for the CNN forecaster."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from voltext.errors import NoSubwords, TokenNotFound
from voltext.embedding.train import TrainedEmbedding

MAX_LEN = 500
PAD_TOKEN = "NONE"


@dataclass
class SentenceMatrix:
    """A day's tokens as a fixed-length embedded matrix.

    Real tokens occupy the leading rows; the rest is padding (the literal
    `NONE` token, embedded as a zero row).  Days with no news carry the
    ``no_news`` flag; the model substitutes its trainable no-news vector
    into row 0 at forward time.
    """

    tokens: list[str]
    token_ids: np.ndarray  # int32, -1 for padding and OOV rows
    pad_mask: np.ndarray  # True where padding
    resolved: np.ndarray  # (max_len, M)
    no_news: bool = False

    @property
    def n_real(self) -> int:
        return int((~self.pad_mask).sum())


def build_day_input(
    tokens: list[str],
    embedding: TrainedEmbedding,
    max_len: int = MAX_LEN,
) -> SentenceMatrix:
    """Embed the first ``max_len`` tokens of a day; pad the remainder.

    Word2Vec OOV tokens map to a fixed zero row; FastText resolves them
    through subword n-grams.  A day with zero tokens yields the no-news
    input (flag set, model fills row 0 with its trainable vector).
    """
    dim = embedding.dim
    kept = tokens[:max_len]
    resolved = np.zeros((max_len, dim))
    ids = np.full(max_len, -1, dtype=np.int32)
    mask = np.ones(max_len, dtype=bool)
    for i, tok in enumerate(kept):
        mask[i] = False
        idx = embedding.vocab.index.get(tok)
        if idx is not None:
            ids[i] = idx
        try:
            resolved[i] = embedding.vector(tok)
        except (TokenNotFound, NoSubwords):
            pass  # OOV: inert zero row
    return SentenceMatrix(
        tokens=kept,
        token_ids=ids,
        pad_mask=mask,
        resolved=resolved,
        no_news=len(kept) == 0,
    )


def multi_day_input(
    days: list[list[str]],
    embedding: TrainedEmbedding,
    n_days: int = 1,
    max_len: int = MAX_LEN,
) -> SentenceMatrix:
    """Concatenate the last ``n_days`` of headlines, newest day first, then
    truncate/pad to ``max_len``.

    Truncation keeps the head of the concatenation, so overflow drops the
    oldest tokens.
    """
    window = days[-n_days:] if n_days > 0 else []
    tokens = [tok for day in reversed(window) for tok in day]
    return build_day_input(tokens, embedding, max_len)
