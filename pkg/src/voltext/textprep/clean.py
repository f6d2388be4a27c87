"""Text cleaning and tokenization for news headlines and bodies."""

from __future__ import annotations

import re

from voltext.errors import EmptyAfterClean, TooShort
from voltext.textprep.rules import CATEGORY_ORDER, Action, CleanRule

MIN_CLEAN_LENGTH = 25

_WHITESPACE = re.compile(r"\s+")
_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")
# Punctuation stripped from token boundaries; internal characters are kept so
# mnemonics ("u.s"), numbers ("4.2") and glued bigrams survive intact.
_EDGE_PUNCT = "\"'`()[]{}<>,;:!?.‘’“”"


def _apply_rule(text: str, rule: CleanRule) -> str:
    pat = rule.compiled()
    if rule.action is Action.DELETE:
        return pat.sub(" ", text)
    if rule.action is Action.REPLACE:
        return pat.sub(" ", text)
    m = pat.search(text)
    if m is None:
        return text
    if rule.action is Action.TRUNCATE_FROM:
        return text[: m.start()]
    # TRUNCATE_BEFORE: drop everything up to and including the match.
    return text[m.end():]


def clean_text(raw: str, rules: list[CleanRule], min_length: int = MIN_CLEAN_LENGTH) -> str:
    """Lowercase and scrub a raw news text through the rule catalogue.

    Categories run in the fixed order primary -> begins_with -> ends_with ->
    general -> final_checks; rules keep their declared order inside each
    category.  Raises ``TooShort`` when fewer than 25 characters survive and
    ``EmptyAfterClean`` when nothing does.
    """
    text = raw.lower()
    for category in CATEGORY_ORDER:
        for rule in rules:
            if rule.category == category:
                text = _apply_rule(text, rule)
    text = _WHITESPACE.sub(" ", text).strip()
    if not text:
        raise EmptyAfterClean("no text left after cleaning")
    if len(text) < min_length:
        raise TooShort(f"cleaned text has {len(text)} characters (< {min_length})")
    return text


def tokenize(cleaned: str) -> list[list[str]]:
    """Split cleaned text into sentences of tokens.

    Sentences break on terminal punctuation followed by whitespace; tokens
    split on whitespace with edge punctuation stripped.  Numeric tokens are
    kept verbatim apart from that edge stripping, so "$4.2m" stays one token.
    """
    if not cleaned.strip():
        return []
    sentences = []
    for chunk in _SENTENCE_SPLIT.split(cleaned):
        tokens = []
        for word in chunk.split():
            token = word.strip(_EDGE_PUNCT)
            if token:
                tokens.append(token)
        if tokens:
            sentences.append(tokens)
    return sentences
