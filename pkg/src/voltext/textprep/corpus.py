"""News corpus records, sentence corpora, and daily headline aggregation."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

from voltext.errors import EmptyAfterClean, FormatError, TooShort
from voltext.textprep.clean import clean_text, tokenize
from voltext.textprep.rules import CleanRule

EASTERN = ZoneInfo("America/New_York")
SESSION_CUTOFF = time(9, 30)


@dataclass(frozen=True)
class RawNewsItem:
    id: str
    timestamp: datetime
    headline: str
    body: str
    tags: frozenset[str]

    @classmethod
    def from_json(cls, line: str) -> "RawNewsItem":
        try:
            obj = json.loads(line)
            ts = datetime.fromisoformat(obj["timestamp"])
            return cls(
                id=str(obj["id"]),
                timestamp=ts,
                headline=obj.get("headline", ""),
                body=obj.get("body", ""),
                tags=frozenset(t.lower() for t in obj.get("tags", [])),
            )
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise FormatError(f"bad news record: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "timestamp": self.timestamp.isoformat(),
                "headline": self.headline,
                "body": self.body,
                "tags": sorted(self.tags),
            }
        )


def read_news(path: str | Path) -> list[RawNewsItem]:
    """Read a line-delimited news corpus, sorted by timestamp."""
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                items.append(RawNewsItem.from_json(line))
    items.sort(key=lambda it: (it.timestamp, it.id))
    return items


def write_news(items: list[RawNewsItem], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(item.to_json() + "\n")


@dataclass
class SentenceCorpus:
    sentences: list[list[str]] = field(default_factory=list)
    token_counts: Counter = field(default_factory=Counter)

    @classmethod
    def from_sentences(cls, sentences: list[list[str]]) -> "SentenceCorpus":
        kept = [s for s in sentences if s]
        counts = Counter(tok for sent in kept for tok in sent)
        return cls(sentences=kept, token_counts=counts)

    @property
    def total_tokens(self) -> int:
        return sum(self.token_counts.values())

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for sent in self.sentences:
                fh.write(" ".join(sent) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SentenceCorpus":
        sentences = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                tokens = line.split()
                if tokens:
                    sentences.append(tokens)
        return cls.from_sentences(sentences)


def build_corpus(items: list[RawNewsItem], rules: list[CleanRule], include_body: bool = True) -> SentenceCorpus:
    """Clean and tokenize a news corpus for embedding training.

    Headlines and bodies are cleaned separately; items rejected as too short
    or empty are skipped.
    """
    sentences: list[list[str]] = []
    for item in items:
        texts = [item.headline, item.body] if include_body else [item.headline]
        for raw in texts:
            if not raw:
                continue
            try:
                cleaned = clean_text(raw, rules)
            except (TooShort, EmptyAfterClean):
                continue
            sentences.extend(tokenize(cleaned))
    return SentenceCorpus.from_sentences(sentences)


def news_day_window(day: date, cutoff: time = SESSION_CUTOFF, tz: ZoneInfo = EASTERN) -> tuple[datetime, datetime]:
    """The [day 09:30 ET, day+1 09:30 ET) window that day's headlines come from."""
    start = datetime.combine(day, cutoff, tzinfo=tz)
    end = datetime.combine(day + timedelta(days=1), cutoff, tzinfo=tz)
    return start, end


def aggregate_daily_headlines(
    items: list[RawNewsItem],
    ticker_tag: str,
    day: date,
    cutoff: time = SESSION_CUTOFF,
    tz: ZoneInfo = EASTERN,
    rules: list[CleanRule] | None = None,
    extra_tags: frozenset[str] = frozenset(),
) -> list[str]:
    """Tokens of all matching headlines in day's news window, timestamp order.

    Only headlines are used; bodies are ignored.  The 25-character length
    gate is bypassed here, since single headlines are legitimately short.
    """
    if rules is None:
        from voltext.textprep.rules import default_rules

        rules = default_rules()
    start, end = news_day_window(day, cutoff, tz)
    tag = ticker_tag.lower()
    tokens: list[str] = []
    for item in items:
        if tag not in item.tags or not extra_tags <= item.tags:
            continue
        ts = item.timestamp
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=tz)
        if not (start <= ts < end):
            continue
        try:
            cleaned = clean_text(item.headline, rules, min_length=0)
        except EmptyAfterClean:
            continue
        for sent in tokenize(cleaned):
            tokens.extend(sent)
    return tokens
