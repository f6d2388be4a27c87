from voltext.textprep.clean import MIN_CLEAN_LENGTH, clean_text, tokenize
from voltext.textprep.corpus import (
    RawNewsItem,
    SentenceCorpus,
    aggregate_daily_headlines,
    build_corpus,
    news_day_window,
    read_news,
    write_news,
)
from voltext.textprep.phrases import bigram_score, detect_bigrams
from voltext.textprep.rules import Action, CleanRule, default_rules, load_rules, parse_rules

__all__ = [
    "MIN_CLEAN_LENGTH",
    "Action",
    "CleanRule",
    "RawNewsItem",
    "SentenceCorpus",
    "aggregate_daily_headlines",
    "bigram_score",
    "build_corpus",
    "clean_text",
    "default_rules",
    "detect_bigrams",
    "load_rules",
    "news_day_window",
    "parse_rules",
    "read_news",
    "tokenize",
    "write_news",
]
