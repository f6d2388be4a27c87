"""Cleaning rule catalogue: parsing, macro expansion, and the shipped default set."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from voltext.errors import FormatError

# Regex fragments substituted for {URL} / {EMAIL} / {PHONE} in catalogue patterns.
URL_RE = r"(?:https?://|www\.)[^\s<>\"]+"
EMAIL_RE = r"[a-z0-9._%+-]+@[a-z0-9.-]+\.[a-z]{2,}"
PHONE_RE = r"(?:\+?\d{1,3}[\s.-]?)?\(?\d{3}\)?[\s.-]\d{3}[\s.-]\d{4}"

_MACROS = {"{URL}": URL_RE, "{EMAIL}": EMAIL_RE, "{PHONE}": PHONE_RE}

CATEGORY_ORDER = ("primary", "begins_with", "ends_with", "general", "final_checks")

# Accept both the canonical snake_case spelling and the CamelCase one.
_CATEGORY_ALIASES = {
    "primary": "primary",
    "begins_with": "begins_with",
    "beginswith": "begins_with",
    "ends_with": "ends_with",
    "endswith": "ends_with",
    "general": "general",
    "final_checks": "final_checks",
    "finalchecks": "final_checks",
}


class Action(str, Enum):
    DELETE = "delete"
    TRUNCATE_FROM = "truncate_from"
    TRUNCATE_BEFORE = "truncate_before"
    REPLACE = "replace"


@dataclass(frozen=True)
class CleanRule:
    rule_id: str
    category: str
    action: Action
    pattern: str

    def compiled(self) -> re.Pattern:
        return _compile(self.pattern)


_compile_cache: dict[str, re.Pattern] = {}


def _compile(pattern: str) -> re.Pattern:
    pat = _compile_cache.get(pattern)
    if pat is None:
        expanded = pattern
        for macro, frag in _MACROS.items():
            expanded = expanded.replace(macro, frag)
        pat = re.compile(expanded, re.MULTILINE)
        _compile_cache[pattern] = pat
    return pat


def parse_rules(text: str) -> list[CleanRule]:
    """Parse a tab-separated rule catalogue (``#`` starts a comment line)."""
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise FormatError(f"rule line {lineno}: expected 4 tab-separated fields, got {len(parts)}")
        rule_id, category, action, pattern = (p.strip() for p in parts)
        cat = _CATEGORY_ALIASES.get(category.lower())
        if cat is None:
            raise FormatError(f"rule line {lineno}: unknown category {category!r}")
        try:
            act = Action(action.lower())
        except ValueError:
            raise FormatError(f"rule line {lineno}: unknown action {action!r}") from None
        try:
            _compile(pattern)
        except re.error as exc:
            raise FormatError(f"rule line {lineno}: bad pattern: {exc}") from None
        rules.append(CleanRule(rule_id, cat, act, pattern))
    return rules


def load_rules(path: str | Path) -> list[CleanRule]:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


def default_rules() -> list[CleanRule]:
    """The catalogue shipped with the package."""
    text = resources.files("voltext").joinpath("data/clean_rules.tsv").read_text(encoding="utf-8")
    return parse_rules(text)
