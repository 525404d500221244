"""Pre-tagged token parsing and the significant-POS filter.

Corpora arrive already morphologically analyzed as ``surface/POS`` items;
this module parses that line format, applies the significant-POS filter
that keeps only emotion-bearing word classes, and provides a trivial
whitespace fallback for raw text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

#: POS tags retained for classification: common noun, verb, adjective,
#: determiner, adverb. Everything else is considered insignificant.
SIGNIFICANT_POS = frozenset({"NNG", "VV", "VA", "MM", "MAG"})

_POS_RE = re.compile(r"[A-Z]{1,8}\Z")


class MalformedToken(ValueError):
    """A tagged item that cannot be split into a valid surface/POS pair."""

    def __init__(self, index: int, item: str, reason: str):
        super().__init__(f"item {index} ({item!r}): {reason}")
        self.index = index
        self.item = item
        self.reason = reason


@dataclass(frozen=True, slots=True)
class Token:
    """A surface form plus its POS tag; the unit of all counting."""

    surface: str
    pos: str

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(ch.isspace() for ch in self.surface):
            # the whitespace-separated tagged-line format cannot represent these
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")
        if not _POS_RE.match(self.pos):
            raise ValueError(f"POS tag must be 1-8 uppercase ASCII letters, got {self.pos!r}")


def parse_tagged_text(raw: str) -> list[Token]:
    """Parse a whitespace-separated line of ``surface/POS`` items.

    A literal ``/`` in a surface arrives escaped as ``\\/`` (and a literal
    backslash as ``\\\\``); the unescaped ``/`` separates surface from tag.
    Raises :class:`MalformedToken` carrying the item index when an item has
    no unescaped separator, an empty side, or an invalid POS tag.
    """
    tokens = []
    for index, item in enumerate(raw.split()):
        tokens.append(_parse_item(index, item))
    return tokens


def serialize_tagged(tokens: Iterable[Token]) -> str:
    """Render tokens back to the tagged-line format, escaping as needed."""
    return " ".join(f"{_escape(t.surface)}/{t.pos}" for t in tokens)


def filter_significant(tokens: Iterable[Token], significant: Iterable[str] = SIGNIFICANT_POS) -> list[Token]:
    """Keep exactly the tokens whose POS is significant, preserving order."""
    keep = frozenset(significant)
    return [t for t in tokens if t.pos in keep]


def fallback_tokenize(text: str) -> list[Token]:
    """Whitespace-split raw, untagged text; every word is treated as a noun.

    Lets interactive classification accept plain text when no morphological
    analysis is available. Runs of whitespace collapse.
    """
    return [Token(word, "NNG") for word in text.split()]


def _parse_item(index: int, item: str) -> Token:
    sep = None
    i = 0
    while i < len(item):
        ch = item[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "/":
            sep = i
        i += 1
    if sep is None:
        raise MalformedToken(index, item, "no unescaped '/' separator")
    raw_surface, pos = item[:sep], item[sep + 1 :]
    if not raw_surface or not pos:
        raise MalformedToken(index, item, "empty surface or POS side")
    try:
        return Token(_unescape(raw_surface), pos)
    except ValueError as exc:
        raise MalformedToken(index, item, str(exc)) from None


def _escape(surface: str) -> str:
    return surface.replace("\\", "\\\\").replace("/", "\\/")


def _unescape(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw):
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)
