"""The corpus line format: one JSON record per line.

Every record carries ``{id, text, tokens, label, lat, lon, ts}`` and the
same format serves file ingestion, training/evaluation corpora, and the
store's append-only persistence log. Labels are ``1`` for Anxiety, ``0``
for NonAnxiety, ``null`` for untagged records; timestamps are ISO-8601
UTC with second precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterator

from .classifier import ClassLabel, label_from_index, label_index
from .jsonfmt import canon_dumps
from .tokenizer import Token


class MalformedLine(ValueError):
    """A corpus line that is not a well-formed record."""


class BadCoordinates(ValueError):
    """Latitude/longitude outside [-90,90] x [-180,180]."""


class BadTimestamp(ValueError):
    """Timestamp not an ISO-8601 UTC instant with second precision."""


class UnreadableSource(OSError):
    """The corpus source itself cannot be read."""


_REQUIRED = frozenset({"id", "text", "tokens", "label", "lat", "lon", "ts"})


@dataclass(frozen=True, slots=True)
class Record:
    id: str
    text: str
    tokens: tuple[Token, ...]
    label: ClassLabel | None
    lat: float
    lon: float
    ts: datetime


def parse_ts(value: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp ('...Z' or '...+00:00')."""
    if not isinstance(value, str):
        raise BadTimestamp(f"timestamp must be a string, got {value!r}")
    normalized = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        ts = datetime.fromisoformat(normalized)
    except ValueError:
        raise BadTimestamp(f"unparseable timestamp {value!r}") from None
    if ts.tzinfo is None or ts.utcoffset() != timedelta(0):
        raise BadTimestamp(f"timestamp must be UTC: {value!r}")
    if ts.microsecond:
        raise BadTimestamp(f"sub-second precision not supported: {value!r}")
    return ts


def format_ts(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_record(line: str) -> Record:
    """Parse one corpus line; raises the specific per-record error."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedLine("record must be a JSON object")
    missing = _REQUIRED - obj.keys()
    if missing:
        raise MalformedLine(f"missing fields: {sorted(missing)}")

    rec_id = obj["id"]
    if not isinstance(rec_id, str) or not rec_id:
        raise MalformedLine(f"id must be a non-empty string, got {rec_id!r}")
    text = obj["text"]
    if not isinstance(text, str):
        raise MalformedLine(f"text must be a string, got {text!r}")

    raw_tokens = obj["tokens"]
    if not isinstance(raw_tokens, list):
        raise MalformedLine("tokens must be a list of [surface, pos] pairs")
    tokens = []
    for pair in raw_tokens:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise MalformedLine(f"bad token entry: {pair!r}")
        try:
            tokens.append(Token(pair[0], pair[1]))
        except ValueError as exc:
            raise MalformedLine(f"bad token entry {pair!r}: {exc}") from None

    raw_label = obj["label"]
    if raw_label is None:
        label = None
    elif isinstance(raw_label, int) and not isinstance(raw_label, bool) and raw_label in (0, 1):
        label = label_from_index(raw_label)
    else:
        raise MalformedLine(f"label must be 0, 1 or null, got {raw_label!r}")

    lat, lon = obj["lat"], obj["lon"]
    for name, value in (("lat", lat), ("lon", lon)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedLine(f"{name} must be a number, got {value!r}")
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise BadCoordinates(f"({lat}, {lon}) out of bounds")

    return Record(
        id=rec_id,
        text=text,
        tokens=tuple(tokens),
        label=label,
        lat=float(lat),
        lon=float(lon),
        ts=parse_ts(obj["ts"]),
    )


def serialize_record(rec: Record) -> str:
    """Render a record as its canonical corpus line (no trailing newline)."""
    return canon_dumps(
        {
            "id": rec.id,
            "text": rec.text,
            "tokens": [[t.surface, t.pos] for t in rec.tokens],
            "label": None if rec.label is None else label_index(rec.label),
            "lat": rec.lat,
            "lon": rec.lon,
            "ts": format_ts(rec.ts),
        }
    )


def iter_corpus_lines(path: str | Path) -> Iterator[tuple[int, str]]:
    """Yield (line number, line) over a corpus file, skipping blank lines.

    Raises :class:`UnreadableSource` when the file cannot be opened or read.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if line.strip():
                    yield lineno, line
    except OSError as exc:
        raise UnreadableSource(f"cannot read corpus {path}: {exc}") from None


def load_labeled(
    path: str | Path, pos_filter: frozenset[str]
) -> tuple[list[tuple[list[Token], ClassLabel]], dict[str, int]]:
    """Read a labeled corpus for training/evaluation.

    Returns (documents, skipped-reason counts). Tokens are already passed
    through the significant-POS filter; malformed and unlabeled lines are
    counted, not fatal.
    """
    from .tokenizer import filter_significant

    docs: list[tuple[list[Token], ClassLabel]] = []
    skipped: dict[str, int] = {}
    for _, line in iter_corpus_lines(path):
        try:
            rec = parse_record(line)
        except (MalformedLine, BadCoordinates, BadTimestamp) as exc:
            reason = type(exc).__name__
            skipped[reason] = skipped.get(reason, 0) + 1
            continue
        if rec.label is None:
            skipped["Unlabeled"] = skipped.get("Unlabeled", 0) + 1
            continue
        docs.append((filter_significant(rec.tokens, pos_filter), rec.label))
    return docs, skipped
