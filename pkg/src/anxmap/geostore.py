"""Spatio-temporal store over classified, geotagged, timestamped messages.

Messages are bucketed into a two-level rectangular degree grid (1.0°
"province" cells subdividing into 0.2° "county" cells) and indexed by
time. Ingestion is single-writer and appends to an NDJSON log replayed on
startup; every batch publishes a fresh immutable snapshot, so queries
never observe partial state and readers never block.

All temporal queries use half-open ranges: ``start <= ts < end``.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .classifier import ClassifierModel, ClassificationResult, ClassLabel, classify_ratio
from .corpus import (
    BadCoordinates,
    BadTimestamp,
    MalformedLine,
    Record,
    UnreadableSource,
    iter_corpus_lines,
    parse_record,
    serialize_record,
)
from .tokenizer import Token, filter_significant

ZOOMS = ("province", "county")

LOG_FILENAME = "records.ndjson"


class BadZoom(ValueError):
    """Zoom level is not one of the configured grid levels."""


class BadRange(ValueError):
    """Time range with start >= end."""


class BadPage(ValueError):
    """Negative page offset or limit."""


class DuplicateId(ValueError):
    """Record id already present in the store."""


@dataclass(frozen=True, slots=True)
class GridConfig:
    """Cell edge lengths in degrees.

    Sizes are exact rationals: cell assignment must floor exactly at cell
    boundaries or county cells stop nesting inside province cells
    (1.0/0.2 = 5 exactly).
    """

    province: Fraction = Fraction(1)
    county: Fraction = Fraction(1, 5)

    def size(self, zoom: str) -> Fraction:
        if zoom == "province":
            return self.province
        if zoom == "county":
            return self.county
        raise BadZoom(f"unknown zoom {zoom!r}")


DEFAULT_GRID = GridConfig()


@dataclass(frozen=True, slots=True)
class GridCell:
    zoom: str
    row: int
    col: int

    @property
    def id(self) -> str:
        return f"{self.zoom}:{self.row},{self.col}"


@dataclass(frozen=True, slots=True)
class TimeRange:
    """Half-open UTC interval [start, end)."""

    start: datetime
    end: datetime

    def __post_init__(self):
        if not self.start < self.end:
            raise BadRange(f"empty range: {self.start} >= {self.end}")

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end


@dataclass(frozen=True, slots=True)
class Message:
    """One ingested record, classified and ready for aggregation.

    ``tokens`` hold only the significant-POS tokens; ``predicted`` is the
    ratio-rule result under the model's configuration.
    """

    id: str
    text: str
    tokens: tuple[Token, ...]
    gold_label: ClassLabel | None
    predicted: ClassificationResult
    lat: float
    lon: float
    ts: datetime


@dataclass(frozen=True, slots=True)
class RegionAggregate:
    """Counts and map intensity for one non-empty grid cell."""

    cell: GridCell
    total: int
    anxious: int
    ratio: float
    intensity: float


@dataclass(frozen=True, slots=True)
class IngestReport:
    accepted: int
    rejected: Mapping[str, int]

    @property
    def total_rejected(self) -> int:
        return sum(self.rejected.values())


def cell_of(lat: float, lon: float, zoom: str, grid: GridConfig = DEFAULT_GRID) -> GridCell:
    """Assign coordinates to their grid cell: row = floor(lat/size), col = floor(lon/size).

    Floors are computed in exact rational arithmetic; float division puts
    boundary coordinates (e.g. 37.0 at county size 0.2) in the wrong cell
    and breaks the county-to-province partition.
    """
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise BadCoordinates(f"({lat}, {lon}) out of bounds")
    size = grid.size(zoom)
    return GridCell(zoom=zoom, row=math.floor(Fraction(lat) / size), col=math.floor(Fraction(lon) / size))


class _CellBucket:
    """Messages of one cell sorted by (ts asc, id desc), with prefix counts.

    Reversing a time slice yields the (ts desc, id asc) order that
    paginated region queries present.
    """

    __slots__ = ("messages", "ts_keys", "anx_prefix")

    def __init__(self, messages: list[Message]):
        # two stable sorts give (ts asc, id desc)
        messages.sort(key=lambda m: m.id, reverse=True)
        messages.sort(key=lambda m: m.ts)
        self.messages = messages
        self.ts_keys = [m.ts for m in messages]
        prefix = [0]
        for m in messages:
            prefix.append(prefix[-1] + (1 if m.predicted.label is ClassLabel.ANXIETY else 0))
        self.anx_prefix = prefix

    def span(self, rng: TimeRange) -> tuple[int, int]:
        return bisect_left(self.ts_keys, rng.start), bisect_left(self.ts_keys, rng.end)


class Snapshot:
    """Immutable view of the store; every query runs against one snapshot."""

    __slots__ = ("messages", "grid", "ids", "_ts_keys", "_anx_prefix", "_cells")

    def __init__(self, messages: Sequence[Message], grid: GridConfig):
        ordered = sorted(messages, key=lambda m: (m.ts, m.id))
        self.messages: tuple[Message, ...] = tuple(ordered)
        self.grid = grid
        self.ids = frozenset(m.id for m in ordered)
        self._ts_keys = [m.ts for m in ordered]
        prefix = [0]
        for m in ordered:
            prefix.append(prefix[-1] + (1 if m.predicted.label is ClassLabel.ANXIETY else 0))
        self._anx_prefix = prefix
        self._cells: dict[str, dict[tuple[int, int], _CellBucket]] = {}
        for zoom in ZOOMS:
            buckets: dict[tuple[int, int], list[Message]] = {}
            for m in ordered:
                cell = cell_of(m.lat, m.lon, zoom, grid)
                buckets.setdefault((cell.row, cell.col), []).append(m)
            self._cells[zoom] = {key: _CellBucket(msgs) for key, msgs in buckets.items()}

    # -- store-wide figures --

    @property
    def record_count(self) -> int:
        return len(self.messages)

    @property
    def anxious_count(self) -> int:
        return self._anx_prefix[-1]

    def time_bounds(self) -> tuple[datetime, datetime] | None:
        if not self.messages:
            return None
        return self._ts_keys[0], self._ts_keys[-1]

    def range_counts(self, rng: TimeRange) -> tuple[int, int]:
        """(total, anxious) over all messages in the range."""
        i = bisect_left(self._ts_keys, rng.start)
        j = bisect_left(self._ts_keys, rng.end)
        return j - i, self._anx_prefix[j] - self._anx_prefix[i]

    # -- queries --

    def aggregate(self, rng: TimeRange, zoom: str) -> list[RegionAggregate]:
        """Per-cell counts for the range, with intensity relative to the
        range's global anxiety ratio, ordered by (row, col)."""
        if zoom not in ZOOMS:
            raise BadZoom(f"unknown zoom {zoom!r}")
        total_in_range, anx_in_range = self.range_counts(rng)
        if total_in_range == 0:
            return []
        global_ratio = anx_in_range / total_in_range
        out = []
        for (row, col), bucket in sorted(self._cells[zoom].items()):
            i, j = bucket.span(rng)
            total = j - i
            if total == 0:
                continue
            anxious = bucket.anx_prefix[j] - bucket.anx_prefix[i]
            ratio = anxious / total
            intensity = min(1.0, max(-1.0, ratio - global_ratio))
            out.append(
                RegionAggregate(
                    cell=GridCell(zoom=zoom, row=row, col=col),
                    total=total,
                    anxious=anxious,
                    ratio=ratio,
                    intensity=intensity,
                )
            )
        return out

    def region_messages(
        self,
        cell: GridCell,
        rng: TimeRange,
        words: Sequence[str] = (),
        offset: int = 0,
        limit: int = 50,
    ) -> tuple[list[Message], int]:
        """Messages of one cell in the range, newest first, paginated.

        A message matches when its token surfaces contain ALL filter words.
        Returns (page, total match count); the total ignores pagination.
        """
        if offset < 0 or limit < 0:
            raise BadPage(f"negative offset/limit: {offset}/{limit}")
        if cell.zoom not in ZOOMS:
            raise BadZoom(f"unknown zoom {cell.zoom!r}")
        bucket = self._cells[cell.zoom].get((cell.row, cell.col))
        if bucket is None:
            return [], 0
        i, j = bucket.span(rng)
        needed = set(words)
        page: list[Message] = []
        total = 0
        for k in range(j - 1, i - 1, -1):  # (ts desc, id asc)
            msg = bucket.messages[k]
            if needed and not needed.issubset(tok.surface for tok in msg.tokens):
                continue
            if total >= offset and len(page) < limit:
                page.append(msg)
            total += 1
        return page, total

    def word_cloud(self, cell: GridCell | None, rng: TimeRange, k: int) -> list[tuple[str, int]]:
        """Top-k token surfaces by count over the cell (or whole store) and range.

        Ties break lexicographically; fewer than k pairs come back when the
        vocabulary is smaller.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if cell is None:
            i = bisect_left(self._ts_keys, rng.start)
            j = bisect_left(self._ts_keys, rng.end)
            msgs: Sequence[Message] = self.messages[i:j]
        else:
            if cell.zoom not in ZOOMS:
                raise BadZoom(f"unknown zoom {cell.zoom!r}")
            bucket = self._cells[cell.zoom].get((cell.row, cell.col))
            if bucket is None:
                return []
            i, j = bucket.span(rng)
            msgs = bucket.messages[i:j]
        counts: Counter[str] = Counter()
        for msg in msgs:
            counts.update(tok.surface for tok in msg.tokens)
        return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


class GeoStore:
    """Single-writer store handle over immutable snapshots.

    ``ingest_lines`` classifies and indexes records, appends accepted ones
    to the persistence log, and atomically publishes a new snapshot.
    Concurrent readers keep whatever snapshot they already hold.
    """

    def __init__(
        self,
        model: ClassifierModel,
        store_dir: str | Path | None = None,
        grid: GridConfig = DEFAULT_GRID,
    ):
        self.model = model
        self.grid = grid
        self._dir = Path(store_dir) if store_dir is not None else None
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
        self._snapshot = Snapshot((), grid)

    @classmethod
    def open(
        cls,
        store_dir: str | Path,
        model: ClassifierModel,
        grid: GridConfig = DEFAULT_GRID,
    ) -> "GeoStore":
        """Open a store directory, replaying its log (records are re-classified)."""
        store = cls(model, store_dir, grid)
        log = store.log_path
        if log is not None and log.exists():
            store._ingest(iter_corpus_lines(log), persist=False)
        return store

    @property
    def log_path(self) -> Path | None:
        return None if self._dir is None else self._dir / LOG_FILENAME

    def snapshot(self) -> Snapshot:
        return self._snapshot

    def ingest_lines(self, lines: Iterable[str]) -> IngestReport:
        return self._ingest(((0, line) for line in lines), persist=True)

    def ingest_file(self, path: str | Path) -> IngestReport:
        return self._ingest(iter_corpus_lines(path), persist=True)

    def _ingest(self, numbered_lines: Iterable[tuple[int, str]], persist: bool) -> IngestReport:
        seen = set(self._snapshot.ids)
        accepted: list[Message] = []
        accepted_lines: list[str] = []
        rejected: Counter[str] = Counter()
        for _, line in numbered_lines:
            try:
                rec = parse_record(line)
            except (MalformedLine, BadCoordinates, BadTimestamp) as exc:
                rejected[type(exc).__name__] += 1
                continue
            if rec.id in seen:
                rejected["DuplicateId"] += 1
                continue
            seen.add(rec.id)
            accepted.append(self._classify(rec))
            accepted_lines.append(serialize_record(rec))
        if accepted:
            if persist and self.log_path is not None:
                with open(self.log_path, "a", encoding="utf-8") as fh:
                    fh.write("\n".join(accepted_lines) + "\n")
            self._snapshot = Snapshot(self._snapshot.messages + tuple(accepted), self.grid)
        return IngestReport(accepted=len(accepted), rejected=dict(rejected))

    def _classify(self, rec: Record) -> Message:
        tokens = tuple(filter_significant(rec.tokens, self.model.config.pos_filter))
        return Message(
            id=rec.id,
            text=rec.text,
            tokens=tokens,
            gold_label=rec.label,
            predicted=classify_ratio(self.model, tokens),
            lat=rec.lat,
            lon=rec.lon,
            ts=rec.ts,
        )

    # convenience pass-throughs to the current snapshot

    def aggregate(self, rng: TimeRange, zoom: str) -> list[RegionAggregate]:
        return self._snapshot.aggregate(rng, zoom)

    def region_messages(self, cell, rng, words=(), offset=0, limit=50):
        return self._snapshot.region_messages(cell, rng, words, offset, limit)

    def word_cloud(self, cell, rng, k):
        return self._snapshot.word_cloud(cell, rng, k)
