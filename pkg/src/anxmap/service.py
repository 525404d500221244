"""Read-only HTTP query layer for the dashboard and other clients.

Five endpoints: /api/meta, /api/regions, /api/tweets, /api/wordcloud, and
POST /api/classify. Each request binds the store snapshot current at its
start; response bodies are canonical JSON, byte-identical for identical
(snapshot, query) pairs. Caller faults are 4xx with a structured
``{status, code, message}`` body.
"""

from __future__ import annotations

import math
from typing import Sequence

from fastapi import FastAPI, Request, Response

from .classifier import (
    CLASS_ORDER,
    ClassificationResult,
    ClassifierModel,
    classify_ratio,
    label_index,
)
from .corpus import BadTimestamp, format_ts, parse_ts
from .geostore import (
    ZOOMS,
    GeoStore,
    GridCell,
    Message,
    RegionAggregate,
    Snapshot,
    TimeRange,
)
from .jsonfmt import canon_bytes
from .tokenizer import Token, fallback_tokenize, filter_significant

MAX_PAGE_LIMIT = 500
DEFAULT_PAGE_LIMIT = 50
DEFAULT_CLOUD_K = 50


class ApiError(Exception):
    """Maps to a structured HTTP error response."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


# -- canonical renderings (shared by the HTTP layer and its contract tests) --


def render_meta(snap: Snapshot, model: ClassifierModel) -> dict:
    bounds = snap.time_bounds()
    count = snap.record_count
    return {
        "time_min": format_ts(bounds[0]) if bounds else None,
        "time_max": format_ts(bounds[1]) if bounds else None,
        "record_count": count,
        "global_ratio": (snap.anxious_count / count) if count else None,
        "zooms": [
            {"zoom": "province", "size_deg": float(snap.grid.province)},
            {"zoom": "county", "size_deg": float(snap.grid.county)},
        ],
        "model_config": {
            "smoothing": model.config.smoothing,
            "threshold": model.config.threshold,
            "pos_filter": sorted(model.config.pos_filter),
        },
    }


def render_aggregates(aggregates: Sequence[RegionAggregate]) -> list[dict]:
    return [
        {
            "cell": {"zoom": agg.cell.zoom, "row": agg.cell.row, "col": agg.cell.col},
            "total": agg.total,
            "anxious": agg.anxious,
            "ratio": agg.ratio,
            "intensity": agg.intensity,
        }
        for agg in aggregates
    ]


def render_message(msg: Message) -> dict:
    return {
        "id": msg.id,
        "text": msg.text,
        "tokens": [[t.surface, t.pos] for t in msg.tokens],
        "label": None if msg.gold_label is None else label_index(msg.gold_label),
        "predicted": {
            "label": msg.predicted.label.value,
            "ratio": _jsonable(msg.predicted.ratio),
        },
        "lat": msg.lat,
        "lon": msg.lon,
        "ts": format_ts(msg.ts),
    }


def render_tweets_page(
    cell: GridCell, messages: Sequence[Message], total: int, offset: int, limit: int
) -> dict:
    return {
        "region": cell.id,
        "total": total,
        "offset": offset,
        "limit": limit,
        "messages": [render_message(m) for m in messages],
    }


def render_wordcloud(items: Sequence[tuple[str, int]]) -> dict:
    return {"items": [[surface, count] for surface, count in items]}


def render_classification(result: ClassificationResult) -> dict:
    return {
        "label": result.label.value,
        "ratio": _jsonable(result.ratio),
        "log_lik": {
            label.value: _jsonable(result.log_lik[i]) for i, label in enumerate(CLASS_ORDER)
        },
        "method": result.method,
        "degenerate": result.degenerate,
    }


def _jsonable(x: float) -> float | str:
    # JSON has no Infinity literal; the dashboard JSON.parses these
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return x


# -- request parsing --


def _parse_range(params) -> TimeRange:
    raw_from, raw_to = params.get("from"), params.get("to")
    if raw_from is None or raw_to is None:
        raise ApiError(400, "bad_range", "missing 'from' or 'to'")
    try:
        start, end = parse_ts(raw_from), parse_ts(raw_to)
    except BadTimestamp as exc:
        raise ApiError(400, "bad_range", str(exc)) from None
    if not start < end:
        raise ApiError(400, "bad_range", f"'from' must precede 'to': {raw_from} >= {raw_to}")
    return TimeRange(start, end)


def _parse_zoom(params) -> str:
    zoom = params.get("zoom")
    if zoom not in ZOOMS:
        raise ApiError(400, "bad_zoom", f"zoom must be one of {list(ZOOMS)}, got {zoom!r}")
    return zoom


def _parse_int(params, name: str, default: int | None, code: str) -> int:
    raw = params.get(name)
    if raw is None:
        if default is None:
            raise ApiError(400, code, f"missing '{name}'")
        return default
    try:
        return int(raw)
    except ValueError:
        raise ApiError(400, code, f"'{name}' must be an integer, got {raw!r}") from None


def create_app(
    store: GeoStore | None,
    model: ClassifierModel,
    cors_origin: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    """Assemble the API over one store handle (read-only; no write routes)."""
    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError) -> Response:
        body = {"status": exc.status, "code": exc.code, "message": exc.message}
        return Response(canon_bytes(body), status_code=exc.status, media_type="application/json")

    def bind_snapshot() -> Snapshot:
        if store is None:
            raise ApiError(503, "no_snapshot", "store is not loaded")
        return store.snapshot()

    def respond(obj) -> Response:
        return Response(canon_bytes(obj), media_type="application/json")

    @app.get("/api/meta")
    def meta() -> Response:
        snap = bind_snapshot()
        return respond(render_meta(snap, model))

    @app.get("/api/regions")
    def regions(request: Request) -> Response:
        snap = bind_snapshot()
        rng = _parse_range(request.query_params)
        zoom = _parse_zoom(request.query_params)
        return respond(render_aggregates(snap.aggregate(rng, zoom)))

    @app.get("/api/tweets")
    def tweets(request: Request) -> Response:
        snap = bind_snapshot()
        params = request.query_params
        rng = _parse_range(params)
        zoom = _parse_zoom(params)
        row = _parse_int(params, "row", None, "bad_cell")
        col = _parse_int(params, "col", None, "bad_cell")
        offset = _parse_int(params, "offset", 0, "bad_page")
        limit = _parse_int(params, "limit", DEFAULT_PAGE_LIMIT, "bad_page")
        if offset < 0 or limit < 0:
            raise ApiError(400, "bad_page", f"negative offset/limit: {offset}/{limit}")
        if limit > MAX_PAGE_LIMIT:
            raise ApiError(400, "bad_page", f"limit exceeds maximum {MAX_PAGE_LIMIT}")
        words = (params.get("q") or "").split()
        cell = GridCell(zoom=zoom, row=row, col=col)
        page, total = snap.region_messages(cell, rng, words, offset, limit)
        return respond(render_tweets_page(cell, page, total, offset, limit))

    @app.get("/api/wordcloud")
    def wordcloud(request: Request) -> Response:
        snap = bind_snapshot()
        params = request.query_params
        rng = _parse_range(params)
        k = _parse_int(params, "k", DEFAULT_CLOUD_K, "bad_k")
        if k < 1:
            raise ApiError(400, "bad_k", f"k must be >= 1, got {k}")
        cell = None
        if "row" in params or "col" in params or "zoom" in params:
            zoom = _parse_zoom(params)
            row = _parse_int(params, "row", None, "bad_cell")
            col = _parse_int(params, "col", None, "bad_cell")
            cell = GridCell(zoom=zoom, row=row, col=col)
        return respond(render_wordcloud(snap.word_cloud(cell, rng, k)))

    @app.post("/api/classify")
    async def classify(request: Request) -> Response:
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "bad_body", "request body must be a JSON object") from None
        if not isinstance(body, dict):
            raise ApiError(400, "bad_body", "request body must be a JSON object")
        has_text = "text" in body
        has_tokens = "tokens" in body
        if has_text == has_tokens:
            raise ApiError(400, "bad_body", "provide exactly one of 'text' or 'tokens'")
        if has_text:
            if not isinstance(body["text"], str):
                raise ApiError(400, "bad_body", "'text' must be a string")
            tokens = fallback_tokenize(body["text"])
        else:
            tokens = _parse_token_pairs(body["tokens"])
        filtered = filter_significant(tokens, model.config.pos_filter)
        return respond(render_classification(classify_ratio(model, filtered)))

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=[cors_origin], allow_methods=["GET", "POST"], allow_headers=["*"]
        )

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _parse_token_pairs(raw) -> list[Token]:
    if not isinstance(raw, list):
        raise ApiError(400, "bad_tokens", "'tokens' must be a list of [surface, pos] pairs")
    tokens = []
    for pair in raw:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise ApiError(400, "bad_tokens", f"bad token entry: {pair!r}")
        try:
            tokens.append(Token(pair[0], pair[1]))
        except ValueError as exc:
            raise ApiError(400, "bad_tokens", f"bad token entry {pair!r}: {exc}") from None
    return tokens
