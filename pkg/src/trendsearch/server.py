"""HTTP JSON API over a loaded search engine.

Requests never mutate state; the engine (and everything under it) is
immutable after startup, so concurrent reads need no locking.  Swapping
in a re-labeled corpus means building a new engine and assigning it in
one step.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .engine import SearchEngine, compose_tile_sentence
from .queryparse import QueryParseError


def create_app(engine: SearchEngine | None, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="trendsearch", docs_url=None, redoc_url=None)
    app.state.engine = engine

    def _engine() -> SearchEngine:
        if app.state.engine is None:
            raise HTTPException(status_code=503, detail="index not loaded")
        return app.state.engine

    @app.get("/api/search")
    def search(
        q: str = Query(default=""),
        exclude: str = Query(default=""),
        page: int = Query(default=1, ge=1),
    ) -> JSONResponse:
        eng = _engine()
        if not q.strip():
            raise HTTPException(status_code=400, detail="empty query")
        excluded = {part.strip() for part in exclude.split(",") if part.strip()}
        try:
            payload = eng.search(q, exclude=excluded, page=page)
        except QueryParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        for bucket in payload["buckets"]:
            bucket["sentence"] = compose_tile_sentence(bucket["snippets"])
        return JSONResponse(payload)

    @app.get("/api/charts/{chart_id}")
    def chart_points(
        chart_id: str,
        date_from: str | None = Query(default=None, alias="from"),
        date_to: str | None = Query(default=None, alias="to"),
    ) -> JSONResponse:
        eng = _engine()
        try:
            start = date.fromisoformat(date_from) if date_from else None
            end = date.fromisoformat(date_to) if date_to else None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"bad date range: {exc}") from None
        if start is not None and end is not None and start > end:
            raise HTTPException(status_code=400, detail="bad date range: from > to")
        try:
            points = eng.chart_points(chart_id, start, end)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown chart {chart_id!r}") from None
        return JSONResponse({"chart_id": chart_id, "points": points})

    @app.get("/api/labels")
    def labels() -> JSONResponse:
        eng = _engine()
        return JSONResponse({"labels": eng.label_catalog()})

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
