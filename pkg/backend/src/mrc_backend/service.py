"""HTTP service implementing the answer-extraction wire protocol.

POST /v1/answers  {"items": [{"id", "query", "context"}]}
  -> 200 {"items": [{"id", "answers": [{"start", "end", "text", "score"}]}]}
  offsets are code points into the submitted context; response order equals
  request order.  400 on malformed bodies, 503 until the model is loaded.
GET /v1/health -> {"status": "ok"}
"""
from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .training import Reader


def _malformed(detail: str) -> JSONResponse:
    return JSONResponse({"detail": detail}, status_code=400)


def validate_items(body) -> list[dict] | str:
    """Returns the items list, or an error string describing the problem."""
    if not isinstance(body, dict):
        return "body must be a JSON object"
    items = body.get("items")
    if not isinstance(items, list):
        return "body needs an \"items\" list"
    seen_ids = set()
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            return f"items[{i}] must be an object"
        for key in ("id", "query", "context"):
            if not isinstance(item.get(key), str):
                return f"items[{i}].{key} must be a string"
        if item["id"] in seen_ids:
            return f"duplicate item id {item['id']!r}"
        seen_ids.add(item["id"])
    return items


def create_app(model_dir: str | Path | None = None,
               reader: Reader | None = None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.reader is None and model_dir is not None:
            app.state.reader = Reader.load(model_dir)
        yield

    app = FastAPI(title="span-reader backend", lifespan=lifespan)
    app.state.reader = reader

    @app.get("/v1/health")
    def health():
        if app.state.reader is None:
            return JSONResponse({"status": "loading"}, status_code=503)
        return {"status": "ok"}

    @app.post("/v1/answers")
    async def answers(request: Request):
        if app.state.reader is None:
            return JSONResponse({"detail": "model not loaded"}, status_code=503)
        try:
            body = await request.json()
        except Exception:
            return _malformed("body is not valid JSON")
        items = validate_items(body)
        if isinstance(items, str):
            return _malformed(items)
        all_spans = app.state.reader.answer_many(
            [(item["query"], item["context"]) for item in items])
        out = []
        for item, spans in zip(items, all_spans):
            out.append({
                "id": item["id"],
                "answers": [
                    {"start": s, "end": e, "text": text, "score": score}
                    for s, e, text, score in spans
                ],
            })
        return {"items": out}

    return app
