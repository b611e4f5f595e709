"""HTTP surface: alert intake, graph retrieval, what-if, event stream.

Request handling is concurrent at the edge, but every state mutation goes
through the engine's single lock, so clients only ever observe committed
graph versions. The event stream first replays every committed version
announcement (at-least-once, in order) and then follows live commits.
"""

from __future__ import annotations

import json
import queue
import threading
from typing import Any, Iterator

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .engine import Engine
from .errors import AlertError, EngineError

EVENT_STREAM_HEARTBEAT_SECONDS = 10.0


class Broadcaster:
    """Fan-out of version announcements to subscriber queues."""

    def __init__(self) -> None:
        self._subscribers: list[queue.Queue] = []
        self._lock = threading.Lock()

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def publish(self, announcement: dict[str, Any]) -> None:
        with self._lock:
            subscribers = list(self._subscribers)
        for q in subscribers:
            q.put(announcement)


def _error_body(code: str, message: str) -> dict[str, Any]:
    return {"error": {"code": code, "message": message}}


def _sse(announcement: dict[str, Any]) -> str:
    data = json.dumps(announcement, sort_keys=True)
    return f"id: {announcement['version']}\nevent: graph_version\ndata: {data}\n\n"


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="attack-graph service")
    broadcaster = Broadcaster()
    engine.add_listener(broadcaster.publish)

    @app.exception_handler(AlertError)
    async def alert_error(request: Request, exc: AlertError) -> JSONResponse:
        return JSONResponse(status_code=400, content=_error_body("invalid_alert", str(exc)))

    @app.exception_handler(EngineError)
    async def engine_error(request: Request, exc: EngineError) -> JSONResponse:
        return JSONResponse(status_code=500, content=_error_body("internal", str(exc)))

    @app.get("/graph")
    def get_graph() -> dict[str, Any]:
        return engine.export_current()

    @app.get("/graph/history")
    def get_history() -> dict[str, Any]:
        return {"format_version": 1, "versions": engine.history()}

    @app.post("/alerts")
    async def post_alert(request: Request) -> dict[str, Any]:
        document = await _read_json(request)
        return engine.handle_alert(document)

    @app.post("/whatif")
    async def post_whatif(request: Request) -> dict[str, Any]:
        document = await _read_json(request)
        return engine.whatif(document)

    @app.get("/events")
    def get_events(max_events: int | None = None) -> StreamingResponse:
        def stream() -> Iterator[str]:
            q = broadcaster.subscribe()
            sent = 0
            last_version = 0
            try:
                for announcement in engine.version_announcements():
                    yield _sse(announcement)
                    last_version = announcement["version"]
                    sent += 1
                    if max_events is not None and sent >= max_events:
                        return
                while True:
                    try:
                        announcement = q.get(timeout=EVENT_STREAM_HEARTBEAT_SECONDS)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    if announcement["version"] <= last_version:
                        continue
                    yield _sse(announcement)
                    last_version = announcement["version"]
                    sent += 1
                    if max_events is not None and sent >= max_events:
                        return
            finally:
                broadcaster.unsubscribe(q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


async def _read_json(request: Request) -> Any:
    body = await request.body()
    if not body:
        raise AlertError("empty request body")
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        raise AlertError(f"request body is not valid JSON: {exc}") from exc
