"""WebSocket gateway around one SessionEngine.

The engine is synchronous and owned by the event loop: every mutation
happens inline in a handler or in the cadence task, never concurrently.
Each client gets a bounded outbox; when a client falls behind, the
oldest queued frame makes way for newer ones, and non-frame messages
are never dropped.
"""

from __future__ import annotations

import asyncio
import json
from collections import deque
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .clock import SwingProfile
from .config import AppConfig
from .content import ContentLibrary
from .curriculum import builtin_lessons
from .engine import SessionEngine
from .modes import ModeConfig, PlayMode
from .protocol import (
    canonical_json,
    content_list_message,
    error_message,
    lesson_list_message,
)
from .replay import write_report
from .theory import Key

FRAME_INTERVAL_MS = 1000.0 / 60.0
OUTBOX_LIMIT = 256


class ClientOutbox:
    """Per-connection send queue with frame coalescing."""

    def __init__(self, limit: int = OUTBOX_LIMIT):
        self.limit = limit
        self.queue: deque[dict] = deque()
        self.wakeup = asyncio.Event()

    def push(self, msg: dict) -> None:
        if msg.get("type") == "frame":
            # at most one frame waits; the newest wins
            for i in range(len(self.queue) - 1, -1, -1):
                if self.queue[i].get("type") == "frame":
                    del self.queue[i]
                    break
        elif len(self.queue) >= self.limit:
            for i, queued in enumerate(self.queue):
                if queued.get("type") == "frame":
                    del self.queue[i]
                    break
        self.queue.append(msg)
        self.wakeup.set()

    async def drain(self) -> list[dict]:
        while not self.queue:
            self.wakeup.clear()
            await self.wakeup.wait()
        out = list(self.queue)
        self.queue.clear()
        return out


def build_engine(config: AppConfig, library: Optional[ContentLibrary]) -> SessionEngine:
    key = Key(config.tonic)
    cfg = ModeConfig(
        PlayMode.GUIDED_PRESS,
        split_pitch=config.split_pitch,
        hit_window_ms=config.hit_window_ms,
    )
    return SessionEngine(
        lessons=builtin_lessons(key),
        content_resolver=library.resolve if library is not None else None,
        tempo_bpm=config.default_tempo_bpm,
        key=key,
        cfg=cfg,
        swing=SwingProfile(ratio=config.swing_ratio),
    )


def build_app(config: AppConfig, library: Optional[ContentLibrary] = None) -> FastAPI:
    if library is None:
        library = ContentLibrary(Path(config.content_dir))
        library.ensure_builtins()
    engine = build_engine(config, library)
    clients: dict[int, ClientOutbox] = {}
    counter = {"next_client": 0}

    def broadcast(messages: list[dict], sender: Optional[ClientOutbox] = None) -> None:
        for msg in messages:
            if msg.get("type") == "report" and engine.last_report is not None:
                write_report(engine.last_report, Path(config.reports_dir))
            if msg.get("type") == "error" and sender is not None:
                sender.push(msg)
                continue
            for outbox in clients.values():
                outbox.push(msg)

    async def cadence() -> None:
        loop = asyncio.get_running_loop()
        last = loop.time()
        while True:
            await asyncio.sleep(FRAME_INTERVAL_MS / 1000.0)
            now = loop.time()
            elapsed_ms = (now - last) * 1000.0
            last = now
            if engine.transport.running:
                broadcast(engine.advance_time(elapsed_ms))

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(cadence())
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(title="keycoach", lifespan=lifespan)
    app.state.engine = engine
    app.state.library = library
    app.state.config = config

    @app.get("/health")
    async def health() -> dict:
        return {
            "status": "ok",
            "lessons": len(engine.lessons),
            "content_entries": len(library.entries()),
            "running": engine.transport.running,
        }

    @app.websocket("/ws")
    async def ws(websocket: WebSocket) -> None:
        await websocket.accept()
        outbox = ClientOutbox()
        client_id = counter["next_client"]
        counter["next_client"] += 1
        clients[client_id] = outbox
        outbox.push(lesson_list_message(engine.lessons))
        outbox.push(content_list_message([e.payload() for e in library.entries()]))
        outbox.push(engine.snapshot_frame_message())

        async def sender() -> None:
            while True:
                for msg in await outbox.drain():
                    await websocket.send_text(canonical_json(msg))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await websocket.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    outbox.push(error_message("not valid JSON"))
                    continue
                broadcast(engine.handle_message(msg), sender=outbox)
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            clients.pop(client_id, None)

    return app


def run_server(config: AppConfig) -> None:
    import uvicorn

    app = build_app(config)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="warning")
