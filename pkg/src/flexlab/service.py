"""Live session service: HTTP lifecycle + web-socket command/telemetry wire.

One session owns one engine. The engine runs on its own thread, throttled by
a Pacer; commands cross into it through a thread-safe queue and take effect
at the next tick; frames fan out to any number of web-socket subscribers
through the event loop (the engine thread never touches a socket).

Wire protocol, JSON text frames on `/ws/session/{id}`:

  client -> server: {"type": "configure"|"start"|"pause"|"resume"|
                     "set_speed"|"override"|"reset", "req": <id>, ...}
  server -> client: {"type": "ack"|"error", "req": <id>, ...}
                    {"type": "telemetry", "frame": {...}}
                    {"type": "phase", "phase": "configured"|"running"|
                     "paused"|"finished"}
                    {"type": "summary", "summary": {...}}

Every client message yields exactly one ack or error echoing its req id.
A joining subscriber gets the current phase, a snapshot of the latest frame,
then every subsequent frame in tick order; a finished run ends the stream
with a summary message.

HTTP: POST /sessions (config document; empty body or {} uses the server's
default template), GET /healthz, GET /sessions/{id}, and for finished runs
GET /sessions/{id}/export.csv and /summary.json; the accepted-command log is
available any time at /sessions/{id}/commands.ndjson in exactly the format
the scenario loader replays.
"""

from __future__ import annotations

import asyncio
import json
import logging
import queue
import secrets
import threading
from collections import deque
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import export
from .config import config_from_dict, default_config_document
from .control import OverrideCommand
from .engine import Engine, Pacer, RunSummary, SimConfig, summarize
from .errors import FlexlabError, ModelDivergenceError, ValidationError

log = logging.getLogger(__name__)

PHASE_CONFIGURED = "configured"
PHASE_RUNNING = "running"
PHASE_PAUSED = "paused"
PHASE_FINISHED = "finished"

DEFAULT_SPEED_MIN_PER_S = 10.0


def _wire(msg: dict[str, Any]) -> str:
    return json.dumps(msg, separators=(",", ":"))


class _Subscriber:
    """Per-connection outbound buffer, mutated only on the event loop."""

    def __init__(self) -> None:
        self.queue: deque[dict[str, Any]] = deque()
        self.wake = asyncio.Event()

    def push(self, msg: dict[str, Any]) -> None:
        self.queue.append(msg)
        self.wake.set()


class Hub:
    """Fans broadcast messages out to subscribers via the event loop."""

    def __init__(self, loop: asyncio.AbstractEventLoop) -> None:
        self._loop = loop
        self._subs: set[_Subscriber] = set()

    def subscribe(self, sub: _Subscriber) -> None:
        self._subs.add(sub)

    def unsubscribe(self, sub: _Subscriber) -> None:
        self._subs.discard(sub)

    def publish(self, msg: dict[str, Any]) -> None:
        """Safe from any thread; the engine never blocks on a socket."""
        self._loop.call_soon_threadsafe(self._fanout, msg)

    def _fanout(self, msg: dict[str, Any]) -> None:
        for sub in list(self._subs):
            sub.push(msg)


class EngineRunner(threading.Thread):
    """Drives one engine to completion under a Pacer."""

    def __init__(self, engine: Engine, pacer: Pacer, hub: Hub,
                 on_finish, on_error) -> None:
        super().__init__(daemon=True, name="flexlab-engine")
        self.engine = engine
        self.pacer = pacer
        self.hub = hub
        self.commands: queue.Queue[OverrideCommand] = queue.Queue()
        self._on_finish = on_finish
        self._on_error = on_error

    def run(self) -> None:
        engine = self.engine
        try:
            while not engine.finished:
                if not self.pacer.wait():
                    return   # reset or shutdown
                pending = []
                while True:
                    try:
                        pending.append(self.commands.get_nowait())
                    except queue.Empty:
                        break
                frame = engine.tick(pending)
                self.hub.publish({"type": "telemetry", "frame": frame.to_dict()})
            self._on_finish(summarize(engine.frames))
        except ModelDivergenceError as exc:
            log.error("engine run aborted: %s", exc)
            self._on_error(str(exc))


class Session:
    """One configured/running/finished simulation and its subscribers."""

    def __init__(self, session_id: str, doc: dict[str, Any], config: SimConfig,
                 hub: Hub) -> None:
        self.id = session_id
        self.doc = doc
        self.config = config
        self.hub = hub
        self.lock = threading.RLock()
        self.phase = PHASE_CONFIGURED
        self.speed = DEFAULT_SPEED_MIN_PER_S
        self.runner: EngineRunner | None = None
        self.summary: RunSummary | None = None
        self.error: str | None = None

    # -- lifecycle ---------------------------------------------------------

    def _publish_phase(self) -> None:
        self.hub.publish({"type": "phase", "phase": self.phase})

    def start(self) -> None:
        with self.lock:
            if self.phase != PHASE_CONFIGURED:
                raise ValidationError(f"cannot start in phase {self.phase}")
            engine = Engine(self.config)
            pacer = Pacer(engine.dt_min, self.speed)
            self.runner = EngineRunner(engine, pacer, self.hub,
                                       self._finish, self._fail)
            self.phase = PHASE_RUNNING
            self._publish_phase()
            self.runner.start()

    def _finish(self, summary: RunSummary) -> None:
        with self.lock:
            self.phase = PHASE_FINISHED
            self.summary = summary
        self._publish_phase()
        self.hub.publish({"type": "summary", "summary": summary.to_dict()})

    def _fail(self, message: str) -> None:
        with self.lock:
            self.phase = PHASE_FINISHED
            self.error = message
        self.hub.publish({"type": "error", "req": None, "message": message})
        self._publish_phase()

    def pause(self) -> None:
        with self.lock:
            if self.phase not in (PHASE_RUNNING, PHASE_PAUSED):
                raise ValidationError("not running")
            if self.phase == PHASE_RUNNING:
                self.runner.pacer.pause()
                self.phase = PHASE_PAUSED
                self._publish_phase()

    def resume(self) -> None:
        with self.lock:
            if self.phase not in (PHASE_RUNNING, PHASE_PAUSED):
                raise ValidationError("not running")
            if self.phase == PHASE_PAUSED:
                self.runner.pacer.resume()
                self.phase = PHASE_RUNNING
                self._publish_phase()

    def set_speed(self, speed: Any) -> None:
        if not isinstance(speed, (int, float)) or isinstance(speed, bool) \
                or not speed > 0:
            raise ValidationError("speed must be positive")
        with self.lock:
            self.speed = float(speed)
            if self.runner is not None and self.phase in (PHASE_RUNNING, PHASE_PAUSED):
                self.runner.pacer.set_speed(float(speed))

    def override(self, cmd: OverrideCommand) -> None:
        with self.lock:
            if self.phase not in (PHASE_RUNNING, PHASE_PAUSED):
                raise ValidationError("not running")
            self.runner.commands.put(cmd)

    def configure(self, doc: dict[str, Any]) -> None:
        with self.lock:
            if self.phase != PHASE_CONFIGURED:
                raise ValidationError(f"cannot configure in phase {self.phase}")
            self.config = config_from_dict(doc)
            self.doc = doc

    def reset(self) -> None:
        with self.lock:
            runner = self.runner
            self.runner = None
            self.summary = None
            self.error = None
            self.phase = PHASE_CONFIGURED
        if runner is not None:
            runner.pacer.stop()
            runner.join(timeout=10)
        self._publish_phase()

    def shutdown(self) -> None:
        runner = self.runner
        if runner is not None:
            runner.pacer.stop()
            runner.join(timeout=10)

    # -- wire dispatch -----------------------------------------------------

    def handle(self, msg: dict[str, Any]) -> dict[str, Any]:
        req = msg.get("req")
        mtype = msg.get("type")
        try:
            if mtype == "configure":
                self.configure(msg.get("config"))
            elif mtype == "start":
                if "speed" in msg:
                    self.set_speed(msg["speed"])
                self.start()
            elif mtype == "pause":
                self.pause()
            elif mtype == "resume":
                self.resume()
            elif mtype == "set_speed":
                self.set_speed(msg.get("speed"))
            elif mtype == "override":
                cmd = OverrideCommand.from_dict(msg.get("command"))
                self.override(cmd)
            elif mtype == "reset":
                self.reset()
            else:
                return {"type": "error", "req": req,
                        "message": f"unknown message type {mtype!r}"}
        except ValidationError as exc:
            return {"type": "error", "req": req, "message": str(exc)}
        return {"type": "ack", "req": req}

    # -- join/export helpers -----------------------------------------------

    def join_messages(self) -> list[dict[str, Any]]:
        """Messages a new subscriber sees before the live stream."""
        with self.lock:
            msgs: list[dict[str, Any]] = [{"type": "phase", "phase": self.phase}]
            if self.runner is not None and self.runner.engine.frames:
                msgs.append({"type": "telemetry",
                             "frame": self.runner.engine.frames[-1].to_dict()})
            if self.summary is not None:
                msgs.append({"type": "summary", "summary": self.summary.to_dict()})
            return msgs

    def command_log_text(self) -> str:
        with self.lock:
            if self.runner is None:
                return ""
            return export.command_log_text(self.runner.engine.command_history())

    def export_csv(self) -> str:
        with self.lock:
            if self.phase != PHASE_FINISHED or self.summary is None:
                raise ValidationError("run incomplete")
            return export.csv_text(self.runner.engine.frames)

    def summary_doc(self) -> dict[str, Any]:
        with self.lock:
            if self.phase != PHASE_FINISHED or self.summary is None:
                raise ValidationError("run incomplete")
            return self.summary.to_dict()


class SessionRegistry:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def create(self, doc: dict[str, Any], config: SimConfig, hub: Hub) -> Session:
        session = Session(secrets.token_hex(16), doc, config, hub)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def all(self) -> list[Session]:
        with self._lock:
            return list(self._sessions.values())


# ---------------------------------------------------------------------------
# HTTP models
# ---------------------------------------------------------------------------

class HealthOut(BaseModel):
    status: str


class SessionOut(BaseModel):
    session_id: str
    phase: str


class SessionInfoOut(BaseModel):
    session_id: str
    phase: str
    speed: float
    tick: int | None = None
    error: str | None = None


# ---------------------------------------------------------------------------
# App factory
# ---------------------------------------------------------------------------

def create_app(template_doc: dict[str, Any] | None = None,
               static_dir: str | Path | None = None,
               default_speed: float = DEFAULT_SPEED_MIN_PER_S) -> FastAPI:
    """Build the service around a default config template.

    `template_doc` is used when POST /sessions arrives with an empty body;
    None falls back to the bundled default document. `static_dir`, when it
    exists, is served at / (the dashboard build). `default_speed` paces new
    sessions until a client overrides it.
    """
    registry = SessionRegistry()
    state: dict[str, Any] = {}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        state["hub_loop"] = asyncio.get_running_loop()
        yield
        for session in registry.all():
            session.shutdown()

    app = FastAPI(title="flexlab", lifespan=lifespan)

    def template() -> dict[str, Any]:
        return template_doc if template_doc is not None else default_config_document()

    @app.get("/healthz", response_model=HealthOut)
    def healthz() -> HealthOut:
        return HealthOut(status="ok")

    @app.post("/sessions", response_model=SessionOut, status_code=201)
    def create_session(doc: dict[str, Any] | None = None) -> Any:
        if not doc:
            doc = template()
        try:
            config = config_from_dict(doc)
        except ValidationError as exc:
            return JSONResponse(status_code=422,
                                content={"violations": exc.violations})
        session = registry.create(doc, config, Hub(state["hub_loop"]))
        session.speed = default_speed
        log.info("session %s created", session.id)
        return SessionOut(session_id=session.id, phase=session.phase)

    def _lookup(session_id: str) -> Session | None:
        return registry.get(session_id)

    @app.get("/sessions/{session_id}", response_model=SessionInfoOut)
    def session_info(session_id: str) -> Any:
        session = _lookup(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        tick = session.runner.engine.next_tick if session.runner else None
        return SessionInfoOut(session_id=session.id, phase=session.phase,
                              speed=session.speed, tick=tick, error=session.error)

    @app.get("/sessions/{session_id}/export.csv")
    def export_csv(session_id: str) -> Any:
        session = _lookup(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        try:
            text = session.export_csv()
        except ValidationError as exc:
            return JSONResponse(status_code=409, content={"detail": str(exc)})
        return PlainTextResponse(text, media_type="text/csv")

    @app.get("/sessions/{session_id}/summary.json")
    def summary_json(session_id: str) -> Any:
        session = _lookup(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        try:
            doc = session.summary_doc()
        except ValidationError as exc:
            return JSONResponse(status_code=409, content={"detail": str(exc)})
        return JSONResponse(content=doc)

    @app.get("/sessions/{session_id}/commands.ndjson")
    def commands_ndjson(session_id: str) -> Any:
        session = _lookup(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        return PlainTextResponse(session.command_log_text(),
                                 media_type="application/x-ndjson")

    @app.websocket("/ws/session/{session_id}")
    async def session_ws(websocket: WebSocket, session_id: str) -> None:
        await websocket.accept()
        session = registry.get(session_id)
        if session is None:
            await websocket.send_text(_wire(
                {"type": "error", "req": None, "message": "unknown session"}))
            await websocket.close()
            return
        sub = _Subscriber()
        # Join atomically with respect to fan-out: both run on the loop.
        for msg in session.join_messages():
            sub.push(msg)
        session.hub.subscribe(sub)
        sender = asyncio.create_task(_send_loop(websocket, sub))
        try:
            while True:
                text = await websocket.receive_text()
                sub.push(_handle_text(session, text))
        except WebSocketDisconnect:
            pass
        finally:
            session.hub.unsubscribe(sub)
            sender.cancel()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="dashboard")

    return app


def _handle_text(session: Session, text: str) -> dict[str, Any]:
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        return {"type": "error", "req": None,
                "message": f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"}
    if not isinstance(msg, dict):
        return {"type": "error", "req": None, "message": "message must be an object"}
    return session.handle(msg)


async def _send_loop(websocket: WebSocket, sub: _Subscriber) -> None:
    """Single writer per connection; closes the stream after a summary."""
    last_tick = -1
    try:
        while True:
            await sub.wake.wait()
            sub.wake.clear()
            while sub.queue:
                msg = sub.queue.popleft()
                if msg["type"] == "telemetry":
                    tick = msg["frame"]["tick"]
                    if tick <= last_tick:   # duplicate of the join snapshot
                        continue
                    last_tick = tick
                await websocket.send_text(_wire(msg))
                if msg["type"] == "summary":
                    await websocket.close()
                    return
    except asyncio.CancelledError:
        raise
    except Exception:   # connection gone; receiver handles cleanup
        pass
