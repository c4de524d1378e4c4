"""HTTP service hosting design runs for the dashboard.

Endpoints (JSON bodies unless noted):

    GET  /health                  liveness probe
    GET  /schema                  machine-readable API description
    POST /runs                    body: run config -> {"run_id"}
    GET  /runs                    -> {"runs": [handle, ...]}
    GET  /runs/{id}               -> summary + config
    GET  /runs/{id}/events        SSE stream: full replay then live tail
    POST /runs/{id}/message       {"text", "idempotency_key"} -> ack
    POST /runs/{id}/interrupt     -> ack

Every run executes on its own worker thread and owns a directory under
``data_dir``; the event stream is a fold over that run's append-only
log, so a late subscriber sees exactly what an early one saw.  Steering
POSTs are idempotency-keyed: retries of the same key queue the message
once.  An optional static bearer token guards all endpoints.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .agent.loop import AgentRun
from .agent.runlog import EVENTS_FILE, RunLogView, load_run_log
from .agent.types import RunConfig, TERMINAL_STATUSES


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


class _RunEntry:
    def __init__(self, run_id: str, run: AgentRun | None, view: RunLogView | None = None):
        self.run_id = run_id
        self.run = run  # None for runs restored from disk
        self.frozen_view = view
        self.thread: threading.Thread | None = None

    @property
    def status(self) -> str:
        if self.run is not None:
            return self.run.status
        return self.frozen_view.status

    def view(self) -> RunLogView:
        if self.run is not None:
            return self.run.view()
        return self.frozen_view

    def handle(self) -> dict:
        view = self.view()
        best_index, best_rmse = view.best()
        return {"run_id": self.run_id, "status": self.status,
                "iterations": len(view.iteration_records()),
                "best_iteration": best_index, "best_test_RMSE": best_rmse}


class RunRegistry:
    """Owns all runs, their worker threads and steering idempotency."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self.entries: dict = {}
        self.order: list = []
        self._steering_keys: dict = {}
        self._lock = threading.Lock()
        self._restore()

    def _restore(self):
        for name in sorted(os.listdir(self.data_dir)):
            run_dir = os.path.join(self.data_dir, name)
            if not os.path.isfile(os.path.join(run_dir, EVENTS_FILE)):
                continue
            view = load_run_log(run_dir)
            if view.status not in TERMINAL_STATUSES:
                # The worker died with the service; the run is gone for good.
                with open(os.path.join(run_dir, EVENTS_FILE), "a",
                          encoding="utf-8") as fh:
                    event = {"seq": len(view.events), "ts": "", "type": "status",
                             "status": "aborted"}
                    fh.write(json.dumps(event) + "\n")
                view = load_run_log(run_dir)
            self.entries[name] = _RunEntry(name, None, view)
            self.order.append(name)

    def create_run(self, raw_config: dict) -> str:
        try:
            config = RunConfig.from_dict(raw_config)
        except (KeyError, ValueError, TypeError) as exc:
            raise ServiceError(400, f"bad run config: {exc}") from None
        run_id = uuid.uuid4().hex[:12]
        run = AgentRun(config, run_id=run_id,
                       log_dir=os.path.join(self.data_dir, run_id))
        entry = _RunEntry(run_id, run)
        entry.thread = threading.Thread(target=run.run, daemon=True,
                                        name=f"run-{run_id}")
        with self._lock:
            self.entries[run_id] = entry
            self.order.append(run_id)
        entry.thread.start()
        return run_id

    def get(self, run_id: str) -> _RunEntry:
        entry = self.entries.get(run_id)
        if entry is None:
            raise ServiceError(404, f"no run {run_id!r}")
        return entry

    def handles(self) -> list:
        return [self.entries[run_id].handle() for run_id in self.order]

    def steer(self, run_id: str, text: str, idempotency_key: str | None) -> dict:
        entry = self.get(run_id)
        with self._lock:
            if idempotency_key:
                cached = self._steering_keys.get((run_id, idempotency_key))
                if cached is not None:
                    return cached
            if entry.status in TERMINAL_STATUSES:
                raise ServiceError(409, f"run {run_id} is {entry.status}; "
                                        "no further steering possible")
            if entry.run is None:
                raise ServiceError(409, f"run {run_id} is not live")
            try:
                entry.run.inject_steering(text)
            except ValueError as exc:
                raise ServiceError(400, str(exc)) from None
            ack = {"ok": True, "run_id": run_id, "queued": True}
            if idempotency_key:
                self._steering_keys[(run_id, idempotency_key)] = ack
            return ack

    def interrupt(self, run_id: str) -> dict:
        entry = self.get(run_id)
        if entry.run is None or entry.status in TERMINAL_STATUSES:
            raise ServiceError(409, f"run {run_id} is {entry.status}")
        entry.run.interrupt()
        return {"ok": True, "run_id": run_id}

    def event_stream(self, run_id: str, after: int):
        """Yield events with seq > after: full replay, then live tail."""
        entry = self.get(run_id)
        cursor = after + 1
        while True:
            # Read the flag before snapshotting: the terminal status event is
            # appended before the flag flips, so a terminal snapshot is final.
            finished = entry.status in TERMINAL_STATUSES
            if entry.run is not None:
                events = entry.run.log.snapshot()
            else:
                events = entry.view().events
            while cursor < len(events):
                yield events[cursor]
                cursor += 1
            if finished:
                return
            if entry.run is not None:
                entry.run.log.wait_for(cursor, timeout=1.0)
            else:  # pragma: no cover - restored runs are always terminal
                return


API_SCHEMA = {
    "run_config": {
        "architecture": "simple | quanv | full_quantum",
        "budget": "int >= 1: design iterations the agent may spend",
        "prompt": "initial user message",
        "endpoint": {"kind": "http | scripted",
                     "base_url": "http endpoints only",
                     "model": "model name",
                     "api_key_env": "environment variable holding the credential",
                     "temperature": "float",
                     "turns": "scripted endpoints only: playlist of assistant turns"},
        "master_seed": "int: seeds data, initialization and shuffling",
        "max_repair_attempts": "int, default 3",
        "steering_wait_s": "float: pause after each tool result for steering",
    },
    "endpoints": {
        "POST /runs": "create a run; body is a run_config",
        "GET /runs": "list run handles",
        "GET /runs/{id}": "summary + config",
        "GET /runs/{id}/events": "SSE stream; supports Last-Event-ID replay",
        "POST /runs/{id}/message": "{text, idempotency_key}: queue steering",
        "POST /runs/{id}/interrupt": "abort the run",
    },
    "event_types": ["run_config", "message", "iteration", "steering", "status"],
}


def _make_handler(registry: RunRegistry, token: str | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        # -- plumbing -------------------------------------------------------

        def _authorized(self) -> bool:
            if token is None:
                return True
            return self.headers.get("Authorization") == f"Bearer {token}"

        def _json(self, status: int, payload: dict):
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b"{}"
            try:
                payload = json.loads(raw.decode("utf-8"))
            except json.JSONDecodeError as exc:
                raise ServiceError(400, f"body is not valid JSON: {exc.msg}") from None
            if not isinstance(payload, dict):
                raise ServiceError(400, "body must be a JSON object")
            return payload

        def _route(self):
            path = self.path.split("?")[0].rstrip("/")
            return [p for p in path.split("/") if p]

        # -- verbs ----------------------------------------------------------

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers",
                             "Content-Type, Authorization, Last-Event-ID")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            try:
                if not self._authorized():
                    raise ServiceError(401, "missing or wrong bearer token")
                parts = self._route()
                if parts == ["health"]:
                    return self._json(200, {"status": "ok"})
                if parts == ["schema"]:
                    return self._json(200, API_SCHEMA)
                if parts == ["runs"]:
                    return self._json(200, {"runs": registry.handles()})
                if len(parts) == 2 and parts[0] == "runs":
                    entry = registry.get(parts[1])
                    return self._json(200, entry.view().summary())
                if len(parts) == 3 and parts[0] == "runs" and parts[2] == "events":
                    return self._stream_events(parts[1])
                raise ServiceError(404, f"no route {self.path!r}")
            except ServiceError as exc:
                self._json(exc.status, {"error": exc.message})
            except (BrokenPipeError, ConnectionResetError):
                pass

        def do_POST(self):
            try:
                if not self._authorized():
                    raise ServiceError(401, "missing or wrong bearer token")
                parts = self._route()
                if parts == ["runs"]:
                    run_id = registry.create_run(self._read_body())
                    return self._json(201, {"run_id": run_id})
                if len(parts) == 3 and parts[0] == "runs" and parts[2] == "message":
                    body = self._read_body()
                    ack = registry.steer(parts[1], body.get("text", ""),
                                         body.get("idempotency_key"))
                    return self._json(200, ack)
                if len(parts) == 3 and parts[0] == "runs" and parts[2] == "interrupt":
                    return self._json(200, registry.interrupt(parts[1]))
                raise ServiceError(404, f"no route {self.path!r}")
            except ServiceError as exc:
                self._json(exc.status, {"error": exc.message})
            except (BrokenPipeError, ConnectionResetError):
                pass

        def _stream_events(self, run_id: str):
            after = -1
            last_id = self.headers.get("Last-Event-ID")
            if last_id is not None:
                after = int(last_id)
            elif "after=" in self.path:
                after = int(self.path.split("after=")[1].split("&")[0])
            registry.get(run_id)  # 404 before headers go out
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Connection", "close")
            self.end_headers()
            try:
                for event in registry.event_stream(run_id, after):
                    frame = (f"id: {event['seq']}\n"
                             f"event: {event['type']}\n"
                             f"data: {json.dumps(event)}\n\n")
                    self.wfile.write(frame.encode())
                    self.wfile.flush()
                self.wfile.write(b"event: end\ndata: {}\n\n")
                self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError):
                pass

    return Handler


def serve(address: str, data_dir: str, token: str | None = None,
          start: bool = True):
    """Run the service; ``start=False`` returns the server for embedding."""
    host, _, port = address.partition(":")
    registry = RunRegistry(data_dir)
    server = ThreadingHTTPServer((host or "127.0.0.1", int(port or 8000)),
                                 _make_handler(registry, token))
    server.registry = registry
    if start:
        try:
            server.serve_forever()
        finally:
            server.server_close()
    return server
