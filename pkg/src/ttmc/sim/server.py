"""HTTP+JSON session service for the browser frontend.

Routes (payloads are the same canonical JSON used by trace files):
  POST /sessions                 {"seed"?: int} -> {"id", "state"}
  GET  /sessions/:id/state
  GET  /sessions/:id/enabled
  POST /sessions/:id/fire        {"transition": {...}, "choice"?: [...]}
  POST /sessions/:id/undo        {"k": int}
  GET  /sessions/:id/trace       (text/plain trace file)
  POST /sessions/:id/trace       (raw trace text; prefix replayed, cycle pending)
  POST /sessions/:id/next        fire the next pending trace step
  GET  /sessions/:id/events      (SSE push: one state payload per mutation)
  GET  /model                    model summary (name, digest, properties)

One command at a time per session: a per-session lock serializes mutations.
"""

from __future__ import annotations

import json
import queue
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ttmc import __version__
from ttmc.diagnostics import TtmError
from ttmc.elaborate import model as fm
from ttmc.elaborate.dump import model_digest
from ttmc.lts import semantics as sem
from ttmc.sim import session as ss
from ttmc.sim import trace as tr


def _canon(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode()


class SessionBox:
    def __init__(self, sid: str, session: ss.Session):
        self.id = sid
        self.session = session
        self.lock = threading.Lock()
        self.listeners: list[queue.Queue] = []

    def notify(self, payload: dict):
        for q in list(self.listeners):
            q.put(payload)


class SimulatorService:
    def __init__(self, model: fm.FlatModel, name: str = "model",
                 ui_dir: str | None = None):
        self.model = model
        self.name = name
        self.ui_dir = ui_dir
        self.digest = model_digest(model)
        self.sessions: dict[str, SessionBox] = {}
        self.lock = threading.Lock()
        self._counter = 0

    # ── session plumbing ───────────────────────────────────────

    def create(self, seed: int) -> SessionBox:
        with self.lock:
            self._counter += 1
            sid = f"s{self._counter}"
            box = SessionBox(sid, ss.session_new(self.model, seed))
            self.sessions[sid] = box
            return box

    def box(self, sid: str) -> SessionBox | None:
        return self.sessions.get(sid)

    # ── payloads ───────────────────────────────────────────────

    def state_payload(self, box: SessionBox) -> dict:
        s = box.session
        return {
            "session": box.id,
            "step": len(s.steps),
            "digest": s.digest(),
            "configuration": sem.config_to_json(self.model, s.current),
            "pending": len(s.pending),
            "cycle_start": s.cycle_start,
        }

    def enabled_payload(self, box: SessionBox) -> dict:
        entries = []
        for name, rendering in ss.session_enabled(box.session):
            succ_count = 1
            if name.kind == "event":
                succ = ss._successors_for(box.session, name)
                succ_count = len(succ)
            urgent = False
            if name.kind == "hash":
                ev = self.model.event(name.event)
                from ttmc.lts.engine import engine_for

                eng = engine_for(self.model)
                ci = eng.clock_index.get((name.event, _encode_fair(self.model, ev, name.fair)))
                if ci is not None and ev.upper is not None:
                    urgent = box.session.current.c[ci] == ev.upper
            entries.append(
                {
                    "transition": name.to_json(self.model),
                    "label": rendering,
                    "successors": succ_count,
                    "urgent": urgent,
                }
            )
        return {"session": box.id, "transitions": entries}


def _encode_fair(model, ev, fair):
    out = []
    for (_, ty), v in zip(ev.f_ind, fair):
        out.append(model.symbol_ids[v] if isinstance(ty, fm.TEnum) else v)
    return tuple(out)


def make_handler(service: SimulatorService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        server_version = f"ttmc/{__version__}"

        def log_message(self, *args):  # quiet by default
            pass

        # ── helpers ────────────────────────────────────────────

        def _send(self, code: int, body: bytes, ctype: str = "application/json"):
            self.send_response(code)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _json(self, code: int, obj):
            self._send(code, _canon(obj))

        def _error(self, code: int, message: str, tag: str = "error"):
            self._json(code, {"error": tag, "message": message})

        def _body(self):
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if not raw:
                return {}
            try:
                return json.loads(raw)
            except json.JSONDecodeError:
                return None

        def _route(self):
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            return parts

        # ── verbs ──────────────────────────────────────────────

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            parts = self._route()
            try:
                if parts == ["model"]:
                    self._json(
                        200,
                        {
                            "name": service.name,
                            "digest": service.digest,
                            "properties": [n for n, _, _ in service.model.properties],
                            "version": __version__,
                        },
                    )
                    return
                if len(parts) == 3 and parts[0] == "sessions":
                    box = service.box(parts[1])
                    if box is None:
                        self._error(404, f"no session {parts[1]!r}", "NotFound")
                        return
                    if parts[2] == "state":
                        self._json(200, service.state_payload(box))
                        return
                    if parts[2] == "enabled":
                        self._json(200, service.enabled_payload(box))
                        return
                    if parts[2] == "trace":
                        text = tr.trace_export(box.session)
                        self._send(200, text.encode(), "text/plain; charset=utf-8")
                        return
                    if parts[2] == "events":
                        self._sse(box)
                        return
                if service.ui_dir and (not parts or parts[0] != "sessions"):
                    self._static(parts)
                    return
                self._error(404, f"unknown path {self.path!r}", "NotFound")
            except TtmError as err:
                self._error(422, err.diagnostics[0].render(), err.code)
            except BrokenPipeError:
                pass

        def do_POST(self):
            parts = self._route()
            body = self._body()
            if body is None:
                self._error(400, "invalid JSON body", "BadRequest")
                return
            try:
                if parts == ["sessions"]:
                    box = service.create(int(body.get("seed") or 0))
                    self._json(
                        201, {"id": box.id, "state": service.state_payload(box)}
                    )
                    return
                if len(parts) == 3 and parts[0] == "sessions":
                    box = service.box(parts[1])
                    if box is None:
                        self._error(404, f"no session {parts[1]!r}", "NotFound")
                        return
                    handler = {
                        "fire": self._fire,
                        "undo": self._undo,
                        "trace": self._import_trace,
                        "next": self._next,
                    }.get(parts[2])
                    if handler is not None:
                        handler(box, body)
                        return
                self._error(404, f"unknown path {self.path!r}", "NotFound")
            except TtmError as err:
                self._error(422, err.diagnostics[0].render(), err.code)
            except BrokenPipeError:
                pass

        # ── mutations (serialized per session) ─────────────────

        def _mutate(self, box: SessionBox, fn):
            with box.lock:
                box.session = fn(box.session)
                payload = service.state_payload(box)
            box.notify(payload)
            self._json(200, payload)

        def _fire(self, box: SessionBox, body):
            tname = tr._parse_transition(service.model, body.get("transition") or {})
            choice = body.get("choice")
            choice = tuple(choice) if choice is not None else None
            self._mutate(box, lambda s: ss.session_fire(s, tname, choice))

        def _undo(self, box: SessionBox, body):
            k = int(body.get("k") or 1)
            self._mutate(box, lambda s: ss.session_undo(s, k))

        def _next(self, box: SessionBox, body):
            self._mutate(box, lambda s: tr.fire_pending(s))

        def _import_trace(self, box: SessionBox, body):
            text = body.get("text")
            if not isinstance(text, str):
                self._error(400, "trace import needs {'text': ...}", "BadRequest")
                return
            self._mutate(
                box,
                lambda s: tr.trace_import(service.model, text, seed=s.seed),
            )

        # ── push channel ───────────────────────────────────────

        def _sse(self, box: SessionBox):
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            q: queue.Queue = queue.Queue()
            box.listeners.append(q)
            try:
                hello = service.state_payload(box)
                self.wfile.write(
                    b"data: " + _canon(hello).strip() + b"\n\n"
                )
                self.wfile.flush()
                while True:
                    try:
                        payload = q.get(timeout=15)
                    except queue.Empty:
                        self.wfile.write(b": keepalive\n\n")
                        self.wfile.flush()
                        continue
                    self.wfile.write(b"data: " + _canon(payload).strip() + b"\n\n")
                    self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError):
                pass
            finally:
                if q in box.listeners:
                    box.listeners.remove(q)

        # ── static frontend files ──────────────────────────────

        def _static(self, parts):
            import os

            rel = "/".join(parts) or "index.html"
            path = os.path.normpath(os.path.join(service.ui_dir, rel))
            if not path.startswith(os.path.abspath(service.ui_dir)):
                self._error(404, "not found", "NotFound")
                return
            if not os.path.isfile(path):
                self._error(404, f"no file {rel!r}", "NotFound")
                return
            ctype = {
                ".html": "text/html; charset=utf-8",
                ".js": "text/javascript; charset=utf-8",
                ".css": "text/css; charset=utf-8",
            }.get(os.path.splitext(path)[1], "application/octet-stream")
            with open(path, "rb") as fh:
                self._send(200, fh.read(), ctype)

    return Handler


def serve(model: fm.FlatModel, port: int, name: str = "model",
          ui_dir: str | None = None, announce=print) -> ThreadingHTTPServer:
    import os

    if ui_dir is not None:
        ui_dir = os.path.abspath(ui_dir)
    service = SimulatorService(model, name=name, ui_dir=ui_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(service))
    server.service = service
    announce(f"serving {name} on http://127.0.0.1:{server.server_address[1]}")
    return server
