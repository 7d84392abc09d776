"""The HTTP session service."""

from __future__ import annotations

import json
import threading
import urllib.request

import pytest

from ttmc.sim.server import serve
from ttmc.sim import session_new, session_fire, session_enabled, trace_export


@pytest.fixture(scope="module")
def server(request):
    from tests.conftest import flat_model

    model = flat_model("train_abstract")
    srv = serve(model, 0, name="train_abstract", announce=lambda s: None)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def call(server, method, path, body=None):
    port = server.server_address[1]
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(
        f"http://127.0.0.1:{port}{path}", data=data, method=method,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req) as resp:
            raw = resp.read().decode()
            if resp.headers.get_content_type() == "application/json":
                return resp.status, json.loads(raw)
            return resp.status, raw
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode())


def test_model_endpoint(server):
    status, body = call(server, "GET", "/model")
    assert status == 200
    assert body["properties"] == ["safety", "liveness"]


def test_session_lifecycle(server):
    status, made = call(server, "POST", "/sessions", {"seed": 9})
    assert status == 201
    sid = made["id"]
    assert made["state"]["step"] == 0

    status, en = call(server, "GET", f"/sessions/{sid}/enabled")
    assert status == 200
    first = en["transitions"][0]
    assert first["label"] == "arrive(T1)#"

    status, st = call(server, "POST", f"/sessions/{sid}/fire",
                      {"transition": first["transition"]})
    assert status == 200 and st["step"] == 1
    digest_after_fire = st["digest"]

    status, st = call(server, "POST", f"/sessions/{sid}/undo", {"k": 1})
    assert status == 200 and st["step"] == 0

    status, st = call(server, "POST", f"/sessions/{sid}/fire",
                      {"transition": first["transition"]})
    assert st["digest"] == digest_after_fire


def test_fire_not_enabled_is_422(server):
    _, made = call(server, "POST", "/sessions", {})
    sid = made["id"]
    status, body = call(
        server, "POST", f"/sessions/{sid}/fire",
        {"transition": {"kind": "event", "event": "move_out",
                        "fair": ["T1"], "demonic": []}},
    )
    assert status == 422
    assert body["error"] == "NotEnabled"


def test_unknown_session_404(server):
    status, body = call(server, "GET", "/sessions/zz/state")
    assert status == 404


def test_trace_export_matches_inprocess(server):
    from tests.conftest import flat_model

    model = flat_model("train_abstract")
    _, made = call(server, "POST", "/sessions", {"seed": 4})
    sid = made["id"]
    local = session_new(model, 4)
    for _ in range(10):
        _, en = call(server, "GET", f"/sessions/{sid}/enabled")
        entry = en["transitions"][0]
        call(server, "POST", f"/sessions/{sid}/fire",
             {"transition": entry["transition"]})
        local = session_fire(local, session_enabled(local)[0][0])
    _, remote_trace = call(server, "GET", f"/sessions/{sid}/trace")
    assert remote_trace == trace_export(local)


def test_trace_import_roundtrip(server):
    from tests.conftest import flat_model
    from ttmc.sim import session_random_walk

    model = flat_model("train_abstract")
    walked = session_random_walk(session_new(model, 2), 12)
    text = trace_export(walked)
    _, made = call(server, "POST", "/sessions", {})
    sid = made["id"]
    status, st = call(server, "POST", f"/sessions/{sid}/trace", {"text": text})
    assert status == 200
    assert st["digest"] == walked.digest()


def test_sse_pushes_state_after_fire(server):
    port = server.server_address[1]
    _, made = call(server, "POST", "/sessions", {})
    sid = made["id"]
    req = urllib.request.Request(f"http://127.0.0.1:{port}/sessions/{sid}/events")
    stream = urllib.request.urlopen(req, timeout=5)

    def read_event():
        payload = []
        while True:
            line = stream.readline().decode().strip()
            if line.startswith("data:"):
                payload.append(line[5:].strip())
            elif not line and payload:
                return json.loads(payload[0])

    hello = read_event()
    assert hello["step"] == 0
    _, en = call(server, "GET", f"/sessions/{sid}/enabled")
    call(server, "POST", f"/sessions/{sid}/fire",
         {"transition": en["transitions"][0]["transition"]})
    pushed = read_event()
    assert pushed["step"] == 1
    stream.close()
