import io
import json
import threading
import urllib.request

import pytest

from pdbisim.service import build_session, make_server, phase_hint, play_stdio
from pdbisim.game import GamePosition
from pdbisim.pds import config

E1 = [["A", "AA"]]
E2 = [["A", "AB"], ["B", "BA"]]


def options(**kw):
    base = {"instance": E1, "order": 1, "style": "eps", "role": "attacker",
            "opponent": "forcing", "oracle": "1", "seed": 0, "max_rounds": 50}
    base.update(kw)
    return base


def test_attacker_session_starts_on_human_turn():
    gs = build_session(options())
    view = gs.view()
    assert view["yourTurn"] and view["turn"] == "attacker"
    assert view["phase"] == "generating"
    assert view["position"]["left"]["control"] == "q0"
    assert view["legalMoves"]
    assert any(m["framed"] for m in view["legalMoves"])
    assert any(not m["framed"] for m in view["legalMoves"])


def test_framed_move_gets_punished_into_equality():
    gs = build_session(options())
    view = gs.view()
    framed = next(m for m in view["legalMoves"]
                  if m["framed"] and m["action"] == "g")
    gs.apply_human_move(_move(framed))
    after = gs.view()
    assert after["position"]["left"] == after["position"]["right"]


def test_defender_session_shows_pending_engine_move():
    gs = build_session(options(instance=E2, role="defender", opponent="switch", oracle=None))
    view = gs.view()
    assert view["turn"] == "defender" and view["yourTurn"]
    assert view["pending"] is not None
    assert all(m["action"] == view["pending"]["action"] for m in view["legalMoves"])


def test_defender_loses_to_switch_attacker_on_bad_choices():
    gs = build_session(options(instance=[["A", "AAB"], ["AB", "BA"]], role="defender",
                               opponent="switch", oracle=None))
    guard = 0
    while gs.view()["result"] is None and guard < 60:
        view = gs.view()
        gs.apply_human_move(_move(view["legalMoves"][0]))
        guard += 1
    result = gs.view()["result"]
    assert result is not None
    assert result["winner"] == "attacker"


def test_round_cap_reports_a_result():
    gs = build_session(options(max_rounds=2, opponent="random", oracle=None))
    while gs.view()["result"] is None:
        gs.apply_human_move(_move(gs.view()["legalMoves"][0]))
    assert gs.view()["result"]["reason"] in ("round-cap", "defender-stuck", "attacker-stuck")


def test_phase_hint_transitions():
    assert phase_hint(GamePosition(config("q0", ["I1"]), config("q'0", ["I1"]))) == "generating"
    assert phase_hint(GamePosition(config("r", ["I1"]), config("r'", ["I1"]))) == "switching"
    assert phase_hint(GamePosition(config("q_u", ["I1"]), config("z", ["I1"]))) == "verification"


def _move(m: dict) -> "Move":
    from pdbisim.serialize import move_from_json

    return move_from_json(m)


# --- HTTP --------------------------------------------------------------------

@pytest.fixture(scope="module")
def server():
    httpd = make_server(0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


def _req(method, url, payload=None):
    data = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            body = resp.read()
            return resp.status, json.loads(body) if body else None
    except urllib.error.HTTPError as err:
        body = err.read()
        return err.code, json.loads(body) if body else None


def test_http_session_lifecycle(server):
    status, view = _req("POST", f"{server}/sessions", options())
    assert status == 201 and view["yourTurn"]
    sid = view["id"]

    status, again = _req("GET", f"{server}/sessions/{sid}")
    assert status == 200 and again["id"] == sid

    move = next(m for m in view["legalMoves"] if not m["framed"] and m["action"] == "g")
    status, after = _req("POST", f"{server}/sessions/{sid}/moves", {"move": move})
    assert status == 200
    assert after["round"] == 1  # engine already responded

    # illegal: replaying the same attacker move from the new position
    status, err = _req("POST", f"{server}/sessions/{sid}/moves", {"move": move})
    assert status == 409 and "error" in err

    status, fork = _req("POST", f"{server}/sessions/{sid}/fork", {"round": 0})
    assert status == 201 and fork["id"] != sid
    assert fork["position"] == view["position"]

    status, _ = _req("DELETE", f"{server}/sessions/{sid}")
    assert status == 204
    status, _ = _req("GET", f"{server}/sessions/{sid}")
    assert status == 404


def test_http_rejects_malformed_requests(server):
    status, err = _req("POST", f"{server}/sessions", {"instance": [["BA", "A"]]})
    assert status == 400 and "error" in err
    status, _ = _req("GET", f"{server}/sessions/doesnotexist1")
    assert status == 404
    # malformed move JSON
    status, view = _req("POST", f"{server}/sessions", options())
    sid = view["id"]
    status, err = _req("POST", f"{server}/sessions/{sid}/moves", {"move": {"side": "up"}})
    assert status == 400


def test_http_fork_beyond_history_is_rejected(server):
    status, view = _req("POST", f"{server}/sessions", options())
    status, err = _req("POST", f"{server}/sessions/{view['id']}/fork", {"round": 99})
    assert status == 409


# --- stdio --------------------------------------------------------------------

def test_stdio_play_scripted_round():
    gs_opts = options()
    # first ask: the non-framed g move; then quit
    probe = build_session(gs_opts)
    legal = probe.view()["legalMoves"]
    move = next(m for m in legal if not m["framed"] and m["action"] == "g")
    stdin = io.StringIO(json.dumps({"type": "move", "move": move}) + "\n"
                        + json.dumps({"type": "quit"}) + "\n")
    stdout = io.StringIO()
    play_stdio(gs_opts, stdin, stdout)
    lines = [json.loads(line) for line in stdout.getvalue().splitlines()]
    kinds = [l["type"] for l in lines]
    assert kinds[:3] == ["state", "moves", "your-turn"]
    assert "state" in kinds[3:]
    states = [l for l in lines if l["type"] == "state"]
    assert states[1]["round"] == 1


def test_stdio_illegal_move_reports_error():
    gs_opts = options()
    bogus = {"side": "left", "action": "zzz",
             "target": {"control": "q0", "stacks": [["I1", "⊥"]]}}
    stdin = io.StringIO(json.dumps({"move": bogus}) + "\n")
    stdout = io.StringIO()
    play_stdio(gs_opts, stdin, stdout)
    lines = [json.loads(line) for line in stdout.getvalue().splitlines()]
    assert any(l["type"] == "error" for l in lines)


def test_every_offered_move_is_accepted_and_others_rejected():
    import pytest as _pytest

    from pdbisim.errors import IllegalMoveError
    from pdbisim.serialize import move_from_json

    gs = build_session(options())
    view = gs.view()
    for legal in view["legalMoves"]:
        gs.session.step(move_from_json(legal))  # accepted on the untouched session
    bogus = dict(view["legalMoves"][0])
    bogus["action"] = "zzz"
    with _pytest.raises(IllegalMoveError):
        gs.session.step(move_from_json(bogus))


def test_concurrent_moves_on_one_session_are_serialized(server):
    import concurrent.futures

    status, view = _req("POST", f"{server}/sessions", options(opponent="random", oracle=None))
    assert status == 201
    sid = view["id"]
    move = {"move": view["legalMoves"][0]}

    def fire(_):
        return _req("POST", f"{server}/sessions/{sid}/moves", move)[0]

    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        codes = sorted(pool.map(fire, range(8)))
    # exactly one submission lands; the rest are rejected as illegal
    assert codes.count(200) == 1
    assert set(codes) <= {200, 409}
    status, after = _req("GET", f"{server}/sessions/{sid}")
    assert status == 200 and after["round"] == 1
