"""Interactive game sessions over HTTP and stdio.

The server is the single authority on game rules: clients render exactly the
views it returns and submit moves back.  HTTP surface:

* ``POST /sessions`` create (body: instance, order, style, normed, role,
  opponent, oracle, seed, max_rounds) -> 201 view
* ``GET /sessions/{id}`` -> 200 view
* ``POST /sessions/{id}/moves`` (body: move) -> 200 view, 409 on illegal
* ``POST /sessions/{id}/fork`` (body: {round}) -> 201 view of the fork
* ``DELETE /sessions/{id}`` -> 204

Views carry the legal moves for the human's turn, each flagged with its
forcing-gadget status (framed), plus a phase hint and the full history.
"""

from __future__ import annotations

import dataclasses
import json
import re
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .errors import IllegalMoveError, MalformedInputError, PdbisimError, StrategyDefectError
from .game import ATTACKER, DEFENDER, GameResult, Move, Session
from .pcp import ReductionOptions, ReductionOutput, build_reduction, validate_instance
from .serialize import canonical_dumps, move_from_json, move_json, position_json
from .strategies import (
    AttackerSwitch,
    DefenderForcing,
    RandomAgent,
    SearchAgent,
    SolutionOracle,
    StrategyAgent,
)

GENERATING = {"q0", "q'0", "t"}
VERIFYING = {"q_u", "q_v", "q_pop"}


def phase_hint(position) -> str:
    controls = {position.left.control, position.right.control}
    if controls & VERIFYING:
        return "verification"
    if controls <= GENERATING or any(c.startswith("p") and c[1:].isdigit() for c in controls):
        return "generating"
    return "switching"


def make_opponent(kind: str, role: str, reduction: ReductionOutput,
                  oracle: Optional[SolutionOracle], seed: int) -> StrategyAgent:
    if kind == "forcing":
        if role != DEFENDER:
            raise MalformedInputError("the forcing strategy plays Defender")
        return DefenderForcing(reduction, oracle or SolutionOracle((), (1,)))
    if kind == "switch":
        if role != ATTACKER:
            raise MalformedInputError("the switch strategy plays Attacker")
        return AttackerSwitch(reduction)
    if kind == "random":
        return RandomAgent(role, seed)
    m = re.fullmatch(r"search:(\d+)", kind)
    if m:
        return SearchAgent(role, int(m.group(1)), seed)
    raise MalformedInputError(f"unknown opponent {kind!r}")


@dataclass
class GameSession:
    """One server-side session: a human role versus an engine agent."""

    id: str
    reduction: ReductionOutput
    lts: object
    role: str  # the human's role
    opponent_kind: str
    engine: StrategyAgent
    session: Session
    max_rounds: int
    seed: int
    oracle: Optional[SolutionOracle]
    capped: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def engine_role(self) -> str:
        return DEFENDER if self.role == ATTACKER else ATTACKER

    def run_engine(self) -> None:
        """Let the engine move until it is the human's turn or the game ends."""
        while self.session.result is None and not self.capped:
            if self.session.rounds_played >= self.max_rounds:
                self.capped = True
                break
            if self.session.turn != self.engine_role:
                break
            try:
                move = self.engine.choose(
                    self.lts, self.session.position, self.session.pending,
                    self.session.rounds_played,
                )
                self.session = self.session.step(move)
            except (IllegalMoveError, StrategyDefectError):
                self.session = dataclasses.replace(
                    self.session,
                    result=GameResult(self.role, "defect", self.session.rounds_played + 1),
                )
                break

    def apply_human_move(self, move: Move) -> None:
        if self.session.result is not None or self.capped:
            raise IllegalMoveError("game is over")
        if self.session.turn != self.role:
            raise IllegalMoveError("not your turn")
        self.session = self.session.step(move)
        self.run_engine()

    def result_view(self) -> Optional[dict]:
        if self.session.result is not None:
            r = self.session.result
            return {"winner": r.winner, "reason": r.reason, "round": r.round}
        if self.capped or self.session.rounds_played >= self.max_rounds:
            return {"winner": DEFENDER, "reason": "round-cap", "round": self.session.rounds_played}
        return None

    def view(self) -> dict:
        s = self.session
        result = self.result_view()
        your_turn = result is None and s.turn == self.role
        legal = []
        if your_turn:
            for m in s.legal_moves():
                entry = move_json(m)
                entry["framed"] = bool(
                    getattr(self.lts, "framed", lambda *a: False)(
                        s.position.side(m.side), m.action, m.target
                    )
                )
                legal.append(entry)
        return {
            "id": self.id,
            "role": self.role,
            "opponent": self.opponent_kind,
            "order": self.reduction.options.order,
            "position": position_json(s.position),
            "round": s.rounds_played,
            "turn": s.turn,
            "pending": move_json(s.pending) if s.pending else None,
            "yourTurn": your_turn,
            "legalMoves": legal,
            "phase": phase_hint(s.position),
            "result": result,
            "maxRounds": self.max_rounds,
            "history": [
                {
                    "position": position_json(pos),
                    "attack": move_json(attack),
                    "response": move_json(resp) if resp else None,
                }
                for pos, attack, resp in s.history
            ],
            "start": position_json(self.reduction.start),
        }


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, GameSession] = {}
        self._lock = threading.Lock()

    def create(self, options: dict) -> GameSession:
        gs = build_session(options)
        with self._lock:
            self._sessions[gs.id] = gs
        return gs

    def get(self, sid: str) -> Optional[GameSession]:
        with self._lock:
            return self._sessions.get(sid)

    def delete(self, sid: str) -> bool:
        with self._lock:
            return self._sessions.pop(sid, None) is not None

    def fork(self, source: GameSession, upto_round: int) -> GameSession:
        fork = GameSession(
            id=uuid.uuid4().hex[:12],
            reduction=source.reduction,
            lts=source.lts,
            role=source.role,
            opponent_kind=source.opponent_kind,
            engine=source.engine,
            session=source.session.replay(upto_round),
            max_rounds=source.max_rounds,
            seed=source.seed,
            oracle=source.oracle,
        )
        fork.run_engine()
        with self._lock:
            self._sessions[fork.id] = fork
        return fork


def build_session(options: dict) -> GameSession:
    role = options.get("role", ATTACKER)
    if role not in (ATTACKER, DEFENDER):
        raise MalformedInputError(f"unknown role {role!r}")
    inst = validate_instance(
        options["instance"] if "instance" in options else [["A", "AA"]]
    )
    ropts = ReductionOptions(
        order=int(options.get("order", 1)),
        first_order_style=options.get("style") or "eps",
        normed=bool(options.get("normed", False)),
    )
    reduction = build_reduction(inst, ropts)
    lts = reduction.lts()
    seed = int(options.get("seed", 0))
    oracle = SolutionOracle.parse(options["oracle"]) if options.get("oracle") else None
    opponent_kind = options.get("opponent", "random")
    engine_role = DEFENDER if role == ATTACKER else ATTACKER
    engine = make_opponent(opponent_kind, engine_role, reduction, oracle, seed)
    gs = GameSession(
        id=uuid.uuid4().hex[:12],
        reduction=reduction,
        lts=lts,
        role=role,
        opponent_kind=opponent_kind,
        engine=engine,
        session=Session.new(lts, reduction.start),
        max_rounds=int(options.get("max_rounds", 200)),
        seed=seed,
        oracle=oracle,
    )
    gs.run_engine()
    return gs


# ---------------------------------------------------------------------------
# HTTP

_SESSION = re.compile(r"^/sessions/([0-9a-f]+)$")
_MOVES = re.compile(r"^/sessions/([0-9a-f]+)/moves$")
_FORK = re.compile(r"^/sessions/([0-9a-f]+)/fork$")


class _Handler(BaseHTTPRequestHandler):
    store: SessionStore = None  # set by make_server

    def log_message(self, *args):  # quiet by default
        pass

    def _send(self, code: int, payload: Optional[dict]):
        body = canonical_dumps(payload).encode() if payload is not None else b""
        self.send_response(code)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        if body:
            self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"bad JSON body: {exc}") from exc
        if not isinstance(data, dict):
            raise MalformedInputError("JSON body must be an object")
        return data

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        m = _SESSION.match(self.path)
        if not m:
            return self._send(404, {"error": "not found"})
        gs = self.store.get(m.group(1))
        if gs is None:
            return self._send(404, {"error": "unknown session"})
        with gs.lock:
            return self._send(200, gs.view())

    def do_DELETE(self):
        m = _SESSION.match(self.path)
        if not m:
            return self._send(404, {"error": "not found"})
        if self.store.delete(m.group(1)):
            return self._send(204, None)
        return self._send(404, {"error": "unknown session"})

    def do_POST(self):
        try:
            if self.path == "/sessions":
                gs = self.store.create(self._body())
                with gs.lock:
                    return self._send(201, gs.view())
            m = _MOVES.match(self.path)
            if m:
                gs = self.store.get(m.group(1))
                if gs is None:
                    return self._send(404, {"error": "unknown session"})
                body = self._body()
                move = move_from_json(body.get("move", body))
                with gs.lock:
                    try:
                        gs.apply_human_move(move)
                    except IllegalMoveError as exc:
                        return self._send(409, {"error": str(exc)})
                    return self._send(200, gs.view())
            m = _FORK.match(self.path)
            if m:
                gs = self.store.get(m.group(1))
                if gs is None:
                    return self._send(404, {"error": "unknown session"})
                body = self._body()
                upto = int(body.get("round", 0))
                with gs.lock:
                    try:
                        fork = self.store.fork(gs, upto)
                    except IllegalMoveError as exc:
                        return self._send(409, {"error": str(exc)})
                with fork.lock:
                    return self._send(201, fork.view())
            return self._send(404, {"error": "not found"})
        except (MalformedInputError, PdbisimError, ValueError) as exc:
            return self._send(400, {"error": str(exc)})


def make_server(port: int, store: Optional[SessionStore] = None) -> ThreadingHTTPServer:
    store = store or SessionStore()
    handler = type("BoundHandler", (_Handler,), {"store": store})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(port: int) -> None:
    httpd = make_server(port)
    print(canonical_dumps({"type": "serving", "port": httpd.server_address[1]}), flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()


# ---------------------------------------------------------------------------
# stdio play

def play_stdio(options: dict, infile, outfile) -> int:
    """Newline-delimited JSON game loop: state/moves/your-turn out, move in."""

    def emit(obj):
        outfile.write(canonical_dumps(obj) + "\n")
        outfile.flush()

    gs = build_session(options)
    while True:
        view = gs.view()
        emit({"type": "state", **{k: view[k] for k in
                                  ("position", "round", "turn", "pending", "phase", "result")}})
        if view["result"] is not None:
            emit({"type": "result", "result": view["result"]})
            return 0
        emit({"type": "moves", "legalMoves": view["legalMoves"]})
        emit({"type": "your-turn", "role": gs.role})
        line = infile.readline()
        if not line:
            return 0
        try:
            data = json.loads(line)
            if data.get("type") == "quit":
                return 0
            move = move_from_json(data.get("move", data))
            gs.apply_human_move(move)
        except IllegalMoveError as exc:
            emit({"type": "error", "error": str(exc)})
        except (MalformedInputError, json.JSONDecodeError) as exc:
            emit({"type": "error", "error": f"bad move message: {exc}"})
