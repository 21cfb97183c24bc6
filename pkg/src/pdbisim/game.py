"""Bounded bisimulation-game solving, strategy certificates, and sessions.

The game runs over any transition system exposing deterministic
``successors(configuration)`` lists with no silent actions (see
:class:`pdbisim.lts.SystemLts`).  A round is one Attacker move plus one
Defender response with the same action on the opposite side; a stuck player
loses, and surviving the round budget is Defender's (bounded) win.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .errors import IllegalMoveError, MalformedInputError, ResourceLimitError
from .pds import Action, Configuration

LEFT = "left"
RIGHT = "right"

ATTACKER = "attacker"
DEFENDER = "defender"

DEFAULT_NODE_BUDGET = 5_000_000

INFINITE = float("inf")


def other_side(side: str) -> str:
    return RIGHT if side == LEFT else LEFT


class GamePosition(NamedTuple):
    left: Configuration
    right: Configuration

    def side(self, which: str) -> Configuration:
        return self.left if which == LEFT else self.right

    def render(self) -> str:
        return f"({self.left.render()}, {self.right.render()})"


@dataclass(frozen=True, slots=True)
class Move:
    side: str
    action: Action
    target: Configuration

    def render(self) -> str:
        return f"{self.side}:{self.action}->{self.target.render()}"


@dataclass(frozen=True)
class StrategyNode:
    """One node of an Attacker strategy tree: his move, plus one child per
    legal Defender response.  A node with no responses claims Defender is
    stuck after the move."""

    move: Move
    responses: tuple[tuple[Move, "StrategyNode"], ...] = ()


ATTACKER_WINS = "attacker-wins"
DEFENDER_SURVIVES = "defender-survives"


@dataclass(frozen=True)
class Verdict:
    """``attacker-wins`` within ``depth`` rounds (with a certificate), or
    ``defender-survives`` the asked ``depth``; never a bisimilarity claim."""

    kind: str
    depth: int
    certificate: Optional[StrategyNode] = None

    @property
    def attacker_wins(self):
        return self.kind == ATTACKER_WINS


def attacker_moves(lts, pos: GamePosition) -> list[Move]:
    """All Attacker options, left side first, each side in successor order."""
    out = [Move(LEFT, a, t) for a, t in lts.successors(pos.left)]
    out += [Move(RIGHT, a, t) for a, t in lts.successors(pos.right)]
    return out


def defender_responses(lts, pos: GamePosition, move: Move) -> list[Move]:
    side = other_side(move.side)
    return [Move(side, a, t) for a, t in lts.successors(pos.side(side)) if a == move.action]


def position_after(pos: GamePosition, attack: Move, response: Move) -> GamePosition:
    if attack.side == LEFT:
        return GamePosition(attack.target, response.target)
    return GamePosition(response.target, attack.target)


class GameSolver:
    """Bounded game search with persistent memo tables.

    One solver serves many queries against the same transition system; the
    expensive verified subspaces (wins, and survivals justified only by
    genuine terminals) are computed once and reused.  Strategy agents that
    search every round share a solver so each round costs only its marginal
    frontier.
    """

    def __init__(self, lts, equality_shortcircuit: bool = True):
        self.lts = lts
        self.equality_shortcircuit = equality_shortcircuit
        self.win: dict[GamePosition, tuple[int, StrategyNode]] = {}
        self.survive: dict[GamePosition, float] = {}
        self._expanded = 0
        self._limit = 0

    def decide(self, pos: GamePosition, rounds: int,
               node_budget: int = DEFAULT_NODE_BUDGET,
               iterative: bool = True) -> Verdict:
        """Exact bounded decision: can Attacker force a win within ``rounds``?

        The search deepens iteratively (1, 2, ... rounds), so a win is
        reported at its smallest forcing depth and cheap shallow wins are
        found before deep budgets make branching plays expensive; pass
        ``iterative=False`` to spend the full budget in one pass (useful for
        small fixed lookaheads).  ``node_budget`` caps the expansions of this
        call; exhausting it raises :class:`ResourceLimitError` rather than
        guessing.
        """
        if rounds < 0:
            raise MalformedInputError("round budget must be >= 0")
        self._expanded = 0
        self._limit = node_budget
        budgets = range(1, rounds + 1) if iterative else (range(rounds, rounds + 1) if rounds else ())
        for budget in budgets:
            depth, cert, absolute = self._solve(pos, budget)
            if depth:
                return Verdict(ATTACKER_WINS, depth, cert)
            if absolute:
                break  # survival never touched the budget: deeper passes agree
        return Verdict(DEFENDER_SURVIVES, rounds)

    def _solve(self, p: GamePosition, k: int) -> tuple[int, Optional[StrategyNode], bool]:
        """(win depth, certificate, budget-independent); depth 0 means survival.

        A survival verdict is budget-independent when its justification never
        bottomed out at k == 0, i.e. it rests only on genuine terminals
        (equal pair, stuck Attacker, completed win subtrees); such verdicts
        hold at every budget and are memoized as surviving forever.
        """
        from .lts import successors_by_action

        lts = self.lts
        win = self.win
        survive = self.survive
        left, right = p
        if self.equality_shortcircuit and left == right:
            return 0, None, True
        got = win.get(p)
        if got is not None and got[0] <= k:
            return got[0], got[1], True
        if survive.get(p, -1) >= k:
            return 0, None, survive[p] == INFINITE
        if k == 0:
            return 0, None, False
        self._expanded += 1
        if self._expanded > self._limit:
            raise ResourceLimitError(f"game-search node budget ({self._limit}) exhausted")
        lsucc = lts.successors(left)
        rsucc = lts.successors(right)
        lmap = successors_by_action(lts, left) if rsucc else {}
        rmap = successors_by_action(lts, right) if lsucc else {}
        node_absolute = True
        found_win = None
        for side, succs, resp_map in ((LEFT, lsucc, rmap), (RIGHT, rsucc, lmap)):
            for action, target in succs:
                responses = resp_map.get(action, ())
                worst = 0
                children = []
                move_absolute = True
                for resp_target in responses:
                    child = (
                        GamePosition(target, resp_target)
                        if side == LEFT
                        else GamePosition(resp_target, target)
                    )
                    depth, cert, absolute = self._solve(child, k - 1)
                    if not depth:
                        children = None
                        move_absolute = absolute
                        break
                    worst = max(worst, depth)
                    children.append((Move(other_side(side), action, resp_target), cert))
                if children is None:
                    node_absolute = node_absolute and move_absolute
                    continue
                found_win = (worst + 1, StrategyNode(Move(side, action, target), tuple(children)))
                break
            if found_win:
                break
        if found_win:
            if got is None or found_win[0] < got[0]:
                win[p] = found_win
            return found_win[0], found_win[1], True
        if not (lsucc or rsucc):
            survive[p] = INFINITE  # Attacker stuck: survives any budget
            return 0, None, True
        if node_absolute:
            survive[p] = INFINITE
            return 0, None, True
        survive[p] = max(survive.get(p, 0), k)
        return 0, None, False


def decide_game(
    lts,
    pos: GamePosition,
    rounds: int,
    equality_shortcircuit: bool = True,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Verdict:
    """One-shot :meth:`GameSolver.decide` with a fresh solver."""
    return GameSolver(lts, equality_shortcircuit).decide(pos, rounds, node_budget)


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    problem: str = ""
    path: tuple[Move, ...] = ()


def check_certificate(lts, pos: GamePosition, node: StrategyNode) -> CertificateReport:
    """Replay a strategy tree, checking move legality, branch completeness
    over Defender responses, and that every leaf leaves Defender stuck."""

    def walk(p, n, path) -> CertificateReport:
        legal = attacker_moves(lts, p)
        if n.move not in legal:
            return CertificateReport(False, f"illegal attacker move at {p.render()}", path)
        needed = defender_responses(lts, p, n.move)
        covered = dict(n.responses)
        if not needed and covered:
            return CertificateReport(False, "children present but defender is stuck", path)
        for resp in needed:
            child = covered.pop(resp, None)
            if child is None:
                return CertificateReport(
                    False, f"uncovered defender response {resp.render()}", path + (n.move,)
                )
            sub = walk(position_after(p, n.move, resp), child, path + (n.move, resp))
            if not sub.ok:
                return sub
        if covered:
            stray = next(iter(covered))
            return CertificateReport(
                False, f"child for illegal response {stray.render()}", path + (n.move,)
            )
        return CertificateReport(True)

    return walk(pos, node, ())


def verify_certificate(lts, pos: GamePosition, node: StrategyNode) -> bool:
    return check_certificate(lts, pos, node).ok


def certificate_depth(node: StrategyNode) -> int:
    if not node.responses:
        return 1
    return 1 + max(certificate_depth(child) for _, child in node.responses)


@dataclass(frozen=True)
class GameResult:
    winner: str
    reason: str  # attacker-stuck | defender-stuck | round-cap | defect
    round: int


@dataclass(frozen=True)
class Session:
    """A turn-based game session.

    Immutable: :meth:`step` returns the advanced session, and ``history``
    replays from ``initial`` to the current position.  One owner at a time.
    """

    lts: object
    initial: GamePosition
    position: GamePosition
    rounds_played: int = 0
    pending: Optional[Move] = None
    history: tuple[tuple[GamePosition, Move, Optional[Move]], ...] = ()
    result: Optional[GameResult] = None

    @classmethod
    def new(cls, lts, position: GamePosition) -> "Session":
        s = cls(lts, position, position)
        return s._check_attacker_stuck()

    @property
    def turn(self) -> str:
        return DEFENDER if self.pending is not None else ATTACKER

    def _check_attacker_stuck(self) -> "Session":
        if self.result is None and not attacker_moves(self.lts, self.position):
            return replace(
                self,
                result=GameResult(DEFENDER, "attacker-stuck", self.rounds_played + 1),
            )
        return self

    def legal_moves(self) -> list[Move]:
        if self.result is not None:
            return []
        if self.pending is None:
            return attacker_moves(self.lts, self.position)
        return defender_responses(self.lts, self.position, self.pending)

    def step(self, move: Move) -> "Session":
        if self.result is not None:
            raise IllegalMoveError("game is over")
        if move.action.epsilon:
            raise IllegalMoveError("silent actions cannot be played")
        if self.pending is None:
            return self._attacker_step(move)
        return self._defender_step(move)

    def _attacker_step(self, move: Move) -> "Session":
        options = {(m.side, m.action, m.target) for m in attacker_moves(self.lts, self.position)}
        if (move.side, move.action, move.target) not in options:
            raise IllegalMoveError(
                f"target is not a successor: no {move.action} step to "
                f"{move.target.render()} on the {move.side}"
            )
        nxt = replace(self, pending=move)
        if not defender_responses(self.lts, self.position, move):
            entry = (self.position, move, None)
            return replace(
                nxt,
                history=self.history + (entry,),
                result=GameResult(ATTACKER, "defender-stuck", self.rounds_played + 1),
            )
        return nxt

    def _defender_step(self, move: Move) -> "Session":
        attack = self.pending
        if move.side != other_side(attack.side):
            raise IllegalMoveError(f"wrong side: response must be on the {other_side(attack.side)}")
        if move.action != attack.action:
            raise IllegalMoveError(
                f"wrong action: response must use {attack.action}, not {move.action}"
            )
        if move not in defender_responses(self.lts, self.position, attack):
            raise IllegalMoveError(
                f"target is not a successor: no {move.action} step to "
                f"{move.target.render()} on the {move.side}"
            )
        entry = (self.position, attack, move)
        nxt = replace(
            self,
            position=position_after(self.position, attack, move),
            pending=None,
            rounds_played=self.rounds_played + 1,
            history=self.history + (entry,),
        )
        return nxt._check_attacker_stuck()

    def replay(self, upto_round: int) -> "Session":
        """A fresh session replayed through the first ``upto_round`` rounds."""
        if not 0 <= upto_round <= len(self.history):
            raise IllegalMoveError(f"no round {upto_round} in history")
        s = Session.new(self.lts, self.initial)
        for _, attack, resp in self.history[:upto_round]:
            s = s.step(attack)
            if resp is not None:
                s = s.step(resp)
        return s
