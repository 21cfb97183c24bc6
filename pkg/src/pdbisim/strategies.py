"""Executable strategies over the generated game systems.

* :class:`DefenderForcing` survives forever when driven by a genuine
  solution oracle: it punishes every framed or mismatched Attacker move by
  installing an equal pair, dictates the generated indices, and picks the
  erase point when Attacker switches.
* :class:`AttackerSwitch` generates while the index sequence on the stack is
  a partial solution, switches the moment it is not, and then plays the
  deterministic verification; it never touches a framed rule.
* :class:`RandomAgent` and :class:`SearchAgent` are baselines.

Agents are (re)playable: every choice is a function of the visible position,
the agent's seed and its round number, so a replayed session reproduces the
same play.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import (
    IllegalMoveError,
    MalformedInputError,
    PartialSolutionError,
    StrategyDefectError,
)
from .game import (
    ATTACKER,
    DEFENDER,
    LEFT,
    RIGHT,
    GamePosition,
    GameResult,
    GameSolver,
    Move,
    Session,
    attacker_moves,
    defender_responses,
    other_side,
    position_after,
)
from .pcp import (
    ACT_CHOOSE,
    ACT_COMMIT,
    ACT_ERASE,
    ACT_EXPOSE,
    ACT_GENERATE,
    ACT_HANDOFF,
    ACT_SWITCH,
    BOTTOM,
    PcpInstance,
    ReductionOutput,
    act_pick,
    concat_u,
    is_partial_solution,
    pick_control,
    reverse,
    stack_to_seq,
)
from .pds import Configuration


@dataclass(frozen=True)
class SolutionOracle:
    """An eventually periodic infinite index sequence: ``prefix`` then
    ``period`` repeated forever.  The first emitted index must be 1."""

    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise MalformedInputError("oracle period must be nonempty")
        if self.index(1) != 1:
            raise MalformedInputError("the first oracle index must be 1")

    def index(self, k: int) -> int:
        """The k-th index, 1-based."""
        if k <= 0:
            raise MalformedInputError("oracle positions are 1-based")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return self.period[(k - 1 - len(self.prefix)) % len(self.period)]

    def head(self, length: int) -> tuple[int, ...]:
        return tuple(self.index(k) for k in range(1, length + 1))

    @classmethod
    def parse(cls, text: str) -> "SolutionOracle":
        """``"1"`` (pure period) or ``"1,2:2,1"`` (prefix:period)."""
        if ":" in text:
            pre, per = text.split(":", 1)
        else:
            pre, per = "", text
        to_ints = lambda s: tuple(int(t) for t in s.split(",") if t.strip())
        return cls(to_ints(pre), to_ints(per))


def compute_switch_choice(inst: PcpInstance, seq: tuple[int, ...]) -> tuple[int, str]:
    """For a partial solution i1..il, the canonical erase point: the largest
    m < l whose v-concatenation fits inside the u-concatenation, and the word
    w that reconciles the two sides.

    Guarantees: w is a suffix of reverse(v_{i_{m+1}}), and
    reverse(U) == w + reverse(V_m).
    """
    if not is_partial_solution(inst, seq):
        raise PartialSolutionError(f"{list(seq)} is not a partial solution")
    u_len = len(concat_u(inst, seq))
    m = 0
    v_len = 0
    for k in range(1, len(seq)):  # m stays below len(seq)
        step = v_len + len(inst.v(seq[k - 1]))
        if step > u_len:
            break
        m, v_len = k, step
    w = reverse(concat_u(inst, seq)[v_len:])
    return m, w


class StrategyAgent:
    """Base interface: pick a move for the current turn.

    ``pending`` is the Attacker move awaiting a response when playing
    Defender, else ``None``.  Returned moves must be legal; the session and
    simulator treat an illegal or impossible choice as a defect.
    """

    role: str

    def choose(self, lts, position: GamePosition, pending: Optional[Move], round_no: int) -> Move:
        raise NotImplementedError


class DefenderForcing(StrategyAgent):
    role = DEFENDER

    def __init__(self, reduction: ReductionOutput, oracle: SolutionOracle):
        self.reduction = reduction
        self.oracle = oracle
        self.inst = reduction.instance

    def choose(self, lts, position, pending, round_no):
        if pending is None:
            raise StrategyDefectError("forcing strategy plays Defender only")
        responses = defender_responses(lts, position, pending)
        if not responses:
            raise StrategyDefectError("no response available")
        for resp in responses:
            after = position_after(position, pending, resp)
            if after.left == after.right:
                return resp
        if len(responses) == 1:
            return responses[0]
        mine = position.side(other_side(pending.side))
        want = self._protocol_target(pending, mine)
        if want is not None:
            for resp in responses:
                if resp.target == want:
                    return resp
        return responses[0]

    def _protocol_target(self, pending: Move, mine: Configuration) -> Optional[Configuration]:
        action, target_control = pending.action, pending.target.control
        if action == ACT_GENERATE and target_control == "t":
            seq = stack_to_seq(self.inst, mine.stacks[0])
            self._check_oracle(seq)
            k = self.oracle.index(len(seq) + 1)
            return Configuration(pick_control(k), mine.stacks)
        if action == ACT_SWITCH and target_control == "q_u":
            # order-1 switch: erase down to m kept indices, install w
            seq = stack_to_seq(self.inst, mine.stacks[0])
            m, w = compute_switch_choice(self.inst, seq)
            kept = mine.stacks[0][len(seq) - m:]
            return Configuration("q_v", (tuple(w) + kept,))
        if action == ACT_CHOOSE and target_control == "q":
            # erase one more index, or stop and commit to verification?
            seq = stack_to_seq(self.inst, mine.stacks[1])
            m, _ = compute_switch_choice(self.inst, seq)
            pops_done = len(seq) - len(stack_to_seq(self.inst, mine.stacks[0]))
            stop = pops_done >= len(seq) - (m + 1)
            return Configuration("q''" if stop else "q'", mine.stacks)
        if action == ACT_HANDOFF and target_control == "q_u":
            seq = stack_to_seq(self.inst, mine.stacks[1])
            _, w = compute_switch_choice(self.inst, seq)
            top = tuple(w) + mine.stacks[0][1:]
            return Configuration("q_v", (top,) + mine.stacks[1:])
        return None

    def _check_oracle(self, seq: tuple[int, ...]):
        if seq != self.oracle.head(len(seq)):
            raise StrategyDefectError("stack indices diverged from the oracle")


class AttackerSwitch(StrategyAgent):
    role = ATTACKER

    def __init__(self, reduction: ReductionOutput):
        self.reduction = reduction
        self.inst = reduction.instance
        self.order = reduction.options.order

    def choose(self, lts, position, pending, round_no):
        if pending is not None:
            raise StrategyDefectError("switch strategy plays Attacker only")
        move = self._protocol_move(position)
        if move is not None:
            return move
        return self._fallback(lts, position)

    def _protocol_move(self, pos: GamePosition) -> Optional[Move]:
        left, right = pos.left, pos.right
        controls = (left.control, right.control)
        if controls == ("q0", "q'0"):
            try:
                seq = stack_to_seq(self.inst, left.stacks[0])
            except MalformedInputError:
                return None
            if is_partial_solution(self.inst, seq):
                return Move(LEFT, ACT_GENERATE, Configuration("t", left.stacks))
            if self.order == 1:
                return Move(LEFT, ACT_SWITCH, Configuration("q_u", left.stacks))
            doubled = (left.stacks[0], left.stacks[0]) + left.stacks[1:]
            return Move(LEFT, ACT_SWITCH, Configuration("r", doubled))
        if left.control == "t" and right.control.startswith("p"):
            k = int(right.control[1:])
            top = (f"I{k}",) + left.stacks[0]
            return Move(LEFT, act_pick(k), Configuration("q0", (top,) + left.stacks[1:]))
        if controls == ("r", "r'"):
            return Move(LEFT, ACT_CHOOSE, Configuration("q", left.stacks))
        if controls == ("q", "q'"):
            if left.stacks[0] == (BOTTOM,):
                # Defender kept erasing past the last index: expose and win
                return Move(LEFT, ACT_EXPOSE, Configuration("q", left.stacks[1:]))
            top = left.stacks[0][1:]
            return Move(LEFT, ACT_ERASE, Configuration("r", (top,) + left.stacks[1:]))
        if controls == ("q", "q''"):
            return Move(LEFT, ACT_COMMIT, Configuration("p", left.stacks))
        if controls == ("p", "p'"):
            return Move(LEFT, ACT_HANDOFF, Configuration("q_u", left.stacks[1:]))
        return None

    def _fallback(self, lts, pos: GamePosition) -> Move:
        # verification and anything unforeseen: prefer the deterministic
        # left-side step, then any unframed move
        moves = attacker_moves(lts, pos)
        if not moves:
            raise StrategyDefectError("no move available")
        framed = getattr(lts, "framed", lambda *a: False)
        for m in moves:
            if not framed(pos.side(m.side), m.action, m.target):
                return m
        return moves[0]


def _round_rng(seed: int, round_no: int, responding: bool) -> random.Random:
    return random.Random(seed * 2_000_003 + round_no * 2 + int(responding))


class RandomAgent(StrategyAgent):
    """Uniform choice among legal moves, derived from (seed, round), so a
    replayed round repeats the same pick."""

    def __init__(self, role: str, seed: int = 0):
        self.role = role
        self.seed = seed

    def choose(self, lts, position, pending, round_no):
        if pending is None:
            options = attacker_moves(lts, position)
        else:
            options = defender_responses(lts, position, pending)
        if not options:
            raise StrategyDefectError("no move available")
        rng = _round_rng(self.seed, round_no, pending is not None)
        return options[rng.randrange(len(options))]


class SearchAgent(StrategyAgent):
    """Plays by bounded game search.

    As Attacker: the certificate move when a win exists within the lookahead;
    otherwise the move with the best guaranteed survival time against an
    adversarial Defender (first such move on ties, so a hopeless Attacker
    keeps the play alive deterministically).  As Defender: a seeded pick
    among the responses that survive the remaining lookahead.

    One agent keeps one solver and one survival memo, optionally shared with
    other agents over the same transition system, so repeated searches pay
    only for new ground.
    """

    def __init__(self, role: str, depth: int, seed: int = 0, node_budget: int = 500_000,
                 solver: Optional[GameSolver] = None, surv_memo: Optional[dict] = None):
        self.role = role
        self.depth = depth
        self.seed = seed
        self.node_budget = node_budget
        self._solver = solver
        self._surv_memo: dict = {} if surv_memo is None else surv_memo

    def _solver_for(self, lts) -> GameSolver:
        if self._solver is None or self._solver.lts is not lts:
            self._solver = GameSolver(lts)
            self._surv_memo = {}
        return self._solver

    def choose(self, lts, position, pending, round_no):
        solver = self._solver_for(lts)
        if pending is None:
            verdict = solver.decide(position, self.depth, node_budget=self.node_budget,
                                    iterative=False)
            if verdict.attacker_wins:
                return verdict.certificate.move
            moves = attacker_moves(lts, position)
            if not moves:
                raise StrategyDefectError("no move available")
            best, best_score = moves[0], -1
            for m in moves:
                score = self._move_survival(lts, position, m.side, m.action, m.target, self.depth)
                if score > best_score:
                    best, best_score = m, score
                if score >= self.depth:
                    break  # nothing can beat a full-horizon move
            return best
        options = defender_responses(lts, position, pending)
        if not options:
            raise StrategyDefectError("no response available")
        surviving = []
        for resp in options:
            after = position_after(position, pending, resp)
            sub = solver.decide(after, max(self.depth - 1, 0), node_budget=self.node_budget)
            if not sub.attacker_wins:
                surviving.append(resp)
        pool = surviving or options
        rng = _round_rng(self.seed, round_no, True)
        return pool[rng.randrange(len(pool))]

    def _move_survival(self, lts, position, side, action, target, horizon) -> int:
        from .lts import successors_by_action

        opposite = position.right if side == LEFT else position.left
        responses = successors_by_action(lts, opposite).get(action, ())
        if not responses:
            return horizon  # Defender stuck: as good as it gets
        worst = horizon
        for resp_target in responses:
            child = (GamePosition(target, resp_target) if side == LEFT
                     else GamePosition(resp_target, target))
            worst = min(worst, 1 + self._survival(lts, child, horizon - 1))
            if worst <= 1:
                break
        return worst

    def _survival(self, lts, position, horizon) -> int:
        """Rounds Attacker can stay unstuck against any Defender, capped."""
        if horizon <= 0:
            return 0
        key = (position, horizon)
        got = self._surv_memo.get(key)
        if got is not None:
            return got
        best = 0
        for side, mine in ((LEFT, position.left), (RIGHT, position.right)):
            for action, target in lts.successors(mine):
                best = max(
                    best, self._move_survival(lts, position, side, action, target, horizon)
                )
                if best >= horizon:
                    break
            if best >= horizon:
                break
        self._surv_memo[key] = best
        return best


ROUND_CAP = "round-cap"


@dataclass(frozen=True)
class PlayTrace:
    """A finished simulation: the rounds played and how it ended."""

    initial: GamePosition
    rounds: tuple[tuple[GamePosition, Move, Optional[Move]], ...]
    outcome: GameResult

    def replay(self, lts) -> Session:
        """Re-drive the recorded moves through a fresh session."""
        s = Session.new(lts, self.initial)
        for _, attack, resp in self.rounds:
            s = s.step(attack)
            if resp is not None:
                s = s.step(resp)
        return s


def trace_json(trace: PlayTrace) -> dict:
    from .serialize import move_json, position_json

    return {
        "initial": position_json(trace.initial),
        "rounds": [
            {
                "position": position_json(pos),
                "attack": move_json(attack),
                "response": move_json(resp) if resp else None,
            }
            for pos, attack, resp in trace.rounds
        ],
        "outcome": {
            "winner": trace.outcome.winner,
            "reason": trace.outcome.reason,
            "round": trace.outcome.round,
        },
    }


def trace_transcript(trace: PlayTrace) -> str:
    lines = [f"start {trace.initial.render()}"]
    for n, (pos, attack, resp) in enumerate(trace.rounds, start=1):
        lines.append(f"round {n} at {pos.render()}")
        lines.append(f"  attacker: {attack.render()}")
        lines.append(f"  defender: {resp.render() if resp else 'stuck'}")
    o = trace.outcome
    lines.append(f"outcome: {o.winner} wins by {o.reason} (round {o.round})")
    return "\n".join(lines) + "\n"


def simulate(
    lts,
    start: GamePosition,
    attacker: StrategyAgent,
    defender: StrategyAgent,
    max_rounds: int,
) -> PlayTrace:
    """Alternate the two agents through the session machine.

    An agent raising or returning an illegal move loses by defect; a play
    reaching ``max_rounds`` completed rounds ends as ``round-cap``.
    """
    if max_rounds < 1:
        raise MalformedInputError("max_rounds must be >= 1")
    session = Session.new(lts, start)
    while session.result is None and session.rounds_played < max_rounds:
        mover = attacker if session.pending is None else defender
        try:
            move = mover.choose(session.lts, session.position, session.pending,
                                session.rounds_played)
            session = session.step(move)
        except (IllegalMoveError, StrategyDefectError):
            loser = ATTACKER if mover is attacker else DEFENDER
            winner = DEFENDER if loser == ATTACKER else ATTACKER
            result = GameResult(winner, "defect", session.rounds_played + 1)
            return PlayTrace(start, session.history, result)
    result = session.result or GameResult(DEFENDER, ROUND_CAP, session.rounds_played)
    return PlayTrace(start, session.history, result)
