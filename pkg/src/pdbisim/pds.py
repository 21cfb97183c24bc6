"""First- and second-order pushdown systems and their transition semantics.

A system of order 2 rewrites the top symbol of the topmost stack, duplicates
the whole top stack (push) or discards it (pop); order 1 allows rewriting
only.  Configurations are immutable and hashable so they can serve as graph
nodes and memo keys.  Silent rules (action ``EPSILON``) are supported and can
be collapsed away with :func:`collapsed_successors`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

from .errors import MalformedInputError, ResourceLimitError

# Default cap on the node count of a single silent-closure computation.
DEFAULT_CLOSURE_BUDGET = 100_000


@dataclass(frozen=True, slots=True)
class Action:
    """A transition label.  The silent action is the :data:`EPSILON` singleton.

    Named actions compare by name; the silent action is unequal to every
    named action, whatever its rendering.
    """

    name: str
    epsilon: bool = False

    def __post_init__(self):
        if not self.name:
            raise MalformedInputError("action name must be a non-empty token")

    def __str__(self):
        return self.name


EPSILON = Action("eps", epsilon=True)

# Control states and stack symbols are interned strings; uniqueness within an
# alphabet is just set membership.
ControlState = str
StackSymbol = str


class Configuration(NamedTuple):
    """A control state plus a sequence of inner stacks.

    Each inner stack is a tuple of symbols, topmost first; the leftmost stack
    is the top stack.  Zero stacks is the legal "empty" configuration.  Inner
    stacks are shared, never copied, when a move only touches the top stack.
    """

    control: ControlState
    stacks: tuple[tuple[StackSymbol, ...], ...] = ()

    def render(self) -> str:
        if not self.stacks:
            return self.control
        return self.control + "".join("[" + " ".join(st) + "]" for st in self.stacks)


def config(control: str, *stacks: Sequence[str]) -> Configuration:
    """Convenience constructor: ``config("q", ["X", "Y"], ["Z"])``."""
    return Configuration(control, tuple(tuple(st) for st in stacks))


REWRITE = "rewrite"
PUSH = "push"
POP = "pop"
WILD = "wild"


@dataclass(frozen=True, slots=True)
class Rule:
    """One transition rule.

    * ``rewrite``: p X -a-> q alpha (alpha may be empty; if the whole top
      stack empties, it is removed).
    * ``push`` / ``pop``: p X -a-> (q, push|pop), order 2 only.
    * ``wild``: the schema p -a-> q alpha, standing for p X -a-> q alpha X
      over every stack symbol X; matched lazily against the actual top symbol.
    """

    kind: str
    p: ControlState
    x: Optional[StackSymbol]  # None for wild rules
    action: Action
    q: ControlState
    alpha: tuple[StackSymbol, ...] = ()

    def __post_init__(self):
        if self.kind not in (REWRITE, PUSH, POP, WILD):
            raise MalformedInputError(f"unknown rule kind {self.kind!r}")
        if self.kind in (PUSH, POP) and (self.alpha or self.action.epsilon):
            raise MalformedInputError("push/pop rules take no alpha and no silent action")
        if self.kind == WILD and self.x is not None:
            raise MalformedInputError("wild rules must not name a top symbol")
        if self.kind in (REWRITE, PUSH, POP) and self.x is None:
            raise MalformedInputError(f"{self.kind} rule requires a top symbol")

    @classmethod
    def rewrite(cls, p, x, action, q, alpha=()) -> "Rule":
        return cls(REWRITE, p, x, action, q, tuple(alpha))

    @classmethod
    def push(cls, p, x, action, q) -> "Rule":
        return cls(PUSH, p, x, action, q)

    @classmethod
    def pop(cls, p, x, action, q) -> "Rule":
        return cls(POP, p, x, action, q)

    @classmethod
    def wild(cls, p, action, q, alpha=()) -> "Rule":
        return cls(WILD, p, None, action, q, tuple(alpha))

    def mentioned_controls(self):
        return (self.p, self.q)

    def mentioned_symbols(self):
        syms = list(self.alpha)
        if self.x is not None:
            syms.append(self.x)
        return syms


class PushdownSystem:
    """An order-1 or order-2 pushdown system over declared finite alphabets.

    Immutable after construction; all operations on it are pure.
    """

    def __init__(
        self,
        order: int,
        controls: Iterable[ControlState],
        gamma: Iterable[StackSymbol],
        actions: Iterable[Action],
        rules: Sequence[Rule],
    ):
        if order not in (1, 2):
            raise MalformedInputError("order must be 1 or 2")
        self.order = order
        self.controls = frozenset(controls)
        self.gamma = frozenset(gamma)
        self.actions = frozenset(actions)
        self.rules = tuple(rules)
        self._validate()
        # rule index: (control, top symbol) -> [(decl position, rule)]
        self._exact: dict[tuple[str, str], list[tuple[int, Rule]]] = {}
        self._wild: dict[str, list[tuple[int, Rule]]] = {}
        for i, r in enumerate(self.rules):
            if r.kind == WILD:
                self._wild.setdefault(r.p, []).append((i, r))
            else:
                self._exact.setdefault((r.p, r.x), []).append((i, r))

    def _validate(self):
        if not all(self.controls) or not all(self.gamma):
            raise MalformedInputError("empty name in alphabet")
        for r in self.rules:
            if self.order == 1 and r.kind in (PUSH, POP):
                raise MalformedInputError(f"{r.kind} rule forbidden in an order-1 system")
            if r.action.epsilon and r.kind in (PUSH, POP):
                raise MalformedInputError("silent action only on rewrite-shaped rules")
            for c in r.mentioned_controls():
                if c not in self.controls:
                    raise MalformedInputError(f"rule mentions undeclared control {c!r}")
            for s in r.mentioned_symbols():
                if s not in self.gamma:
                    raise MalformedInputError(f"rule mentions undeclared symbol {s!r}")
            if r.action not in self.actions:
                raise MalformedInputError(f"rule mentions undeclared action {r.action}")

    @classmethod
    def from_rules(
        cls,
        order: int,
        rules: Sequence[Rule],
        controls: Iterable[ControlState] = (),
        gamma: Iterable[StackSymbol] = (),
        actions: Iterable[Action] = (),
    ) -> "PushdownSystem":
        """Build a system whose alphabets are inferred from the rules."""
        cs = set(controls)
        gs = set(gamma)
        acts = set(actions)
        for r in rules:
            cs.update(r.mentioned_controls())
            gs.update(r.mentioned_symbols())
            acts.add(r.action)
        return cls(order, cs, gs, acts, rules)

    def check_configuration(self, c: Configuration) -> None:
        if c.control not in self.controls:
            raise MalformedInputError(f"foreign control {c.control!r}")
        for st in c.stacks:
            if not st:
                raise MalformedInputError("inner stacks must be nonempty")
            for s in st:
                if s not in self.gamma:
                    raise MalformedInputError(f"foreign symbol {s!r}")
        if self.order == 1 and len(c.stacks) > 1:
            raise MalformedInputError("order-1 configurations have at most one stack")


def successors(sys: PushdownSystem, c: Configuration) -> list[tuple[Action, Configuration]]:
    """All one-step transitions from ``c``, silent ones included.

    Output order is deterministic: rule declaration order.  A configuration
    with zero stacks has no successors.
    """
    sys.check_configuration(c)
    if not c.stacks:
        return []
    top = c.stacks[0]
    head, rest = top[0], top[1:]
    below = c.stacks[1:]
    matches = list(sys._exact.get((c.control, head), ()))
    matches += sys._wild.get(c.control, ())
    matches.sort(key=lambda ir: ir[0])
    out = []
    for _, r in matches:
        if r.kind == REWRITE:
            new_top = r.alpha + rest
            target = Configuration(r.q, (new_top,) + below if new_top else below)
        elif r.kind == WILD:
            target = Configuration(r.q, (r.alpha + top,) + below)
        elif r.kind == PUSH:
            target = Configuration(r.q, (top, top) + below)
        else:  # POP
            target = Configuration(r.q, below)
        out.append((r.action, target))
    return out


def epsilon_closure(
    step: Callable[[Configuration], Sequence[tuple[Action, Configuration]]],
    c: Configuration,
    budget: int = DEFAULT_CLOSURE_BUDGET,
) -> list[Configuration]:
    """Configurations reachable from ``c`` by silent steps only, ``c`` first.

    Computed as a fixpoint over a visited set, so silent cycles terminate;
    exceeding ``budget`` nodes raises :class:`ResourceLimitError`.
    """
    seen = {c: None}
    queue = deque([c])
    while queue:
        cur = queue.popleft()
        for a, t in step(cur):
            if a.epsilon and t not in seen:
                if len(seen) >= budget:
                    raise ResourceLimitError("silent-closure budget exhausted")
                seen[t] = None
                queue.append(t)
    return list(seen)


def collapsed_successors(
    sys: PushdownSystem,
    c: Configuration,
    closure_budget: int = DEFAULT_CLOSURE_BUDGET,
) -> list[tuple[Action, Configuration]]:
    """The weak-step relation at ``c``: silent closure, one visible step,
    silent closure (zero silent steps allowed on each side).

    Duplicates are removed; the silent action never appears in the output.
    """
    step = lambda conf: successors(sys, conf)
    out: dict[tuple[Action, Configuration], None] = {}
    for pre in epsilon_closure(step, c, closure_budget):
        for a, mid in step(pre):
            if a.epsilon:
                continue
            for post in epsilon_closure(step, mid, closure_budget):
                out[(a, post)] = None
    return list(out)


StepFn = Callable[[Configuration], Sequence[tuple[Action, Configuration]]]


def reachable(
    sys: PushdownSystem,
    c: Configuration,
    depth_limit: int,
    size_limit: int,
    step: Optional[StepFn] = None,
) -> tuple[frozenset[Configuration], bool]:
    """Breadth-first set of configurations within ``depth_limit`` collapsed
    steps of ``c``; the flag reports truncation by ``size_limit``.

    ``step`` overrides the default collapsed-successor function, letting the
    same search run over generator-backed transition systems.
    """
    if depth_limit < 0 or size_limit <= 0:
        raise MalformedInputError("limits must be positive")
    if step is None:
        step = lambda conf: collapsed_successors(sys, conf)
    seen = {c}
    frontier = [c]
    truncated = False
    depth = 0
    while frontier and depth < depth_limit and not truncated:
        nxt = []
        for cur in frontier:
            for _, t in step(cur):
                if t in seen:
                    continue
                if len(seen) >= size_limit:
                    truncated = True
                    break
                seen.add(t)
                nxt.append(t)
            if truncated:
                break
        frontier = nxt
        depth += 1
    return frozenset(seen), truncated


NORMED = "normed-to-limit"
NOT_NORMED = "not-normed"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class NormVerdict:
    """Outcome of a bounded normedness check.

    ``not-normed`` carries a reachable witness whose (fully enumerated)
    reachable set contains no empty-stack configuration; ``unknown`` means a
    search limit was exhausted before either answer was certain.
    """

    kind: str
    witness: Optional[Configuration] = None
    reason: str = ""

    @property
    def is_normed(self):
        return self.kind == NORMED


def _can_empty(
    step: StepFn, start: Configuration, norm_limit: int, size_limit: int
) -> tuple[bool, bool]:
    """(found an empty configuration, search was exhaustive)."""
    if not start.stacks:
        return True, True
    seen = {start}
    frontier = [start]
    depth = 0
    exhaustive = True
    while frontier and depth < norm_limit:
        nxt = []
        for cur in frontier:
            for _, t in step(cur):
                if not t.stacks:
                    return True, True
                if t not in seen:
                    if len(seen) >= size_limit:
                        return False, False
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
        depth += 1
    if frontier:
        exhaustive = False  # depth ran out with unexplored nodes
    return False, exhaustive


def normedness_check(
    sys: PushdownSystem,
    c: Configuration,
    reach_limit: int,
    norm_limit: int,
    size_limit: int = 100_000,
    step: Optional[StepFn] = None,
) -> NormVerdict:
    """Check that every configuration reachable from ``c`` can reach an
    empty-stack configuration, all within the given bounds.
    """
    if reach_limit <= 0 or norm_limit <= 0:
        raise MalformedInputError("limits must be positive")
    if step is None:
        step = lambda conf: collapsed_successors(sys, conf)
    space, truncated = reachable(sys, c, reach_limit, size_limit, step=step)
    for s in sorted(space):
        ok, exhaustive = _can_empty(step, s, norm_limit, size_limit)
        if ok:
            continue
        if exhaustive:
            return NormVerdict(
                NOT_NORMED, witness=s,
                reason="no empty-stack configuration is reachable from this witness",
            )
        return NormVerdict(
            UNKNOWN, witness=s,
            reason=f"norm search limit ({norm_limit}) exhausted before an answer",
        )
    if truncated:
        return NormVerdict(UNKNOWN, reason="reachable-set enumeration was truncated")
    return NormVerdict(NORMED)
