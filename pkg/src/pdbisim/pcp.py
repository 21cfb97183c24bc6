"""Compilation of infinite-solution word-matching instances into pushdown
bisimulation games.

An instance is a list of word pairs (u_i, v_i) over {A, B} with
``|u_i| <= |v_i|``; the generated game starts from the pair
``(q0[I1 ⊥], q'0[I1 ⊥])`` and is won by Defender exactly when the instance
has an infinite solution sequence starting with index 1.  Two first-order
encodings of the switch step are provided (a silent-rule family routed
through an eraser control ``z``, and a direct transition generator), plus a
silent-free second-order encoding that doubles the stack instead.  Rules that
exist only to let Defender punish an Attacker deviation by installing
equality are tracked as "framed".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InstanceError, MalformedInputError
from .game import GamePosition
from .lts import FramedMark, SystemLts
from .pds import EPSILON, Action, Configuration, PushdownSystem, Rule, config

ALPHABET = ("A", "B")
BOTTOM = "⊥"

EPS_FAMILY = "eps"
DIRECT_SCHEMA = "schema"

# Fixed action names of the generated systems.
ACT_GENERATE = Action("g")
ACT_SWITCH = Action("s")
ACT_LETTER = {"A": Action("a"), "B": Action("b")}
ACT_EMPTY = Action("e")
ACT_CHOOSE = Action("c")
ACT_ERASE = Action("c1")
ACT_COMMIT = Action("c2")
ACT_EXPOSE = Action("h")
ACT_HANDOFF = Action("d")
ACT_DRAIN = Action("f")


def act_pick(i: int) -> Action:
    return Action(f"a{i}")


def index_symbol(i: int) -> str:
    return f"I{i}"


def pick_control(i: int) -> str:
    return f"p{i}"


@dataclass(frozen=True)
class PcpInstance:
    """A validated list of word pairs; see :func:`validate_instance`."""

    pairs: tuple[tuple[str, str], ...]

    @property
    def n(self) -> int:
        return len(self.pairs)

    def u(self, i: int) -> str:
        return self.pairs[i - 1][0]

    def v(self, i: int) -> str:
        return self.pairs[i - 1][1]

    def indices(self):
        return range(1, self.n + 1)


def validate_instance(raw_pairs: Iterable[Sequence[str]]) -> PcpInstance:
    """Check the instance invariants: at least one pair, nonempty words over
    {A, B}, and ``|u| <= |v|`` in every pair."""
    pairs = tuple((str(u), str(v)) for u, v in raw_pairs)
    if not pairs:
        raise InstanceError("an instance needs at least one pair")
    for k, (u, v) in enumerate(pairs, start=1):
        for w in (u, v):
            if not w:
                raise InstanceError(f"pair {k}: words must be nonempty")
            bad = set(w) - set(ALPHABET)
            if bad:
                raise InstanceError(f"pair {k}: letters outside {{A,B}}: {sorted(bad)}")
        if len(u) > len(v):
            raise InstanceError(f"pair {k}: |u|={len(u)} exceeds |v|={len(v)}")
    return PcpInstance(pairs)


def parse_instance(text: str) -> PcpInstance:
    """One pair per line, ``<u> <v>``, ``#`` comments; diagnostics carry the
    offending line number."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        if len(toks) != 2:
            raise InstanceError(f"line {lineno}: expected '<u> <v>', got {body!r}")
        try:
            validate_instance([toks])
        except InstanceError as exc:
            raise InstanceError(f"line {lineno}: {exc}") from None
        pairs.append(tuple(toks))
    return validate_instance(pairs)


def render_instance(inst: PcpInstance) -> str:
    return "\n".join(f"{u} {v}" for u, v in inst.pairs) + "\n"


# ---------------------------------------------------------------------------
# word utilities

def head(w: str) -> str:
    if not w:
        raise MalformedInputError("head of the empty word")
    return w[0]


def tail(w: str) -> str:
    if not w:
        raise MalformedInputError("tail of the empty word")
    return w[1:]


def reverse(w: str) -> str:
    return w[::-1]


def head_action(w: str) -> Action:
    """Action ``a`` when the word starts with A, ``b`` when with B."""
    return ACT_LETTER[head(w)]


def suffixes(w: str) -> list[str]:
    """All suffixes, longest (the word itself) to shortest (empty)."""
    return [w[i:] for i in range(len(w) + 1)]


# ---------------------------------------------------------------------------
# partial solutions (independent brute-force ground truth for the game)

def concat_u(inst: PcpInstance, seq: Sequence[int]) -> str:
    return "".join(inst.u(i) for i in seq)


def concat_v(inst: PcpInstance, seq: Sequence[int]) -> str:
    return "".join(inst.v(i) for i in seq)


def is_partial_solution(inst: PcpInstance, seq: Sequence[int]) -> bool:
    """True iff the sequence starts with 1 and its u-concatenation is a
    prefix of its v-concatenation."""
    if not seq or seq[0] != 1:
        return False
    if any(i not in inst.indices() for i in seq):
        return False
    return concat_v(inst, seq).startswith(concat_u(inst, seq))


def partial_solution_tree(
    inst: PcpInstance, max_len: int, max_count: int = 1_000_000
) -> list[tuple[int, ...]]:
    """Every partial solution of length up to ``max_len``, by plain
    prefix-extension enumeration (no game machinery involved)."""
    out: list[tuple[int, ...]] = []
    frontier = [(1,)] if is_partial_solution(inst, (1,)) else []
    while frontier:
        out.extend(frontier)
        if len(out) > max_count:
            raise MalformedInputError("partial-solution enumeration exceeded max_count")
        nxt = []
        for seq in frontier:
            if len(seq) >= max_len:
                continue
            for i in inst.indices():
                cand = seq + (i,)
                if is_partial_solution(inst, cand):
                    nxt.append(cand)
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# reduction outputs

@dataclass(frozen=True)
class ReductionOptions:
    order: int = 1
    first_order_style: str = EPS_FAMILY  # meaningful at order 1 only
    normed: bool = False

    def __post_init__(self):
        if self.order not in (1, 2):
            raise MalformedInputError("order must be 1 or 2")
        if self.first_order_style not in (EPS_FAMILY, DIRECT_SCHEMA):
            raise MalformedInputError(f"unknown first-order style {self.first_order_style!r}")


@dataclass(frozen=True)
class ReductionOutput:
    """A generated system, its start position, and its bookkeeping.

    ``framed_rules`` indexes rules that implement Defender's punishment
    option; they are ordinary rules semantically and are only annotated.
    ``framed_marks`` states the same information as (source control, action,
    target control) triples so that generated (rule-free) transitions can be
    classified too.
    """

    instance: PcpInstance
    options: ReductionOptions
    system: PushdownSystem
    start: GamePosition
    symbol_map: dict
    framed_rules: tuple[int, ...]
    framed_marks: frozenset[FramedMark]

    def lts(self) -> SystemLts:
        extra = None
        if self.options.order == 1 and self.options.first_order_style == DIRECT_SCHEMA:
            inst = self.instance

            def extra(c: Configuration):
                if c.control not in ("q0", "q'0") or not c.stacks:
                    return ()
                return [(ACT_SWITCH, t) for t in switch_targets(inst, c)]

        return SystemLts(self.system, self.framed_marks, extra)


def stack_to_seq(inst: PcpInstance, stack: Sequence[str]) -> tuple[int, ...]:
    """Read the index sequence i1..il off a stack of shape [Il .. I1 ⊥]
    (topmost first); raises on any other shape."""
    if not stack or stack[-1] != BOTTOM:
        raise MalformedInputError("stack must end with the bottom symbol")
    names = {index_symbol(i): i for i in inst.indices()}
    seq = []
    for sym in stack[:-1]:
        if sym not in names:
            raise MalformedInputError(f"unexpected symbol {sym!r} above the bottom")
        seq.append(names[sym])
    seq.reverse()
    return tuple(seq)


def switch_targets(inst: PcpInstance, c: Configuration) -> list[Configuration]:
    """Every switch destination from a generating configuration: erase the
    top m < l indices' complement, i.e. keep the bottom m, and install a
    suffix w of the reversed v-word of the next index.

    This is both the direct transition generator for the schema-style
    first-order system and the ground truth the silent-rule encoding is
    checked against.
    """
    if c.control not in ("q0", "q'0"):
        raise MalformedInputError(f"switch targets undefined for control {c.control!r}")
    if len(c.stacks) != 1:
        raise MalformedInputError("switch targets need exactly one stack")
    stack = c.stacks[0]
    seq = stack_to_seq(inst, stack)
    ell = len(seq)
    out = []
    for m in range(ell - 1, -1, -1):
        kept = stack[ell - m:]  # [I_m .. I_1 ⊥]
        next_index = seq[m]  # i_{m+1}
        for w in suffixes(reverse(inst.v(next_index))):
            out.append(Configuration("q_v", (tuple(w) + kept,)))
    return out


class _Builder:
    def __init__(self):
        self.rules: list[Rule] = []
        self.framed: list[int] = []

    def add(self, rule: Rule, framed: bool = False):
        if framed:
            self.framed.append(len(self.rules))
        self.rules.append(rule)


def _generator_rules(inst: PcpInstance, b: _Builder):
    b.add(Rule.wild("q0", ACT_GENERATE, "t"))
    for i in inst.indices():
        b.add(Rule.wild("q0", ACT_GENERATE, pick_control(i)), framed=True)
    for i in inst.indices():
        b.add(Rule.wild("q'0", ACT_GENERATE, pick_control(i)))
    for i in inst.indices():
        b.add(Rule.wild("t", act_pick(i), "q0", (index_symbol(i),)))
    for i in inst.indices():
        b.add(Rule.wild(pick_control(i), act_pick(i), "q'0", (index_symbol(i),)))
    for i in inst.indices():
        for j in inst.indices():
            if i != j:
                b.add(Rule.wild(pick_control(i), act_pick(j), "q0", (index_symbol(j),)), framed=True)


def _verification_rules(inst: PcpInstance, b: _Builder):
    for i in inst.indices():
        ru = reverse(inst.u(i))
        b.add(Rule.rewrite("q_u", index_symbol(i), head_action(ru), "q_u", tuple(tail(ru))))
    for i in inst.indices():
        rv = reverse(inst.v(i))
        b.add(Rule.rewrite("q_v", index_symbol(i), head_action(rv), "q_v", tuple(tail(rv))))
    for letter in ALPHABET:
        b.add(Rule.rewrite("q_u", letter, ACT_LETTER[letter], "q_u", ()))
    for letter in ALPHABET:
        b.add(Rule.rewrite("q_v", letter, ACT_LETTER[letter], "q_v", ()))


def _generator_marks(inst: PcpInstance) -> set[FramedMark]:
    marks = {("q0", ACT_GENERATE.name, pick_control(i)) for i in inst.indices()}
    for i in inst.indices():
        for j in inst.indices():
            if i != j:
                marks.add((pick_control(i), act_pick(j).name, "q0"))
    return marks


def _symbol_map(inst: PcpInstance, controls: Sequence[str], actions: Sequence[Action]) -> dict:
    return {
        "bottom": BOTTOM,
        "letters": list(ALPHABET),
        "index_symbols": {str(i): index_symbol(i) for i in inst.indices()},
        "controls": list(controls),
        "actions": [a.name for a in actions],
    }


def build_first_order(inst: PcpInstance, options: ReductionOptions) -> ReductionOutput:
    """The order-1 game system: generating rules, a switch step (silent-rule
    family or direct schema, per the options), and deterministic
    letter-by-letter verification."""
    if options.order != 1:
        raise MalformedInputError("build_first_order needs order 1 options")
    b = _Builder()
    _generator_rules(inst, b)
    marks = _generator_marks(inst)
    b.add(Rule.wild("q0", ACT_SWITCH, "q_u"))
    if options.first_order_style == EPS_FAMILY:
        b.add(Rule.wild("q0", ACT_SWITCH, "z"), framed=True)
        b.add(Rule.wild("q'0", ACT_SWITCH, "z"))
        for i in inst.indices():
            b.add(Rule.rewrite("z", index_symbol(i), EPSILON, "z", ()))
        for i in inst.indices():
            for w in suffixes(reverse(inst.v(i))):
                b.add(Rule.rewrite("z", index_symbol(i), EPSILON, "q_v", tuple(w)))
        marks.add(("q0", ACT_SWITCH.name, "z"))
    marks.add(("q0", ACT_SWITCH.name, "q_v"))
    _verification_rules(inst, b)
    if options.normed:
        b.add(Rule.rewrite("q_u", BOTTOM, ACT_EMPTY, "q_u", ()))
        b.add(Rule.rewrite("q_v", BOTTOM, ACT_EMPTY, "q_v", ()))
    controls = ["q0", "q'0", "t", *(pick_control(i) for i in inst.indices()), "q_u", "q_v"]
    if options.first_order_style == EPS_FAMILY:
        controls.append("z")
    gamma = _gamma(inst)
    system = PushdownSystem.from_rules(1, b.rules, controls=controls, gamma=gamma)
    start_cfg = config("q0", [index_symbol(1), BOTTOM])
    start = GamePosition(start_cfg, config("q'0", [index_symbol(1), BOTTOM]))
    actions = _used_actions(b.rules)
    return ReductionOutput(
        inst, options, system, start,
        _symbol_map(inst, controls, actions), tuple(b.framed), frozenset(marks),
    )


def _gamma(inst: PcpInstance) -> list[str]:
    return [index_symbol(i) for i in inst.indices()] + [*ALPHABET, BOTTOM]


def _used_actions(rules: Sequence[Rule]) -> list[Action]:
    seen: dict[Action, None] = {}
    for r in rules:
        if not r.action.epsilon:
            seen.setdefault(r.action, None)
    return list(seen)


def build_second_order(inst: PcpInstance, options: ReductionOptions) -> ReductionOutput:
    """The silent-free order-2 game system: the switch step doubles the stack
    with a push, shortens the two top stacks in lockstep while Defender keeps
    the right to stop, and hands off into the same verification rules."""
    if options.order != 2:
        raise MalformedInputError("build_second_order needs order 2 options")
    b = _Builder()
    gamma = _gamma(inst)
    _generator_rules(inst, b)
    marks = _generator_marks(inst)
    for x in gamma:
        b.add(Rule.push("q0", x, ACT_SWITCH, "r"))
    for x in gamma:
        b.add(Rule.push("q'0", x, ACT_SWITCH, "r'"))
    b.add(Rule.wild("r", ACT_CHOOSE, "q"))
    b.add(Rule.wild("r", ACT_CHOOSE, "q'"), framed=True)
    b.add(Rule.wild("r", ACT_CHOOSE, "q''"), framed=True)
    b.add(Rule.wild("r'", ACT_CHOOSE, "q'"))
    b.add(Rule.wild("r'", ACT_CHOOSE, "q''"))
    for i in inst.indices():
        b.add(Rule.rewrite("q", index_symbol(i), ACT_ERASE, "r", ()))
    for i in inst.indices():
        b.add(Rule.rewrite("q'", index_symbol(i), ACT_ERASE, "r'", ()))
    for i in inst.indices():
        b.add(Rule.rewrite("q''", index_symbol(i), ACT_ERASE, "r", ()), framed=True)
    b.add(Rule.wild("q", ACT_COMMIT, "p"))
    b.add(Rule.wild("q'", ACT_COMMIT, "p"), framed=True)
    b.add(Rule.wild("q''", ACT_COMMIT, "p'"))
    b.add(Rule.rewrite("q", BOTTOM, ACT_EXPOSE, "q", ()))
    for x in gamma:
        b.add(Rule.pop("p", x, ACT_HANDOFF, "q_u"))
    for i in inst.indices():
        for w in suffixes(reverse(inst.v(i))):
            b.add(Rule.rewrite("p", index_symbol(i), ACT_HANDOFF, "q_v", tuple(w)), framed=True)
    for i in inst.indices():
        for w in suffixes(reverse(inst.v(i))):
            b.add(Rule.rewrite("p'", index_symbol(i), ACT_HANDOFF, "q_v", tuple(w)))
    marks.update(
        {
            ("r", ACT_CHOOSE.name, "q'"),
            ("r", ACT_CHOOSE.name, "q''"),
            ("q''", ACT_ERASE.name, "r"),
            ("q'", ACT_COMMIT.name, "p"),
            ("p", ACT_HANDOFF.name, "q_v"),
        }
    )
    _verification_rules(inst, b)
    controls = [
        "q0", "q'0", "t", *(pick_control(i) for i in inst.indices()),
        "r", "r'", "q", "q'", "q''", "p", "p'", "q_u", "q_v",
    ]
    if options.normed:
        controls.append("q_pop")
        b.add(Rule.wild("q_u", ACT_DRAIN, "q_pop"))
        for x_control in controls:
            if x_control == "q_u":
                continue
            for sym in gamma:
                b.add(Rule.pop(x_control, sym, ACT_DRAIN, "q_pop"))
        start_stacks = ([index_symbol(1), BOTTOM], [BOTTOM])
    else:
        start_stacks = ([index_symbol(1), BOTTOM],)
    system = PushdownSystem.from_rules(2, b.rules, controls=controls, gamma=gamma)
    start = GamePosition(config("q0", *start_stacks), config("q'0", *start_stacks))
    actions = _used_actions(b.rules)
    return ReductionOutput(
        inst, options, system, start,
        _symbol_map(inst, controls, actions), tuple(b.framed), frozenset(marks),
    )


def build_reduction(inst: PcpInstance, options: ReductionOptions) -> ReductionOutput:
    if options.order == 1:
        return build_first_order(inst, options)
    return build_second_order(inst, options)


# ---------------------------------------------------------------------------
# manifest sidecar

MANIFEST_FORMAT = "pdbisim-manifest"


def manifest_dict(out: ReductionOutput) -> dict:
    from .serialize import position_json

    return {
        "format": MANIFEST_FORMAT,
        "version": 1,
        "order": out.options.order,
        "style": out.options.first_order_style if out.options.order == 1 else None,
        "normed": out.options.normed,
        "instance": [list(p) for p in out.instance.pairs],
        "start": position_json(out.start),
        "symbol_map": out.symbol_map,
        "framed_rules": list(out.framed_rules),
        "framed_marks": sorted(list(m) for m in out.framed_marks),
    }


def reduction_from_manifest(data: dict) -> ReductionOutput:
    if data.get("format") != MANIFEST_FORMAT:
        raise MalformedInputError("not a reduction manifest")
    inst = validate_instance(data["instance"])
    options = ReductionOptions(
        order=data["order"],
        first_order_style=data.get("style") or EPS_FAMILY,
        normed=data["normed"],
    )
    return build_reduction(inst, options)


def load_manifest(path: str) -> ReductionOutput:
    with open(path, encoding="utf-8") as fh:
        return reduction_from_manifest(json.load(fh))
