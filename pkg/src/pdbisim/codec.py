"""Line-oriented text format for pushdown systems.

::

    # comment
    order 2
    start q0 I1 ⊥ ; ⊥
    rule p X a q Y Z      # p X -a-> q Y Z
    rule p X a q -        # empty alpha
    rule p X s q push
    rule p X s q pop
    wild p eps q -        # schema p -eps-> q, any top symbol kept

Symbols, controls and actions are declared implicitly by first use.  The
tokens ``push``, ``pop``, ``-`` and ``eps`` are reserved: the first three may
not name stack symbols, and ``eps`` always denotes the silent action.
Rendering a parsed system reproduces the input up to comments and spacing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .pds import EPSILON, Action, Configuration, PushdownSystem, Rule

RESERVED = {"push", "pop", "-", ";"}

_TOKEN = re.compile(r"\S+")


@dataclass
class PdsDocument:
    """A parsed system file: the system plus its optional start configurations
    (one or two ``start`` lines; two lines form a game position)."""

    system: PushdownSystem
    starts: tuple[Configuration, ...] = ()


def _action_of(token: str) -> Action:
    return EPSILON if token == "eps" else Action(token)


def _action_token(a: Action) -> str:
    return "eps" if a.epsilon else a.name


def _check_symbol(tok: str, line: int, col: int) -> str:
    if tok in RESERVED or tok == "eps":
        raise ParseError(f"reserved token {tok!r} cannot be used as a name", line, col)
    return tok


def parse_config_tokens(tokens: list[str], line: int = 1) -> Configuration:
    """Parse ``<control> <sym>* (';' <sym>*)*`` into a configuration."""
    if not tokens:
        raise ParseError("expected a control state", line)
    control = _check_symbol(tokens[0], line, 1)
    stacks: list[tuple[str, ...]] = []
    current: list[str] = []
    for tok in tokens[1:]:
        if tok == ";":
            if not current:
                raise ParseError("empty inner stack", line)
            stacks.append(tuple(current))
            current = []
        else:
            current.append(_check_symbol(tok, line, 1))
    if current:
        stacks.append(tuple(current))
    elif stacks:
        raise ParseError("empty inner stack after ';'", line)
    return Configuration(control, tuple(stacks))


def parse_pds(text: str) -> PdsDocument:
    """Parse the text format; diagnostics carry line/column positions."""
    order = None
    rules: list[Rule] = []
    starts: list[Configuration] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(body)]
        if not toks:
            continue
        head, col = toks[0]
        args = toks[1:]
        if head == "order":
            if order is not None:
                raise ParseError("duplicate order directive", lineno, col)
            if len(args) != 1 or args[0][0] not in ("1", "2"):
                raise ParseError("order must be 1 or 2", lineno, col)
            order = int(args[0][0])
            continue
        if order is None:
            raise ParseError("order directive must come first", lineno, col)
        if head == "start":
            if len(starts) >= 2:
                raise ParseError("at most two start lines", lineno, col)
            starts.append(parse_config_tokens([t for t, _ in args], lineno))
        elif head == "rule":
            rules.append(_parse_rule(args, order, lineno))
        elif head == "wild":
            rules.append(_parse_wild(args, lineno))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)
    if order is None:
        raise ParseError("missing order directive", 1)
    system = PushdownSystem.from_rules(
        order,
        rules,
        controls=[c.control for c in starts],
        gamma=[s for c in starts for st in c.stacks for s in st],
    )
    for c in starts:
        system.check_configuration(c)
    return PdsDocument(system, tuple(starts))


def _parse_rule(args, order, lineno) -> Rule:
    if len(args) < 5:
        raise ParseError("rule needs: <p> <X> <action> <q> <alpha|-|push|pop>", lineno)
    (p, pc), (x, xc), (a, ac), (q, qc) = args[:4]
    tail = args[4:]
    p = _check_symbol(p, lineno, pc)
    x = _check_symbol(x, lineno, xc)
    q = _check_symbol(q, lineno, qc)
    action = _action_of(a)
    if len(tail) == 1 and tail[0][0] in ("push", "pop"):
        kind, kc = tail[0]
        if order == 1:
            raise ParseError(f"{kind} rule forbidden in an order-1 file", lineno, kc)
        if action.epsilon:
            raise ParseError(f"silent action not allowed on a {kind} rule", lineno, ac)
        return Rule.push(p, x, action, q) if kind == "push" else Rule.pop(p, x, action, q)
    alpha = _parse_alpha(tail, lineno)
    return Rule.rewrite(p, x, action, q, alpha)


def _parse_wild(args, lineno) -> Rule:
    if len(args) < 4:
        raise ParseError("wild needs: <p> <action> <q> <alpha|->", lineno)
    (p, pc), (a, _), (q, qc) = args[:3]
    p = _check_symbol(p, lineno, pc)
    q = _check_symbol(q, lineno, qc)
    return Rule.wild(p, _action_of(a), q, _parse_alpha(args[3:], lineno))


def _parse_alpha(tail, lineno) -> tuple[str, ...]:
    if len(tail) == 1 and tail[0][0] == "-":
        return ()
    out = []
    for tok, col in tail:
        out.append(_check_symbol(tok, lineno, col))
    return tuple(out)


def render_config(c: Configuration) -> str:
    parts = [c.control]
    for i, st in enumerate(c.stacks):
        if i:
            parts.append(";")
        parts.extend(st)
    return " ".join(parts)


def render_pds(doc: PdsDocument | PushdownSystem) -> str:
    """Render to the text format; ``parse_pds`` of the output reproduces the
    document (for systems whose every name occurs in a rule or start line)."""
    if isinstance(doc, PushdownSystem):
        doc = PdsDocument(doc)
    lines = [f"order {doc.system.order}"]
    for c in doc.starts:
        lines.append(f"start {render_config(c)}")
    for r in doc.system.rules:
        a = _action_token(r.action)
        alpha = " ".join(r.alpha) if r.alpha else "-"
        if r.kind == "wild":
            lines.append(f"wild {r.p} {a} {r.q} {alpha}")
        elif r.kind in ("push", "pop"):
            lines.append(f"rule {r.p} {r.x} {a} {r.q} {r.kind}")
        else:
            lines.append(f"rule {r.p} {r.x} {a} {r.q} {alpha}")
    return "\n".join(lines) + "\n"
