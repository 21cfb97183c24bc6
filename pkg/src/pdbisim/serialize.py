"""JSON shapes for configurations, moves, verdicts, certificates and traces.

All emitters produce plain dict/list trees; :func:`canonical_dumps` turns
them into byte-stable text (sorted keys, fixed separators) so that equal
values serialize identically across runs.
"""

from __future__ import annotations

import json

from .errors import MalformedInputError
from .game import GamePosition, Move, StrategyNode, Verdict
from .pds import Action, Configuration


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def config_json(c: Configuration) -> dict:
    return {"control": c.control, "stacks": [list(st) for st in c.stacks]}


def config_from_json(d: dict) -> Configuration:
    try:
        return Configuration(d["control"], tuple(tuple(st) for st in d["stacks"]))
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"bad configuration object: {exc}") from exc


def position_json(p: GamePosition) -> dict:
    return {"left": config_json(p.left), "right": config_json(p.right)}


def position_from_json(d: dict) -> GamePosition:
    return GamePosition(config_from_json(d["left"]), config_from_json(d["right"]))


def move_json(m: Move) -> dict:
    return {"side": m.side, "action": m.action.name, "target": config_json(m.target)}


def move_from_json(d: dict) -> Move:
    try:
        side = d["side"]
        if side not in ("left", "right"):
            raise MalformedInputError(f"bad side {side!r}")
        return Move(side, Action(d["action"]), config_from_json(d["target"]))
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"bad move object: {exc}") from exc


def certificate_json(node: StrategyNode) -> dict:
    return {
        "move": move_json(node.move),
        "responses": [
            {"response": move_json(m), "child": certificate_json(child)}
            for m, child in node.responses
        ],
    }


def certificate_from_json(d: dict) -> StrategyNode:
    try:
        return StrategyNode(
            move_from_json(d["move"]),
            tuple(
                (move_from_json(r["response"]), certificate_from_json(r["child"]))
                for r in d["responses"]
            ),
        )
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"bad certificate object: {exc}") from exc


def verdict_json(v: Verdict, certificate_path: str | None = None) -> dict:
    out = {"kind": v.kind, "depth": v.depth}
    if certificate_path is not None:
        out["certificate_path"] = certificate_path
    return out
