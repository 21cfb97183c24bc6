"""Command-line interface.

Exit codes are a stable contract: 0 = success / Defender survives,
1 = Attacker wins, 2 = validation or usage error, 3 = resource budget
exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Optional

from .codec import PdsDocument, parse_config_tokens, parse_pds, render_config, render_pds
from .errors import PdbisimError, ResourceLimitError
from .game import GamePosition, decide_game
from .lts import SystemLts
from .pcp import (
    ReductionOptions,
    ReductionOutput,
    build_reduction,
    manifest_dict,
    parse_instance,
    reduction_from_manifest,
)
from .pds import normedness_check, reachable
from .serialize import canonical_dumps, certificate_json, position_json
from . import service

EXIT_SURVIVES = 0
EXIT_ATTACKER = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3


def _manifest_path(system_path: str) -> str:
    stem, _ = os.path.splitext(system_path)
    return stem + ".manifest.json"


def load_system(system_path: str, manifest_path: Optional[str]):
    """Returns (lts, document, reduction-or-None).

    With a manifest the reduction is rebuilt from its instance and options,
    restoring framed marks and generator-backed transitions; the system file
    must agree with the rebuild.
    """
    with open(system_path, encoding="utf-8") as fh:
        doc = parse_pds(fh.read())
    path = manifest_path or _manifest_path(system_path)
    if manifest_path or os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            reduction = reduction_from_manifest(json.load(fh))
        if reduction.system.rules != doc.system.rules:
            raise PdbisimError(
                f"{system_path} does not match the reduction in {path}; "
                "regenerate the pair with `pdbisim reduce`"
            )
        return reduction.lts(), doc, reduction
    return SystemLts(doc.system), doc, None


def resolve_start(args, doc: PdsDocument, reduction: Optional[ReductionOutput]) -> GamePosition:
    left = parse_config_tokens(args.left.split()) if args.left else None
    right = parse_config_tokens(args.right.split()) if args.right else None
    if left and right:
        return GamePosition(left, right)
    if reduction is not None:
        base = reduction.start
    elif len(doc.starts) == 2:
        base = GamePosition(doc.starts[0], doc.starts[1])
    elif left or right:
        raise PdbisimError("both --left and --right are needed without a start pair")
    else:
        raise PdbisimError("no start pair: give two start lines, a manifest, or --left/--right")
    return GamePosition(left or base.left, right or base.right)


def cmd_reduce(args) -> int:
    with open(args.instance, encoding="utf-8") as fh:
        inst = parse_instance(fh.read())
    options = ReductionOptions(args.order, args.style, args.normed)
    out = build_reduction(inst, options)
    doc = PdsDocument(out.system, (out.start.left, out.start.right))
    target = args.output or (os.path.splitext(args.instance)[0] + ".pds")
    with open(target, "w", encoding="utf-8") as fh:
        fh.write(render_pds(doc))
    manifest = args.manifest or _manifest_path(target)
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(manifest_dict(out)) + "\n")
    print(f"wrote {target} ({len(out.system.rules)} rules, "
          f"{len(out.framed_rules)} framed) and {manifest}")
    return 0


def cmd_solve(args) -> int:
    lts, doc, reduction = load_system(args.system, args.manifest)
    pos = resolve_start(args, doc, reduction)
    verdict = decide_game(
        lts, pos, args.depth,
        equality_shortcircuit=not args.no_eq_shortcut,
        node_budget=args.budget,
    )
    cert_path = None
    cert_sha = None
    if verdict.certificate is not None:
        cert_path = args.cert_out or (os.path.splitext(args.system)[0] + ".cert.json")
        payload = canonical_dumps(certificate_json(verdict.certificate))
        with open(cert_path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        cert_sha = hashlib.sha256(payload.encode()).hexdigest()
    report = {
        "verdict": verdict.kind,
        "depth": verdict.depth,
        "position": position_json(pos),
    }
    if cert_path:
        report["certificate_path"] = cert_path
        report["certificate_sha256"] = cert_sha
    if args.json:
        print(canonical_dumps(report))
    else:
        print(f"{verdict.kind} (depth {verdict.depth}) from {pos.render()}")
        if cert_path:
            print(f"certificate: {cert_path} sha256={cert_sha}")
    return EXIT_ATTACKER if verdict.attacker_wins else EXIT_SURVIVES


def cmd_export(args) -> int:
    lts, doc, reduction = load_system(args.system, args.manifest)
    if args.config:
        roots = [parse_config_tokens(args.config.split())]
    elif reduction is not None:
        roots = [reduction.start.left, reduction.start.right]
    elif doc.starts:
        roots = list(doc.starts)
    else:
        raise PdbisimError("no start configuration: add a start line or --config")
    seen = set()
    truncated = False
    for root in roots:
        space, cut = reachable(doc.system, root, args.depth, args.size, step=lts.successors)
        seen |= space
        truncated = truncated or cut
    framed = getattr(lts, "framed", lambda *a: False)
    lines = ["digraph lts {"]
    lines.append(f'  // depth {args.depth}, nodes {len(seen)}, truncated {str(truncated).lower()}')
    lines.append('  node [shape=box, fontname="monospace"];')
    order = {c: i for i, c in enumerate(sorted(seen))}
    for c in sorted(seen):
        shape = ', style=bold' if any(c == r for r in roots) else ''
        lines.append(f'  n{order[c]} [label="{c.render()}"{shape}];')
    for c in sorted(seen):
        for action, target in lts.successors(c):
            if target not in order:
                continue
            style = ' style=dashed color=red' if framed(c, action, target) else ''
            lines.append(
                f'  n{order[c]} -> n{order[target]} [label="{action.name}"{style}];'
            )
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.dot} ({len(seen)} nodes, truncated={truncated})")
    else:
        print(text, end="")
    return 0


def cmd_check_normed(args) -> int:
    lts, doc, reduction = load_system(args.system, args.manifest)
    if args.config:
        roots = [parse_config_tokens(args.config.split())]
    elif reduction is not None:
        roots = [reduction.start.left, reduction.start.right]
    elif doc.starts:
        roots = list(doc.starts)
    else:
        raise PdbisimError("no start configuration: add a start line or --config")
    worst = "normed-to-limit"
    for root in roots:
        verdict = normedness_check(
            doc.system, root, args.reach, args.norm, step=lts.successors
        )
        line = f"{render_config(root)}: {verdict.kind}"
        if verdict.witness is not None:
            line += f" (witness {verdict.witness.render()})"
        if verdict.reason:
            line += f" - {verdict.reason}"
        print(line)
        if verdict.kind == "not-normed" or (verdict.kind == "unknown" and worst != "not-normed"):
            worst = verdict.kind
    return 0


def cmd_play(args) -> int:
    options = _session_options(args)
    try:
        return service.play_stdio(options, sys.stdin, sys.stdout) or 0
    except BrokenPipeError:
        return 0  # reader went away; nothing left to say


def cmd_serve(args) -> int:
    service.serve(args.port)
    return 0


def _session_options(args) -> dict:
    options = {
        "role": args.role,
        "opponent": args.opponent,
        "order": args.order,
        "style": args.style,
        "normed": args.normed,
        "seed": args.seed,
        "max_rounds": args.max_rounds,
    }
    if args.oracle:
        options["oracle"] = args.oracle
    if args.manifest:
        with open(args.manifest, encoding="utf-8") as fh:
            data = json.load(fh)
        reduction = reduction_from_manifest(data)
        options.update(
            instance=[list(p) for p in reduction.instance.pairs],
            order=reduction.options.order,
            style=reduction.options.first_order_style,
            normed=reduction.options.normed,
        )
    elif args.instance:
        with open(args.instance, encoding="utf-8") as fh:
            options["instance"] = [list(p) for p in parse_instance(fh.read()).pairs]
    return options


def _add_session_args(p: argparse.ArgumentParser):
    p.add_argument("instance", nargs="?", help="instance file (defaults to the one-pair A/AA)")
    p.add_argument("--manifest", help="play a reduced system via its manifest "
                                      "(overrides the instance/order/style flags)")
    p.add_argument("--role", choices=["attacker", "defender"], default="attacker")
    p.add_argument("--opponent", default="random",
                   help="forcing | switch | search:K | random")
    p.add_argument("--order", type=int, choices=[1, 2], default=1)
    p.add_argument("--style", choices=["eps", "schema"], default="eps")
    p.add_argument("--normed", action="store_true")
    p.add_argument("--oracle", help="solution oracle, e.g. '1' or '1,2:2,1'")
    p.add_argument("--max-rounds", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdbisim",
        description="pushdown-system bisimulation games: reductions, solving, play",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="compile an instance file into a game system")
    p.add_argument("instance")
    p.add_argument("--order", type=int, choices=[1, 2], default=1)
    p.add_argument("--style", choices=["eps", "schema"], default="eps",
                   help="first-order switch encoding (ignored at order 2)")
    p.add_argument("--normed", action="store_true", help="add the emptying fix")
    p.add_argument("-o", "--output", help="output .pds path")
    p.add_argument("--manifest", help="manifest path (default: <output>.manifest.json)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="bounded game decision from the start pair")
    p.add_argument("system")
    p.add_argument("--manifest")
    p.add_argument("--depth", type=int, required=True, help="round budget")
    p.add_argument("--left", help="left configuration, e.g. 'q0 I1 ⊥'")
    p.add_argument("--right")
    p.add_argument("--no-eq-shortcut", action="store_true")
    p.add_argument("--budget", type=int, default=5_000_000, help="search node budget")
    p.add_argument("--cert-out", help="certificate output path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("export", help="DOT graph of the bounded reachable game graph")
    p.add_argument("system")
    p.add_argument("--manifest")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--size", type=int, default=2000, help="node cap")
    p.add_argument("--config", help="root configuration override")
    p.add_argument("--dot", help="output path (default: stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("check-normed", help="bounded normedness check")
    p.add_argument("system")
    p.add_argument("--manifest")
    p.add_argument("--reach", type=int, default=8)
    p.add_argument("--norm", type=int, default=64)
    p.add_argument("--config", help="root configuration override")
    p.set_defaults(func=cmd_check_normed)

    p = sub.add_parser("play", help="interactive stdio game (JSON lines)")
    _add_session_args(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("serve", help="HTTP session service for the web UI")
    _add_session_args(p)
    p.add_argument("--port", type=int, default=8642, help="0 picks a free port")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PdbisimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
