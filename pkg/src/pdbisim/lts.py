"""Transition-system views consumed by the game engine.

The engine only needs ``successors(configuration)``; wrappers here add
memoization, silent-step collapsing, generator-backed rule families, and the
``framed`` predicate used to badge forcing-gadget moves.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from .pds import Action, Configuration, PushdownSystem, collapsed_successors

FramedMark = tuple[str, str, str]  # (source control, action name, target control)


class SystemLts:
    """Collapsed (silent-free) view of a pushdown system, with a successor
    cache and an optional extra transition generator.

    ``extra`` transitions are appended after the rule-induced ones, in the
    order the generator yields them.
    """

    def __init__(
        self,
        system: PushdownSystem,
        framed_marks: frozenset[FramedMark] = frozenset(),
        extra: Optional[Callable[[Configuration], Sequence[tuple[Action, Configuration]]]] = None,
        closure_budget: Optional[int] = None,
    ):
        from .pds import DEFAULT_CLOSURE_BUDGET

        self.system = system
        self.framed_marks = framed_marks
        self._extra = extra
        self._closure_budget = closure_budget or DEFAULT_CLOSURE_BUDGET
        self._cache: dict[Configuration, tuple[tuple[Action, Configuration], ...]] = {}
        self._by_action: dict[Configuration, dict[Action, tuple[Configuration, ...]]] = {}

    def successors(self, c: Configuration) -> tuple[tuple[Action, Configuration], ...]:
        got = self._cache.get(c)
        if got is None:
            out = dict.fromkeys(
                collapsed_successors(self.system, c, closure_budget=self._closure_budget)
            )
            if self._extra is not None:
                for pair in self._extra(c):
                    out.setdefault(pair, None)
            got = self._cache[c] = tuple(out)
        return got

    def successors_by_action(self, c: Configuration) -> dict[Action, tuple[Configuration, ...]]:
        got = self._by_action.get(c)
        if got is None:
            grouped: dict[Action, list[Configuration]] = {}
            for a, t in self.successors(c):
                grouped.setdefault(a, []).append(t)
            got = self._by_action[c] = {a: tuple(ts) for a, ts in grouped.items()}
        return got

    def framed(self, source: Configuration, action: Action, target: Configuration) -> bool:
        return (source.control, action.name, target.control) in self.framed_marks


def successors_by_action(lts, c: Configuration) -> dict[Action, tuple[Configuration, ...]]:
    """Action-grouped successors; uses the lts's own cache when it has one."""
    grouper = getattr(lts, "successors_by_action", None)
    if grouper is not None:
        return grouper(c)
    grouped: dict[Action, list[Configuration]] = {}
    for a, t in lts.successors(c):
        grouped.setdefault(a, []).append(t)
    return {a: tuple(ts) for a, ts in grouped.items()}
