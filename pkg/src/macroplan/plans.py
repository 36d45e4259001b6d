"""Macro arena, expanded lengths, plan expansion and validation."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .core import Action, Macro, PartialState, first_violation, seq_post
from .errors import LimitExceeded, MacroError, UnknownStep

DEFAULT_VALIDATION_BUDGET = 10**6


class MacroArena:
    """Append-only store of macros.

    A macro may only reference macros already in the arena, so the
    reference graph is a DAG by construction. Every insertion is checked
    for well-definedness.
    """

    def __init__(self, check=True):
        self.macros = []
        self.check = check
        self._by_owner = {}

    def __len__(self):
        return len(self.macros)

    def __getitem__(self, mid):
        return self.macros[mid]

    def __iter__(self):
        return iter(self.macros)

    def owned_by(self, var):
        return list(self._by_owner.get(var, ()))

    def new_macro(self, owner, pre: PartialState, steps, post: PartialState) -> Macro:
        steps = tuple(steps)
        mid = len(self.macros)
        length = 0
        for step in steps:
            if isinstance(step, Macro):
                if not (step.id < mid and self.macros[step.id] is step):
                    raise MacroError(f"m{mid} references a macro outside the arena")
            elif not isinstance(step, Action):
                raise UnknownStep(f"unknown step {step!r}")
            length += step.length
        if self.check:
            bad = first_violation(steps, pre)
            if bad is not None:
                raise MacroError(f"m{mid}: step {bad} ({steps[bad].name}) not applicable")
            if pre.compose(seq_post(steps)) != post:
                raise MacroError(f"m{mid}: post-condition does not follow from its steps")
        m = Macro(mid, owner, pre, steps, post, length)
        self.macros.append(m)
        self._by_owner.setdefault(owner, []).append(m)
        return m


def expanded_length(steps) -> int:
    """Number of primitive actions; macro lengths are computed once at creation."""
    if isinstance(steps, (Action, Macro)):
        return steps.length
    return sum(step.length for step in steps)


def iter_actions(steps: Sequence) -> Iterator[Action]:
    """Unfold a step sequence left to right without materialising it."""
    stack = [(tuple(steps), 0)]
    while stack:
        seq, i = stack.pop()
        if i >= len(seq):
            continue
        stack.append((seq, i + 1))
        step = seq[i]
        if isinstance(step, Macro):
            stack.append((step.steps, 0))
        elif isinstance(step, Action):
            yield step
        else:
            raise UnknownStep(f"unknown step {step!r}")


def expand(steps: Sequence, limit: int) -> list:
    if limit < 0:
        raise ValueError("limit must be non-negative")
    n = expanded_length(steps)
    if n > limit:
        raise LimitExceeded(n, limit)
    return list(iter_actions(steps))


def macros_in(steps) -> list:
    """Distinct macros reachable from ``steps``, in discovery order."""
    seen = {}
    stack = [s for s in reversed(tuple(steps)) if isinstance(s, Macro)]
    while stack:
        m = stack.pop()
        if m.id in seen:
            continue
        seen[m.id] = m
        stack.extend(s for s in reversed(m.steps) if isinstance(s, Macro))
    return list(seen.values())


@dataclass
class Validation:
    ok: bool
    index: int | None = None
    reason: str = ""
    mode: str = "flat"

    def __bool__(self):
        return self.ok


def validate(steps: Sequence, problem, budget: int = DEFAULT_VALIDATION_BUDGET) -> Validation:
    """Check that ``steps`` is well-defined from init and reaches the goal.

    Plans up to ``budget`` actions are simulated action by action and a
    failure reports the index of the first bad action. Longer plans are
    checked hierarchically: every macro in the DAG is verified once
    against its own pre/post, then the top-level sequence is simulated.
    """
    steps = tuple(steps)
    if expanded_length(steps) <= budget:
        state = problem.init
        for i, a in enumerate(iter_actions(steps)):
            if not state.matches(a.pre):
                return Validation(False, i, f"action {i} ({a.name}) not applicable")
            state = state.compose(a.post)
        if not state.matches(problem.goal):
            return Validation(False, None, "final state does not satisfy the goal")
        return Validation(True)

    for m in sorted(macros_in(steps), key=lambda m: m.id):
        bad = first_violation(m.steps, m.pre)
        if bad is not None:
            return Validation(False, None, f"macro m{m.id} is not well-defined at step {bad}", "hierarchical")
        if m.pre.compose(seq_post(m.steps)) != m.post:
            return Validation(False, None, f"macro m{m.id} has an inconsistent post-condition", "hierarchical")
    bad = first_violation(steps, problem.init)
    if bad is not None:
        return Validation(False, bad, f"top-level step {bad} not applicable", "hierarchical")
    final = problem.init.compose(seq_post(steps))
    if not final.matches(problem.goal):
        return Validation(False, None, "final state does not satisfy the goal", "hierarchical")
    return Validation(True, mode="hierarchical")


@dataclass
class Metrics:
    states_visited: Counter = field(default_factory=Counter)
    solve_calls: Counter = field(default_factory=Counter)
    macros_generated: int = 0
    macros_used: int = 0
    expanded_length: int = 0
    frontier_peak: int = 0
    max_search_nodes: Counter = field(default_factory=Counter)

    def note_frontier(self, size):
        if size > self.frontier_peak:
            self.frontier_peak = size

    def as_dict(self):
        return {
            "macros_generated": self.macros_generated,
            "macros_used": self.macros_used,
            "expanded_length": str(self.expanded_length),
            "frontier_peak": self.frontier_peak,
            "states_visited": dict(self.states_visited),
        }


@dataclass
class PlanResult:
    """Outcome of a planner run: the plan as a step sequence plus bookkeeping."""

    plan: tuple
    arena: MacroArena
    metrics: Metrics
    planner: str
    solutions: list = field(default_factory=list)
    solver: object = None

    @property
    def length(self) -> int:
        return expanded_length(self.plan)
