"""Explicit-state optimal planner used as ground truth.

Deliberately shares nothing with the macro planners beyond the problem
types: states are flat tuples and actions are compiled to index lists.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

from .errors import StateCapExceeded

DEFAULT_STATE_CAP = 10**6


def default_state_cap() -> int:
    return int(os.environ.get("MACROPLAN_STATE_CAP", DEFAULT_STATE_CAP))


@dataclass
class OracleResult:
    solvable: bool
    length: int | None = None
    plan: list | None = None
    states: int = 0


def oracle(problem, state_cap: int | None = None) -> OracleResult:
    """Breadth-first (uniform unit cost) search over the full state space."""
    if state_cap is None:
        state_cap = default_state_cap()
    order = list(problem.variables)
    pos = {v: i for i, v in enumerate(order)}
    compiled = []
    for a in problem.actions:
        if a.dummy:
            continue
        pre = [(pos[v], d) for v, d in a.pre.items()]
        post = [(pos[v], d) for v, d in a.post.items()]
        compiled.append((a, pre, post))
    goal = [(pos[v], d) for v, d in problem.goal.items()]

    start = tuple(problem.init[v] for v in order)
    parent = {start: None}
    frontier = deque([start])
    while frontier:
        s = frontier.popleft()
        if all(s[i] == d for i, d in goal):
            plan = []
            while parent[s] is not None:
                prev, a = parent[s]
                plan.append(a)
                s = prev
            plan.reverse()
            return OracleResult(True, len(plan), plan, len(parent))
        for a, pre, post in compiled:
            if all(s[i] == d for i, d in pre):
                t = list(s)
                for i, d in post:
                    t[i] = d
                t = tuple(t)
                if t not in parent:
                    parent[t] = (s, a)
                    if len(parent) > state_cap:
                        raise StateCapExceeded(state_cap)
                    frontier.append(t)
    return OracleResult(False, states=len(parent))
