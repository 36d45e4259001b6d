"""Planner for acyclic problems where only branching variables must be reversible.

Variables with outdegree > 1 in the reduced graph, together with their
ancestors, are handled by the reversible solver and kept at their
initial values between actions. Every other variable gets exhaustive
shortest macros as in the tree planner, generated on demand.
"""
from __future__ import annotations

import heapq
import itertools
import logging
from collections import defaultdict
from .core import PartialState, PlanningProblem, Action
from .errors import ClassViolation, NoPlan, ResourceLimit
from .graphs import RELAXED, Verdict, is_reversible, transitive_reduction
from .oracle import default_state_cap
from .plans import MacroArena, Metrics, PlanResult, macros_in
from .reversible import ReversibleSolver, pick_kind

log = logging.getLogger(__name__)

DEFAULT_COMPOSE_CAP = 10**5
_FAIL = None


def _augment(problem):
    schema = problem.schema.with_dummy()
    vstar = len(problem.schema)
    next_id = max((a.id for a in problem.actions), default=-1) + 1
    astar = Action(next_id, "a*", problem.goal, PartialState({vstar: 1}), dummy=True)
    actions = [a for a in problem.actions if not a.dummy] + [astar]
    aug = PlanningProblem(schema, problem.init.set(vstar, 0), problem.goal, actions,
                          tuple(problem.variables) + (vstar,))
    return aug, vstar


def _apply_posts(p, steps):
    for step in steps:
        p = p.compose(step.post)
    return p


class AcyclicSolver:
    def __init__(self, problem, graph, arena, metrics, compose_cap=DEFAULT_COMPOSE_CAP, check_memo=True):
        self.problem = problem
        self.G = graph
        self.R = transitive_reduction(graph)
        self.kind = graph.kind
        self.arena = arena
        self.metrics = metrics
        self.compose_cap = compose_cap
        self.init = problem.init
        self.rev = ReversibleSolver(problem, graph, arena, metrics, check_memo)
        self.branching = {v for v in self.R.nodes if self.R.outdegree(v) > 1}
        H = set(self.branching)
        for v in self.branching:
            H |= self.R.ancestors(v)
        self.H = frozenset(H)
        self.vv = {v: self.R.ancestors(v) | {v} for v in self.R.nodes}
        self.desc = {v: self.R.descendants(v) for v in self.R.nodes}
        self.memo = {}
        # closed search states per variable, kept for inspection
        self.visited = defaultdict(set)

    def compose(self, v, s, x, U=frozenset(), first_only=False, h_part=True):
        """Returns (S, seq, seq2) or None.

        S holds the alternative macro sequences for the non-branching
        parents; seq sets the branching part of x and seq2 undoes it.
        """
        H = self.H
        xp = PartialState({w: d for w, d in x.items() if w not in H})
        options = []
        for w in self.R.parents(v):
            if w in H:
                continue
            xw = xp.restrict(self.vv[w])
            sw = s.restrict(self.vv[w])
            if not xw or sw.matches(xw):
                continue
            T = [m for m in self.solve(w, sw) if m.post.matches(xw)]
            if not T:
                return _FAIL
            options.append(T[:1] if first_only else T)
        size = 1
        for T in options:
            size *= len(T)
        if size > self.compose_cap:
            raise ResourceLimit(f"compose would produce {size} sequences (cap {self.compose_cap})")
        S = [(combo, sum(m.length for m in combo)) for combo in itertools.product(*options)]
        xh = PartialState({w: d for w, d in x.items() if w in H})
        if not h_part or not xh or s.restrict(H).matches(xh):
            return S, (), ()
        legs = self.rev.compose(U, s, xh)
        if legs is None:
            return _FAIL
        return S, legs[0], legs[1]

    def _sets(self, v):
        desc = self.desc[v]
        ops, Z = [], []
        seen = set()
        for a in self.problem.actions:
            post = a.post.scope
            touches = bool(post & desc)
            if v in post and not (self.kind == RELAXED and touches):
                ops.append(a)
            if touches:
                z = a.pre.restrict(self.vv[v])
                if z and z not in seen:
                    seen.add(z)
                    Z.append(z)
        return ops, Z

    def solve(self, v, s):
        """All shortest macros for ``v`` from ``s``, sorted by length."""
        key = (v, s)
        if key in self.memo:
            return self.memo[key]
        metrics = self.metrics
        metrics.solve_calls[v] += 1
        ops, Z = self._sets(v)
        tick = itertools.count()
        heap = [(0, next(tick), s)]
        best = {s: (0, ())}
        closed = set()
        emitted = {}
        while heap:
            metrics.note_frontier(len(heap))
            length, _, p = heapq.heappop(heap)
            if p in closed or best[p][0] != length:
                continue
            closed.add(p)
            seq = best[p][1]
            pv = p[v]
            for a in ops:
                if a.pre.get(v, pv) != pv:
                    continue
                r = self.compose(v, p, a.pre, a.post.scope)
                if r is _FAIL:
                    continue
                S, seq2, seq3 = r
                tail = seq2 + (a,) + seq3
                ltail = sum(x.length for x in tail)
                for seq4, l4 in S:
                    q = _apply_posts(p, seq4 + tail)
                    self._check_reset(q, a)
                    lq = length + l4 + ltail
                    inc = best.get(q)
                    if inc is None or lq < inc[0]:
                        best[q] = (lq, seq + seq4 + tail)
                        heapq.heappush(heap, (lq, next(tick), q))
            for z in Z:
                if z.get(v, pv) != pv:
                    continue
                r = self.compose(v, p, z, h_part=False)
                if r is _FAIL:
                    continue
                for seq4, l4 in r[0]:
                    t = _apply_posts(p, seq4)
                    lt = length + l4
                    inc = emitted.get(t)
                    if inc is None or lt < inc[0]:
                        emitted[t] = (lt, next(tick), seq + seq4)
        metrics.states_visited[v] += len(closed)
        self.visited[v] |= closed
        if len(closed) > metrics.max_search_nodes[v]:
            metrics.max_search_nodes[v] = len(closed)
        out = []
        for t, (lt, _, steps) in sorted(emitted.items(), key=lambda kv: kv[1][:2]):
            out.append(self.arena.new_macro(v, s, steps, t))
        metrics.macros_generated += len(out)
        self.memo[key] = out
        return out

    def _check_reset(self, q, a):
        for w in self.H:
            if w in q and w not in a.post and q[w] != self.init[w]:
                raise AssertionError(f"{self.problem.schema.names[w]} not reset after {a.name}")


def _check_class(problem, G, R, budget, force, assume_reversible):
    branching = [v for v in R.nodes if R.outdegree(v) > 1]
    for v in branching:
        verdict = is_reversible(problem, v, budget, graph=G)
        name = problem.schema.names[v]
        if verdict == Verdict.NO and not force:
            raise ClassViolation(f"{name} has outdegree > 1 but is not reversible")
        if verdict == Verdict.UNKNOWN:
            if not (assume_reversible or force):
                raise ClassViolation(f"reversibility of {name} unknown within the state budget")
            log.warning("assuming %s is reversible", name)


def acyclic_planner(problem, kind=None, all_solutions=False, force=False, assume_reversible=False,
                    budget=None, compose_cap=DEFAULT_COMPOSE_CAP, check_memo=True) -> PlanResult:
    """Plan for AOR problems.

    By default the first macro per goal-side parent is used; with
    ``all_solutions`` every combination is returned in ``result.solutions``.
    """
    aug, vstar = _augment(problem)
    kind, G = pick_kind(aug, kind)
    R = transitive_reduction(G)
    if budget is None:
        budget = default_state_cap()
    _check_class(aug, G, R, budget, force, assume_reversible)
    arena, metrics = MacroArena(), Metrics()
    solver = AcyclicSolver(aug, G, arena, metrics, compose_cap, check_memo)
    r = solver.compose(vstar, aug.init, problem.goal, problem.goal.scope, first_only=not all_solutions)
    if r is _FAIL or not r[0]:
        raise NoPlan("acyclic planner failed")
    S, seq, _ = r
    solutions = [tuple(s) + tuple(seq) for s, _ in S]
    plan = solutions[0]
    metrics.macros_used = len(macros_in(plan))
    result = PlanResult(plan, arena, metrics, f"aor[{kind}]", solutions, solver)
    metrics.expanded_length = result.length
    return result
