"""Goal-driven planner for acyclic problems with reversible variables.

Each macro changes exactly one variable and leaves every other variable
as it found it. Results of both the compose and the solve step are
memoised; the solve memo key relies on variables outside W still holding
their initial values, which is asserted on every call.
"""
from __future__ import annotations

import logging

from .core import first_violation, seq_post
from .errors import CyclicGraphError, MemoKeyViolation, NoPlan
from .graphs import CONVENTIONAL, RELAXED, graph_of_kind, relaxed_causal_graph, w_set
from .plans import MacroArena, Metrics, PlanResult, macros_in

log = logging.getLogger(__name__)

# process-wide tally of memo-key checks, read by the test suite
memo_stats = {"checked": 0, "violations": 0}


def pick_kind(problem, kind=None):
    """Graph kind to plan with: the requested one, else conventional if acyclic, else relaxed."""
    if kind is not None:
        g = graph_of_kind(problem, kind)
        g.topological_order()
        return kind, g
    for k in (CONVENTIONAL, RELAXED):
        g = graph_of_kind(problem, k)
        if g.is_acyclic():
            return k, g
    g = relaxed_causal_graph(problem, orient_coupled=True)
    if g.is_acyclic():
        log.warning("both causal graphs are cyclic; orienting variables that always change together")
        return "relaxed-oriented", g
    raise CyclicGraphError("both causal graphs are cyclic")


class ReversibleSolver:
    def __init__(self, problem, graph, arena=None, metrics=None, check_memo=True):
        self.problem = problem
        self.init = problem.init
        self.G = graph
        self.kind = graph.kind
        self.arena = arena if arena is not None else MacroArena()
        self.metrics = metrics if metrics is not None else Metrics()
        self.check_memo = check_memo
        self.pos = {v: i for i, v in enumerate(graph.topological_order())}
        self.actions = [a for a in problem.actions if not a.dummy]
        self._W = {}
        self._A = {}
        self._vv = {}
        self._outside = {}
        self.solve_memo = {}
        self.compose_memo = {}

    def vv(self, v):
        r = self._vv.get(v)
        if r is None:
            r = self._vv[v] = self.G.ancestors(v) | {v}
        return r

    def W(self, v):
        r = self._W.get(v)
        if r is None:
            # v itself belongs to W even when no action changes it
            r = self._W[v] = w_set(self.G, self.actions, v) | {v}
            self._outside[v] = self.vv(v) - r
        return r

    def A(self, v):
        r = self._A.get(v)
        if r is None:
            desc = self.G.descendants(v)
            r = [a for a in self.actions if v in a.post]
            if self.kind == RELAXED:
                r = [a for a in r if not (a.post.scope & desc)]
            self._A[v] = r
        return r

    def compose(self, U, s, x):
        """Steps setting ``x`` from ``s`` and steps undoing it outside ``U``; None on failure."""
        U = frozenset(U) & x.scope
        relevant = set()
        for w in x:
            relevant |= self.vv(w)
        key = (U, s.restrict(relevant), x)
        if key in self.compose_memo:
            return self.compose_memo[key]
        seq, seq2 = [], []
        result = None
        for w in sorted(x, key=self.pos.__getitem__):
            if x[w] == s[w]:
                continue
            m = self.solve(w, s, x[w])
            if m is None:
                break
            seq.insert(0, m)
            if w not in U:
                back = self.solve(w, s.set(w, x[w]), s[w])
                if back is None:
                    break
                seq2.append(back)
        else:
            result = (tuple(seq), tuple(seq2))
        self.compose_memo[key] = result
        return result

    def solve(self, v, s, d):
        """A macro changing v from s(v) to d and nothing else, or None."""
        W = self.W(v)
        if self.check_memo:
            outside = self._outside[v]
            memo_stats["checked"] += 1
            if s.restrict(outside) != self.init.restrict(outside):
                memo_stats["violations"] += 1
                raise MemoKeyViolation(f"{self.problem.schema.names[v]}: variable outside W left its initial value")
        start = s.restrict(W)
        key = (v, start, d)
        if key in self.solve_memo:
            return self.solve_memo[key]
        self.metrics.solve_calls[v] += 1
        target = start.set(v, d)
        frontier = [(start, ())]
        seen = {start}
        found = None
        i = 0
        while i < len(frontier):
            p, seq = frontier[i]
            i += 1
            if p == target:
                found = seq
                break
            pv = p[v]
            base = s.compose(p)
            for a in self.A(v):
                if a.pre.get(v, pv) != pv:
                    continue
                q = p.compose(a.post.restrict(W))
                if q in seen:
                    continue
                legs = self.compose(a.post.scope, base, a.pre)
                if legs is None:
                    continue
                seq2, seq3 = legs
                block = seq2 + (a,) + seq3
                if not self._block_ok(base, block, a, v):
                    continue
                seen.add(q)
                frontier.append((q, seq + block))
        self.metrics.states_visited[v] += len(seen)
        if len(seen) > self.metrics.max_search_nodes[v]:
            self.metrics.max_search_nodes[v] = len(seen)
        m = None
        if found is not None:
            pre = s.restrict(self.vv(v))
            m = self.arena.new_macro(v, pre, found, pre.set(v, d))
            self.metrics.macros_generated += 1
        self.solve_memo[key] = m
        return m

    def _block_ok(self, base, block, a, v):
        # always true for unary actions; guards the non-unary cases where
        # resetting a pre-condition variable interferes with the action
        if a.unary:
            return True
        if first_violation(block, base) is not None:
            return False
        vv = self.vv(v)
        return base.compose(seq_post(block)).restrict(vv) == base.compose(a.post).restrict(vv)


def reversible_planner(problem, kind=None, check_memo=True) -> PlanResult:
    """Plan by setting goal variables one at a time with reversible macros.

    Raises NoPlan on failure; for problems with non-unary actions a
    failure does not prove the problem unsolvable.
    """
    kind, G = pick_kind(problem, kind)
    arena, metrics = MacroArena(), Metrics()
    solver = ReversibleSolver(problem, G, arena, metrics, check_memo)
    # goal variables are never reset at the top level, so no undo macros are built
    legs = solver.compose(problem.goal.scope, problem.init, problem.goal)
    if legs is None:
        raise NoPlan("reversible planner failed")
    plan = legs[0]
    metrics.macros_used = len(macros_in(plan))
    result = PlanResult(plan, arena, metrics, f"ar[{kind}]")
    metrics.expanded_length = result.length
    return result
