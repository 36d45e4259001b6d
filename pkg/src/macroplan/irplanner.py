"""Exhaustive macro generation for inverted-tree reducible problems.

One implementation serves both graph kinds. With the conventional graph
it is the plain macro planner; with the relaxed graph the operator set
for a variable excludes actions that also touch its descendants, and
new subproblems start from the state left behind by such actions.
"""
from __future__ import annotations

import heapq
import itertools
import logging
from collections import defaultdict

from .errors import ClassViolation, NoPlan, ResourceLimit
from .graphs import CONVENTIONAL, RELAXED, normalize
from .plans import MacroArena, Metrics, PlanResult, macros_in

log = logging.getLogger(__name__)

DEFAULT_COMPOSE_CAP = 10**5


def _apply_posts(p, steps):
    for step in steps:
        p = p.compose(step.post)
    return p


class _TreeSolver:
    """Macro generation for one normalised component."""

    def __init__(self, comp, kind, arena, metrics, prune, compose_cap, force):
        self.comp = comp
        self.kind = kind
        self.arena = arena
        self.metrics = metrics
        self.prune = prune
        self.compose_cap = compose_cap
        self.problem = comp.problem
        self.init = comp.problem.init
        self.goal = comp.problem.goal
        R = comp.reduction
        self.R = R
        vstar = comp.vstar
        others = [v for v in R.nodes if v != vstar]
        if not force:
            bad = [v for v in others if R.outdegree(v) > 1]
            if bad:
                names = ", ".join(self.problem.schema.names[v] for v in bad)
                raise ClassViolation(f"reduced causal graph is not an inverted tree (outdegree > 1 at {names})")
        roots = R.parents(vstar)
        if len(roots) != 1 and not force:
            raise ClassViolation("reduced causal graph has more than one root")
        self.root = roots[0]
        self.vv = {v: R.ancestors(v) | {v} for v in others}
        self.desc = {v: R.descendants(v) for v in others}
        self.macros = defaultdict(list)
        self.by_pre = defaultdict(dict)
        self.done = set()
        self.visited_states = defaultdict(set)

    # subproblem definitions -------------------------------------------------

    def _sets(self, v):
        vv, desc = self.vv[v], self.desc[v]
        ops, z, seeds = [], [], []
        seen = set()
        for a in self.problem.actions:
            post = a.post.scope
            if self.kind == CONVENTIONAL:
                touches = post <= desc
                if v in post:
                    ops.append(a)
            else:
                touches = bool(post & desc)
                if v in post and not touches:
                    ops.append(a)
            if not touches:
                continue
            x = a.pre.restrict(vv)
            if not x:
                continue
            if x not in seen:
                seen.add(x)
                z.append(x)
            if not a.dummy:
                seeds.append(a)
        return ops, z, seeds

    def get_macros(self, v):
        if v in self.done:
            return self.macros[v]
        for w in self.R.parents(v):
            self.get_macros(w)
        ops, Z, seed_actions = self._sets(v)
        vv = self.vv[v]
        start = self.init.restrict(vv)
        L = [start]
        in_L = {start}
        processed = 0
        i = 0
        while i < len(L):
            s = L[i]
            i += 1
            self._solve(v, s, Z, ops)
            own = self.macros[v]
            for m in own[processed:]:
                for a in seed_actions:
                    if m.post.matches(a.pre):
                        t = m.post.compose(a.post.restrict(vv))
                        if t not in in_L:
                            in_L.add(t)
                            L.append(t)
            processed = len(own)
        if self.prune and self.kind == CONVENTIONAL:
            self._fail_fast(v, L)
        self.done.add(v)
        return self.macros[v]

    def _fail_fast(self, v, L):
        target = self.goal.restrict(self.vv[v])
        if not target:
            return
        good = set()
        for m in self.macros[v]:
            if m.post.matches(target):
                good.add(m.pre)
        bad = {s for s in L if s not in good}
        if self.init.restrict(self.vv[v]) in bad:
            raise NoPlan(f"goal unreachable for {self.problem.schema.names[v]}")
        if not bad:
            return
        keep = [m for m in self.macros[v] if m.pre not in bad and m.post not in bad]
        self.macros[v] = keep
        idx = {}
        for m in keep:
            idx.setdefault(m.pre, []).append(m)
        self.by_pre[v] = idx

    # search -----------------------------------------------------------------

    def compose(self, v, s, x):
        """All parent-macro sequences from ``s`` to a state matching ``x``.

        Yields (steps, length) pairs; a single empty sequence when ``s``
        already matches ``x``.
        """
        options = []
        for w in self.R.parents(v):
            vw = self.vv[w]
            xw = x.restrict(vw)
            if not xw:
                continue
            sw = s.restrict(vw)
            if sw.matches(xw):
                continue
            T = [m for m in self.by_pre[w].get(sw, ()) if m.post.matches(xw)]
            if not T:
                return []
            options.append(T)
        if not options:
            return [((), 0)]
        size = 1
        for T in options:
            size *= len(T)
        if size > self.compose_cap:
            raise ResourceLimit(f"compose would produce {size} sequences (cap {self.compose_cap})")
        out = []
        for combo in itertools.product(*options):
            out.append((combo, sum(m.length for m in combo)))
        return out

    def _reaches(self, v, t, p):
        """Length of the unique parent-macro sequence from t to total p, or None."""
        seqs = self.compose(v, t, p)
        if not seqs:
            return None
        return seqs[0][1]

    def _solve(self, v, s, Z, ops):
        metrics = self.metrics
        metrics.solve_calls[v] += 1
        tick = itertools.count()
        heap = [(0, next(tick), s)]
        best = {s: (0, ())}
        closed = set()
        emitted = {}
        by_value = defaultdict(list)
        nodes = 0
        last = 0
        while heap:
            metrics.note_frontier(len(heap))
            length, _, p = heapq.heappop(heap)
            if p in closed or best[p][0] != length:
                continue
            closed.add(p)
            assert length >= last
            last = length
            seq = best[p][1]
            pv = p[v]
            if self.prune and self._dominated(v, p, length, by_value[pv]):
                continue
            nodes += 1
            self.visited_states[v].add(p)
            for a in ops:
                if a.pre.get(v, pv) != pv:
                    continue
                for seq2, l2 in self.compose(v, p, a.pre):
                    q = _apply_posts(p, seq2).compose(a.post)
                    lq = length + l2 + 1
                    inc = best.get(q)
                    if inc is None or lq < inc[0]:
                        best[q] = (lq, seq + seq2 + (a,))
                        heapq.heappush(heap, (lq, next(tick), q))
            for z in Z:
                if z.get(v, pv) != pv:
                    continue
                for seq2, l2 in self.compose(v, p, z):
                    t = _apply_posts(p, seq2)
                    lt = length + l2
                    if self.prune and self._dominated_macro(v, t, lt, z, by_value[pv]):
                        continue
                    inc = emitted.get(t)
                    if inc is None or lt < inc[0]:
                        emitted[t] = (lt, next(tick), seq + seq2)
            by_value[pv].append((p, length))
        metrics.states_visited[v] = len(self.visited_states[v])
        if nodes > metrics.max_search_nodes[v]:
            metrics.max_search_nodes[v] = nodes
        out = []
        for t, (lt, order, steps) in sorted(emitted.items(), key=lambda kv: (kv[1][0], kv[1][1])):
            m = self.arena.new_macro(v, s, steps, t)
            self.macros[v].append(m)
            self.by_pre[v].setdefault(s, []).append(m)
            out.append(m)
        metrics.macros_generated += len(out)
        return out

    def _dominated(self, v, p, length, earlier):
        for t, lt in earlier:
            l3 = self._reaches(v, t, p)
            if l3 is not None and lt + l3 <= length:
                return True
        return False

    def _dominated_macro(self, v, target, length, z, earlier):
        for t, lt in earlier:
            if not t.matches(z):
                continue
            l3 = self._reaches(v, t, target)
            if l3 is not None and lt + l3 <= length:
                return True
        return False

    def solutions(self):
        self.get_macros(self.root)
        start = self.init.restrict(self.vv[self.root])
        sols = [m for m in self.by_pre[self.root].get(start, ()) if m.post.matches(self.goal)]
        sols.sort(key=lambda m: (m.length, m.id))
        return sols


def _run(problem, kind, prune, compose_cap, force, check, name):
    comps = normalize(problem, kind)
    arena = MacroArena(check=check)
    metrics = Metrics()
    plan, alternatives = [], []
    for comp in comps:
        solver = _TreeSolver(comp, kind, arena, metrics, prune, compose_cap, force)
        sols = solver.solutions()
        if not sols:
            raise NoPlan("no macro reaches the goal")
        alternatives.append(sols)
        plan.append(sols[0])
    plan = tuple(plan)
    metrics.macros_used = len(macros_in(plan))
    result = PlanResult(plan, arena, metrics, name, alternatives)
    metrics.expanded_length = result.length
    return result


def macroplanner(problem, prune=False, compose_cap=DEFAULT_COMPOSE_CAP, force=False, check=True) -> PlanResult:
    """Optimal planner for IR problems.

    Raises ClassViolation if a normalised component does not reduce to an
    inverted tree and NoPlan if the goal is unreachable.
    ``result.solutions`` holds every solution macro per component, best first.
    """
    return _run(problem, CONVENTIONAL, prune, compose_cap, force, check, "ir")


def relaxed_planner(problem, prune=False, compose_cap=DEFAULT_COMPOSE_CAP, force=False, check=True) -> PlanResult:
    """Optimal planner for RIR problems; same interface as :func:`macroplanner`."""
    return _run(problem, RELAXED, prune, compose_cap, force, check, "rir")


def tree_solver(problem, kind=CONVENTIONAL, prune=False, force=False):
    """Expose the per-component solver of a single-component problem, for inspection."""
    comps = normalize(problem, kind)
    if len(comps) != 1:
        raise ValueError("problem splits into several components")
    return _TreeSolver(comps[0], kind, MacroArena(), Metrics(), prune, DEFAULT_COMPOSE_CAP, force)


__all__ = ["macroplanner", "relaxed_planner", "tree_solver", "DEFAULT_COMPOSE_CAP"]
