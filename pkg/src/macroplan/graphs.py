"""Causal graphs, transitive reduction, normalisation and class membership."""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from enum import Enum

from .core import Action, PartialState, PlanningProblem
from .errors import CyclicGraphError
from .oracle import default_state_cap

log = logging.getLogger(__name__)

CONVENTIONAL = "conventional"
RELAXED = "relaxed"
KINDS = (CONVENTIONAL, RELAXED)


class Verdict(str, Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


def _bits(bitset):
    while bitset:
        low = bitset & -bitset
        yield low.bit_length() - 1
        bitset ^= low


class CausalGraph:
    """Directed graph over variable ids with cached ancestor/descendant sets."""

    def __init__(self, nodes, edges, kind=CONVENTIONAL):
        self.nodes = tuple(sorted(set(nodes)))
        self.edges = frozenset(edges)
        self.kind = kind
        self._succ = {v: set() for v in self.nodes}
        self._pred = {v: set() for v in self.nodes}
        for w, v in self.edges:
            self._succ[w].add(v)
            self._pred[v].add(w)
        self._anc = None
        self._desc = None
        self._topo = None

    def __repr__(self):
        return f"CausalGraph({self.kind}, {len(self.nodes)} nodes, {len(self.edges)} edges)"

    def parents(self, v):
        return sorted(self._pred[v])

    def children(self, v):
        return sorted(self._succ[v])

    def outdegree(self, v):
        return len(self._succ[v])

    def indegree(self, v):
        return len(self._pred[v])

    def sinks(self):
        return [v for v in self.nodes if not self._succ[v]]

    def topological_order(self):
        """Kahn's algorithm, smallest id first; raises on cycles."""
        if self._topo is None:
            indeg = {v: len(self._pred[v]) for v in self.nodes}
            heap = [v for v in self.nodes if indeg[v] == 0]
            heapq.heapify(heap)
            order = []
            while heap:
                v = heapq.heappop(heap)
                order.append(v)
                for c in self._succ[v]:
                    indeg[c] -= 1
                    if indeg[c] == 0:
                        heapq.heappush(heap, c)
            if len(order) != len(self.nodes):
                raise CyclicGraphError(f"{self.kind} causal graph has a cycle")
            self._topo = tuple(order)
        return self._topo

    def is_acyclic(self):
        try:
            self.topological_order()
        except CyclicGraphError:
            return False
        return True

    def _closure(self):
        # reachability by fixpoint over bitsets; works for cyclic graphs too
        if self._desc is not None:
            return
        desc = {v: 0 for v in self.nodes}
        if self.is_acyclic():
            for v in reversed(self.topological_order()):
                b = 0
                for c in self._succ[v]:
                    b |= (1 << c) | desc[c]
                desc[v] = b
        else:
            for v in self.nodes:
                seen, stack = 0, list(self._succ[v])
                while stack:
                    u = stack.pop()
                    if seen >> u & 1:
                        continue
                    seen |= 1 << u
                    stack.extend(self._succ[u])
                desc[v] = seen
        anc = {v: 0 for v in self.nodes}
        for v in self.nodes:
            for u in _bits(desc[v]):
                anc[u] |= 1 << v
        self._desc, self._anc = desc, anc

    def ancestors(self, v) -> frozenset:
        self._closure()
        return frozenset(_bits(self._anc[v]))

    def descendants(self, v) -> frozenset:
        self._closure()
        return frozenset(_bits(self._desc[v]))

    def closure_edges(self):
        self._closure()
        return {(v, u) for v in self.nodes for u in _bits(self._desc[v])}

    def weak_components(self):
        seen, comps = set(), []
        for v in self.nodes:
            if v in seen:
                continue
            comp, stack = set(), [v]
            while stack:
                u = stack.pop()
                if u in comp:
                    continue
                comp.add(u)
                stack.extend(self._succ[u] | self._pred[u])
            seen |= comp
            comps.append(sorted(comp))
        return comps

    def is_inverted_tree(self):
        if not self.nodes or not self.is_acyclic():
            return False
        if any(len(self._succ[v]) > 1 for v in self.nodes):
            return False
        return len(self.sinks()) == 1


def causal_graph(problem: PlanningProblem, actions=None) -> CausalGraph:
    actions = problem.actions if actions is None else actions
    edges = set()
    for a in actions:
        src = a.pre.scope | a.post.scope
        for v in a.post:
            for w in src:
                if w != v:
                    edges.add((w, v))
    return CausalGraph(problem.variables, edges, CONVENTIONAL)


def relaxed_causal_graph(problem: PlanningProblem, actions=None, orient_coupled=False) -> CausalGraph:
    """Relaxed causal graph, clause by clause.

    With ``orient_coupled`` a pair of variables that can only ever change
    together (both edges exist solely through clause 2(b)) keeps just the
    edge from the smaller to the larger id. That graph is not the relaxed
    causal graph; it is offered as a fallback for the reversible planners.
    """
    actions = problem.actions if actions is None else actions
    scopes = {a.post.scope for a in actions}
    edges = set()
    only_b = set()
    pair_cache = {}

    def type2(w, v):
        key = (w, v)
        r = pair_cache.get(key)
        if r is None:
            # (a) some action changes w without v
            a_ = any(w in S and v not in S for S in scopes)
            # (b) no action changes v without w
            b_ = not any(w not in S and v in S for S in scopes)
            r = pair_cache[key] = (a_ or b_, b_ and not a_)
        return r

    clause1 = set()
    for a in actions:
        post = a.post.scope
        for v in post:
            for w in a.pre.scope - post:
                clause1.add((w, v))
            for w in post:
                if w != v:
                    ok, b_only = type2(w, v)
                    if ok:
                        edges.add((w, v))
                        if b_only:
                            only_b.add((w, v))
    edges |= clause1
    if orient_coupled:
        for w, v in list(only_b):
            if w > v and (v, w) in only_b and (w, v) not in clause1 and (v, w) not in clause1:
                edges.discard((w, v))
    return CausalGraph(problem.variables, edges, RELAXED)


def graph_of_kind(problem, kind, actions=None) -> CausalGraph:
    if kind == CONVENTIONAL:
        return causal_graph(problem, actions)
    if kind == RELAXED:
        return relaxed_causal_graph(problem, actions)
    raise ValueError(f"unknown graph kind {kind!r}")


def transitive_reduction(g: CausalGraph) -> CausalGraph:
    order = g.topological_order()  # raises on cycles
    reach = {}
    kept = set()
    for v in reversed(order):
        children = sorted(g._succ[v], key=order.index)
        # a child is redundant if it is reachable through another child
        via_others = 0
        for c in children:
            via_others |= reach[c]
        b = 0
        for c in children:
            if not via_others >> c & 1:
                kept.add((v, c))
            b |= (1 << c) | reach[c]
        reach[v] = b
    return CausalGraph(g.nodes, kept, g.kind)


@dataclass
class Component:
    """One independent subproblem produced by :func:`normalize`."""

    problem: PlanningProblem  # includes the dummy variable and action
    graph: CausalGraph
    reduction: CausalGraph
    vstar: int
    astar: Action

    @property
    def variables(self):
        return [v for v in self.problem.variables if v != self.vstar]


def _eliminable(v, actions, kind):
    if kind == CONVENTIONAL:
        return True
    # a sink of the relaxed graph may still share post-conditions with other
    # variables; dropping it would relax those actions
    return not any(v in a.post and len(a.post) > 1 for a in actions)


def normalize(problem: PlanningProblem, kind=CONVENTIONAL) -> list:
    """Eliminate non-goal sinks, split into weak components, add v* and a*.

    Returns a list of :class:`Component`, ordered by smallest variable id.
    """
    actions = [a for a in problem.actions if not a.dummy]
    variables = set(problem.variables)
    goal_vars = problem.goal.scope
    sub = problem
    while True:
        sub = PlanningProblem(problem.schema, problem.init.restrict(variables), problem.goal,
                              actions, tuple(sorted(variables)))
        g = graph_of_kind(sub, kind)
        g.topological_order()
        cands = [v for v in g.nodes
                 if v not in goal_vars and g.outdegree(v) == 0 and _eliminable(v, actions, kind)]
        if not cands:
            break
        v = cands[0]
        variables.discard(v)
        actions = [a for a in actions if v not in a.post.scope]
        if any(v in a.pre for a in actions):
            raise AssertionError("eliminated variable still read by an action")

    schema = problem.schema.with_dummy()
    vstar = len(problem.schema)
    next_id = max((a.id for a in problem.actions), default=-1) + 1
    comps = []
    for comp_vars in g.weak_components():
        cv = set(comp_vars)
        comp_actions = [a for a in actions if a.post.scope <= cv]
        goal = problem.goal.restrict(cv)
        astar = Action(next_id, "a*", goal, PartialState({vstar: 1}), dummy=True)
        init = problem.init.restrict(cv).set(vstar, 0)
        cp = PlanningProblem(schema, init, goal, comp_actions + [astar],
                             tuple(sorted(cv)) + (vstar,))
        cg = graph_of_kind(cp, kind)
        cr = transitive_reduction(cg)
        comps.append(Component(cp, cg, cr, vstar, astar))
    return comps


def variable_closure(g: CausalGraph, v) -> frozenset:
    """V_v: the variable together with its ancestors."""
    return g.ancestors(v) | {v}


def is_reversible(problem: PlanningProblem, v, budget: int | None = None, kind=CONVENTIONAL,
                  graph: CausalGraph | None = None) -> Verdict:
    """Explicit check that init restricted to V_v is reachable back from every
    reachable projected state. Unknown once more than ``budget`` states are seen."""
    if budget is None:
        budget = default_state_cap()
    g = graph if graph is not None else graph_of_kind(problem, kind)
    vv = sorted(variable_closure(g, v))
    vset = set(vv)
    pos = {u: i for i, u in enumerate(vv)}
    compiled = []
    for a in problem.actions:
        if a.dummy or not a.post.scope <= vset:
            continue
        if not a.pre.scope <= vset:
            continue
        compiled.append(([(pos[u], d) for u, d in a.pre.items()],
                         [(pos[u], d) for u, d in a.post.items()]))
    start = tuple(problem.init[u] for u in vv)
    index = {start: 0}
    states = [start]
    back = [[]]
    i = 0
    while i < len(states):
        s = states[i]
        for pre, post in compiled:
            if all(s[j] == d for j, d in pre):
                t = list(s)
                for j, d in post:
                    t[j] = d
                t = tuple(t)
                k = index.get(t)
                if k is None:
                    if len(states) >= budget:
                        return Verdict.UNKNOWN
                    k = index[t] = len(states)
                    states.append(t)
                    back.append([])
                back[k].append(i)
        i += 1
    # backward search from the initial projection
    seen = [False] * len(states)
    seen[0] = True
    stack = [0]
    while stack:
        k = stack.pop()
        for j in back[k]:
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return Verdict.YES if all(seen) else Verdict.NO


def w_set(g: CausalGraph, actions, v) -> frozenset:
    """Variables of V_v that some action changes together with v or a descendant."""
    target = g.descendants(v) | {v}
    vv = variable_closure(g, v)
    w = set()
    for a in actions:
        post = a.post.scope
        if post & target:
            w |= post & vv
    return frozenset(w)


@dataclass
class ClassReport:
    ir: Verdict
    rir: Verdict
    ar: dict
    aor: dict
    reversible: dict = field(default_factory=dict)
    acyclic: dict = field(default_factory=dict)
    max_domain: int = 0
    k: dict = field(default_factory=dict)

    def ar_any(self):
        return _best(self.ar.values())

    def aor_any(self):
        return _best(self.aor.values())

    def kind_for(self, cls):
        """Graph kind under which ``cls`` ('ar' or 'aor') holds, if any."""
        table = getattr(self, cls)
        for kind in KINDS:
            if table.get(kind) == Verdict.YES:
                return kind
        return None

    def summary(self):
        parts = [f"IR={self.ir}", f"RIR={self.rir}"]
        for kind in KINDS:
            if kind in self.ar:
                parts.append(f"AR[{kind}]={self.ar[kind]}")
        for kind in KINDS:
            if kind in self.aor:
                parts.append(f"AOR[{kind}]={self.aor[kind]}")
        return " ".join(parts)


def _best(verdicts):
    verdicts = list(verdicts)
    if Verdict.YES in verdicts:
        return Verdict.YES
    if Verdict.UNKNOWN in verdicts:
        return Verdict.UNKNOWN
    return Verdict.NO


def _all(verdicts):
    verdicts = list(verdicts)
    if Verdict.NO in verdicts:
        return Verdict.NO
    if Verdict.UNKNOWN in verdicts:
        return Verdict.UNKNOWN
    return Verdict.YES


def _tree_reducible(g: CausalGraph) -> Verdict:
    if not g.is_acyclic():
        return Verdict.NO
    return Verdict.YES if transitive_reduction(g).is_inverted_tree() else Verdict.NO


def classify(problem: PlanningProblem, budget: int | None = None, reversibility=True) -> ClassReport:
    """Membership in IR, RIR, AR and AOR.

    AR and AOR are reported per graph kind. With ``reversibility=False``
    only the structural classes are computed and AR/AOR are left empty.
    """
    if budget is None:
        budget = default_state_cap()
    graphs = {kind: graph_of_kind(problem, kind) for kind in KINDS}
    report = ClassReport(
        ir=_tree_reducible(graphs[CONVENTIONAL]),
        rir=_tree_reducible(graphs[RELAXED]),
        ar={}, aor={},
        max_domain=max(problem.schema.domain_size(v) for v in problem.variables),
    )
    for kind, g in graphs.items():
        report.acyclic[kind] = g.is_acyclic()
        if report.acyclic[kind]:
            report.k[kind] = max(len(w_set(g, problem.actions, v)) for v in g.nodes)
    if not reversibility:
        return report
    for kind, g in graphs.items():
        if not report.acyclic[kind]:
            report.ar[kind] = Verdict.NO
            report.aor[kind] = Verdict.NO
            continue
        r = transitive_reduction(g)
        rev = {}
        needed = [v for v in g.nodes if r.outdegree(v) > 1]
        for v in needed:
            rev[v] = is_reversible(problem, v, budget, kind, graph=g)
        report.aor[kind] = _all(rev.values())
        if report.aor[kind] == Verdict.NO:
            report.ar[kind] = Verdict.NO
        else:
            for v in g.nodes:
                if v not in rev:
                    rev[v] = is_reversible(problem, v, budget, kind, graph=g)
            report.ar[kind] = _all(rev.values())
        report.reversible[kind] = rev
    return report
