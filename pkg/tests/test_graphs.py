import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from macroplan import Action, PartialState, PlanningProblem, Schema, generate, DomainSpec
from macroplan.errors import CyclicGraphError
from macroplan.graphs import (RELAXED, CausalGraph, Verdict, causal_graph, classify,
                              is_reversible, normalize, relaxed_causal_graph, transitive_reduction, w_set)

from helpers import shortcut_problem, random_problem


def test_reduction_drops_shortcut_edges():
    p = shortcut_problem()
    g = causal_graph(p)
    assert g.edges == {(0, 2), (1, 3), (0, 4), (1, 4), (2, 4), (3, 4)}
    r = transitive_reduction(g)
    assert r.edges == {(0, 2), (1, 3), (2, 4), (3, 4)}
    assert r.parents(4) == [2, 3]
    assert r.is_inverted_tree()
    assert classify(p).ir == Verdict.YES


def test_topological_order_and_cycles():
    g = CausalGraph(range(3), [(2, 1), (1, 0)])
    assert g.topological_order() == (2, 1, 0)
    c = CausalGraph(range(2), [(0, 1), (1, 0)])
    assert not c.is_acyclic()
    with pytest.raises(CyclicGraphError):
        transitive_reduction(c)
    assert c.descendants(0) == {0, 1}


def test_inverted_tree_shapes():
    assert CausalGraph(range(3), [(0, 2), (1, 2)]).is_inverted_tree()
    assert not CausalGraph(range(3), [(0, 1), (0, 2)]).is_inverted_tree()
    assert not CausalGraph(range(2), []).is_inverted_tree()


def test_hanoi_graph_is_complete_order():
    p = generate(DomainSpec("hanoi", {"n": 4}))
    g = causal_graph(p)
    assert len(g.edges) == 6
    r = transitive_reduction(g)
    assert r.edges == {(0, 1), (1, 2), (2, 3)}


def test_relaxed_graph_drops_independent_direction():
    p = generate(DomainSpec("rir_pair"))
    conv = causal_graph(p)
    rel = relaxed_causal_graph(p)
    assert not conv.is_acyclic()
    assert rel.is_acyclic()
    assert len(rel.edges) == 1


def test_gripper_relaxed_graph():
    p = generate(DomainSpec("gripper", {"n": 2}))
    assert not causal_graph(p).is_acyclic()
    rel = relaxed_causal_graph(p)
    assert rel.is_acyclic()
    names = p.schema.names
    edges = {(names[a], names[b]) for a, b in transitive_reduction(rel).edges}
    assert edges == {("vl", "vh"), ("vh", "v1"), ("vh", "v2")}


def test_gripper_single_ball_needs_orientation():
    p = generate(DomainSpec("gripper", {"n": 1}))
    assert not relaxed_causal_graph(p).is_acyclic()
    assert relaxed_causal_graph(p, orient_coupled=True).is_acyclic()


def test_normalize_adds_dummy_and_eliminates_sinks():
    p = shortcut_problem()
    # with goal v3 only, v4 and v5 are irrelevant sinks and v2 goes with them
    p = PlanningProblem(p.schema, p.init, p.schema.state(v3="1"), p.actions)
    (comp,) = normalize(p)
    names = comp.problem.schema.names
    assert [names[v] for v in comp.variables] == ["v1", "v3"]
    assert comp.reduction.parents(comp.vstar) == [2]
    assert comp.astar.pre == p.goal


def test_normalize_splits_components():
    schema = Schema.build([("a", "01"), ("b", "01")])
    s = schema.state
    acts = [Action(0, "x", PartialState(), s(a="1")), Action(1, "y", PartialState(), s(b="1"))]
    p = PlanningProblem(schema, s(a="0", b="0"), s(a="1", b="1"), acts)
    comps = normalize(p)
    assert len(comps) == 2


def test_reversibility_verdicts():
    p = generate(DomainSpec("fig5"))
    assert is_reversible(p, 0) == Verdict.NO
    p = generate(DomainSpec("fig5", {"reversible": True}))
    assert is_reversible(p, 0) == Verdict.YES
    h = generate(DomainSpec("hanoi", {"n": 6}))
    assert is_reversible(h, 5, budget=10) == Verdict.UNKNOWN


def test_w_set_is_subset_of_closure():
    p = generate(DomainSpec("logistics"))
    g = causal_graph(p)
    for v in g.nodes:
        assert w_set(g, p.actions, v) <= g.ancestors(v) | {v}


def test_classify_examples():
    g2 = classify(generate(DomainSpec("gripper", {"n": 2})))
    assert g2.ir == Verdict.NO
    assert g2.ar[RELAXED] == Verdict.YES
    pair = classify(generate(DomainSpec("rir_pair")))
    assert pair.ir == Verdict.NO and pair.rir == Verdict.YES
    for kind in ("hanoi", "jb_counter", "dd_chain"):
        assert classify(generate(DomainSpec(kind, {"n": 4})), reversibility=False).ir == Verdict.YES


# random DAGs checked against networkx ------------------------------------

@st.composite
def dags(draw):
    n = draw(st.integers(1, 9))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    perm = draw(st.permutations(range(n)))
    return CausalGraph(range(n), [(perm[i], perm[j]) for i, j in edges])


@settings(max_examples=300, deadline=None)
@given(dags())
def test_reduction_matches_networkx(g):
    ref = nx.DiGraph()
    ref.add_nodes_from(g.nodes)
    ref.add_edges_from(g.edges)
    assert transitive_reduction(g).edges == set(nx.transitive_reduction(ref).edges)
    for v in g.nodes:
        assert g.ancestors(v) == nx.ancestors(ref, v)
        assert g.descendants(v) == nx.descendants(ref, v)


def test_relaxed_graph_is_subgraph_of_conventional():
    for seed in range(300):
        p = random_problem(seed, acyclic=False, nonunary=0.4)
        assert relaxed_causal_graph(p).edges <= causal_graph(p).edges
