import pytest
from hypothesis import given, strategies as st

from macroplan import EMPTY, Action, PartialState, PlanningProblem, Schema, apply, seq_post, seq_well_defined
from macroplan.core import first_violation
from macroplan.errors import NotApplicable

partial = st.dictionaries(st.integers(0, 5), st.integers(0, 3), max_size=6).map(PartialState)
varsets = st.frozensets(st.integers(0, 5))


@given(partial, partial, partial)
def test_compose_associative(x, y, z):
    assert x.compose(y).compose(z) == x.compose(y.compose(z))


@given(partial)
def test_compose_identity_and_idempotence(x):
    assert x.compose(EMPTY) == x
    assert EMPTY.compose(x) == x
    assert x.compose(x) == x


@given(partial, partial)
def test_right_operand_wins(x, y):
    c = x.compose(y)
    assert c.matches(y)
    assert c.scope == x.scope | y.scope
    for v in x.scope - y.scope:
        assert c[v] == x[v]


@given(partial, partial, varsets)
def test_restrict_distributes(x, y, vs):
    assert x.compose(y).restrict(vs) == x.restrict(vs).compose(y.restrict(vs))
    assert x.restrict(vs).scope == x.scope & vs


@given(partial, partial)
def test_matches_is_agreement_on_shared_scope(x, y):
    agree = all(x[v] == y[v] for v in x.scope & y.scope)
    assert x.matches(y) == agree == y.matches(x)


@given(partial)
def test_hash_and_equality_follow_content(x):
    y = PartialState(dict(x.items()))
    assert x == y and hash(x) == hash(y)


def test_set_returns_new_state():
    x = PartialState({0: 1})
    y = x.set(1, 2)
    assert x == PartialState({0: 1})
    assert y == PartialState({0: 1, 1: 2})


def _toy():
    schema = Schema.build([("a", "01"), ("b", "xyz")])
    acts = [Action(0, "flip", schema.state(a="0"), schema.state(a="1")),
            Action(1, "step", schema.state(a="1", b="x"), schema.state(b="y"))]
    return PlanningProblem(schema, schema.state(a="0", b="x"), schema.state(b="y"), acts)


def test_schema_lookup_and_format():
    p = _toy()
    s = p.schema
    assert s.var("b") == 1 and s.value(1, "z") == 2
    assert s.format(p.init) == "a=0 b=x"
    with pytest.raises(KeyError):
        s.var("c")
    with pytest.raises(KeyError):
        s.value(0, "2")
    assert s.with_dummy().names[-1] == "v*"


def test_apply_and_sequences():
    p = _toy()
    flip, step = p.actions
    assert apply(p.init, flip) == p.schema.state(a="1", b="x")
    with pytest.raises(NotApplicable):
        apply(p.init, step)
    assert seq_well_defined([flip, step], p.init)
    assert first_violation([step, flip], p.init) == 0
    assert seq_post([flip, step]) == p.schema.state(a="1", b="y")


def test_problem_rejects_incomplete_init():
    schema = Schema.build([("a", "01"), ("b", "01")])
    with pytest.raises(ValueError):
        PlanningProblem(schema, schema.state(a="0"), schema.state(b="1"), [])


def test_action_needs_post():
    with pytest.raises(ValueError):
        Action(0, "noop", EMPTY, EMPTY)
