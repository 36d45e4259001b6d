"""Shared generators and independent checkers for the test suite.

The checkers work on plain dicts and re-expand macros themselves, so they
do not rely on the package's own validation code.
"""
import random

from macroplan import Action, PartialState, PlanningProblem, Schema
from macroplan.core import Macro


def random_problem(seed, n_vars=None, domain=3, n_actions=None, acyclic=True, nonunary=0.0, goal_size=None):
    """Small random problem.

    With ``acyclic`` every pre-condition only mentions lower-numbered
    variables (or the changed variable itself), so the conventional causal
    graph is acyclic when all actions are unary.
    """
    rng = random.Random(seed)
    n = n_vars or rng.randint(2, 5)
    sizes = [rng.randint(2, domain) for _ in range(n)]
    schema = Schema.build((f"v{i}", [str(d) for d in range(sizes[i])]) for i in range(n))
    init = PartialState({i: rng.randrange(sizes[i]) for i in range(n)})
    k = goal_size or rng.randint(1, n)
    goal_vars = rng.sample(range(n), k)
    goal = PartialState({v: rng.randrange(sizes[v]) for v in goal_vars})
    actions = []
    for i in range(n_actions or rng.randint(2, 3 * n)):
        v = rng.randrange(n)
        post = {v: rng.randrange(sizes[v])}
        if nonunary and rng.random() < nonunary and n > 1:
            w = rng.choice([u for u in range(n) if u != v])
            post[w] = rng.randrange(sizes[w])
        pool = range(v + 1) if acyclic else range(n)
        pre = {u: rng.randrange(sizes[u]) for u in pool if rng.random() < 0.4}
        actions.append(Action(i, f"a{i}", PartialState(pre), PartialState(post)))
    return PlanningProblem(schema, init, goal, actions)


def flat_actions(steps):
    out = []
    for s in steps:
        if isinstance(s, Macro):
            out.extend(flat_actions(s.steps))
        else:
            out.append(s)
    return out


def run_flat(actions, state):
    """Simulate primitive actions on a dict; returns (state, index of first failure or None)."""
    state = dict(state)
    for i, a in enumerate(actions):
        if any(state.get(v) != d for v, d in a.pre.items()):
            return state, i
        state.update(a.post.items())
    return state, None


def plan_reaches_goal(problem, steps):
    state, bad = run_flat(flat_actions(steps), problem.init.items())
    return bad is None and all(state[v] == d for v, d in problem.goal.items())


def macro_is_well_defined(m):
    state, bad = run_flat(flat_actions(m.steps), m.pre.items())
    if bad is not None:
        return False
    return state == dict(m.post.items())


def shortcut_problem():
    # v1 -> v3, v2 -> v4, {v1..v4} -> v5; the reduction keeps only the tree edges
    schema = Schema.build([(f"v{i}", "01") for i in range(1, 6)])
    s = schema.state
    acts = [
        Action(0, "set1", PartialState(), s(v1="1")),
        Action(1, "set2", PartialState(), s(v2="1")),
        Action(2, "set3", s(v1="1"), s(v3="1")),
        Action(3, "set4", s(v2="1"), s(v4="1")),
        Action(4, "set5", s(v1="1", v2="1", v3="1", v4="1"), s(v5="1")),
    ]
    return PlanningProblem(schema, s(v1="0", v2="0", v3="0", v4="0", v5="0"), s(v5="1"), acts)
