"""Generators for the benchmark domains and random inverted-tree problems."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations

from .core import Action, PlanningProblem, Schema

KINDS = ("hanoi", "jb_counter", "dd_chain", "gripper", "maze_gripper", "logistics",
         "fig5", "rir_pair", "random_ir")


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    @classmethod
    def parse(cls, text: str) -> "DomainSpec":
        """Parse ``kind:key=value,...``; values are ints or bare words."""
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        params = {}
        for item in filter(None, (x.strip() for x in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"bad parameter {item!r}, expected key=value")
            params[key.strip()] = _coerce(value.strip())
        return cls(kind, params)

    def label(self):
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}:{inner}"


def _coerce(value):
    low = value.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    try:
        return int(value)
    except ValueError:
        return value


class _Builder:
    """Small helper to assemble problems from display names."""

    def __init__(self, variables):
        self.schema = Schema.build(variables)
        self.actions = []

    def ps(self, **kw):
        return self.schema.parse_state(kw.items())

    def state(self, pairs):
        return self.schema.parse_state(pairs)

    def action(self, name, pre, post):
        self.actions.append(Action(len(self.actions), name, self.state(pre), self.state(post)))

    def build(self, init, goal):
        return PlanningProblem(self.schema, self.state(init), self.state(goal), self.actions)


def _positive(name, value):
    if not isinstance(value, int) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value


def hanoi(n):
    _positive("n", n)
    names = [f"v{i}" for i in range(1, n + 1)]
    b = _Builder([(x, "ABC") for x in names])
    for i in range(n):
        for j, k, l in permutations("ABC"):
            pre = [(names[h], l) for h in range(i)] + [(names[i], j)]
            b.action(f"move{i + 1}_{j}{k}", pre, [(names[i], k)])
    return b.build([(x, "A") for x in names], [(x, "C") for x in names])


def jb_counter(n):
    _positive("n", n)
    names = [f"v{i}" for i in range(1, n + 1)]
    b = _Builder([(x, "01") for x in names])
    for i in range(n):
        prefix = [(names[h], "0") for h in range(i - 1)]
        if i > 0:
            prefix.append((names[i - 1], "1"))
        b.action(f"set{i + 1}", prefix + [(names[i], "0")], [(names[i], "1")])
        b.action(f"reset{i + 1}", prefix + [(names[i], "1")], [(names[i], "0")])
    goal = [(x, "0") for x in names[:-1]] + [(names[-1], "1")]
    return b.build([(x, "0") for x in names], goal)


def dd_chain(n, full_goal=False):
    """Chain with four actions per variable and domain {0,1,2}.

    By default the goal is ``v_n = 2``; ``full_goal`` asks for every
    variable to be 2, which has a longer optimum.
    """
    _positive("n", n)
    names = [f"v{i}" for i in range(1, n + 1)]
    b = _Builder([(x, "012") for x in names])
    table = [("2", "0", "1"), ("0", "1", "2"), ("2", "2", "1"), ("0", "1", "0")]
    for i in range(n):
        for k, (parent, own, new) in enumerate(table, 1):
            pre = [(names[i - 1], parent)] if i > 0 else []
            b.action(f"a{i + 1}_{k}", pre + [(names[i], own)], [(names[i], new)])
    goal = [(x, "2") for x in names] if full_goal else [(names[-1], "2")]
    return b.build([(x, "0") for x in names], goal)


def gripper(n):
    _positive("n", n)
    balls = [f"v{i}" for i in range(1, n + 1)]
    b = _Builder([("vl", "01"), ("vh", "012")] + [(x, ("0", "1", "R")) for x in balls])
    for a in "01":
        b.action(f"move_{a}", [("vl", a)], [("vl", "1" if a == "0" else "0")])
    for x in balls:
        for a in "01":
            for h in (0, 1):
                b.action(f"pick_{x}_{a}_{h}", [("vl", a), ("vh", str(h)), (x, a)],
                         [("vh", str(h + 1)), (x, "R")])
                b.action(f"drop_{x}_{a}_{h}", [("vl", a), ("vh", str(h + 1)), (x, "R")],
                         [("vh", str(h)), (x, a)])
    init = [("vl", "0"), ("vh", "0")] + [(x, "0") for x in balls]
    return b.build(init, [(x, "1") for x in balls])


def maze_gripper(R, n):
    """Gripper in a corridor of ``R`` rooms; balls start in room 0 and go to room R-1.

    Picking and dropping is only possible in the two end rooms.
    """
    if not isinstance(R, int) or R < 2:
        raise ValueError("R must be an integer >= 2")
    _positive("n", n)
    rooms = [str(r) for r in range(R)]
    first, last = rooms[0], rooms[-1]
    balls = [f"v{i}" for i in range(1, n + 1)]
    b = _Builder([("vl", rooms), ("vh", "012")] + [(x, (first, last, "R")) for x in balls])
    for r in range(R - 1):
        b.action(f"move_{r}_{r + 1}", [("vl", rooms[r])], [("vl", rooms[r + 1])])
        b.action(f"move_{r + 1}_{r}", [("vl", rooms[r + 1])], [("vl", rooms[r])])
    for x in balls:
        for room in (first, last):
            for h in (0, 1):
                b.action(f"pick_{x}_{room}_{h}", [("vl", room), ("vh", str(h)), (x, room)],
                         [("vh", str(h + 1)), (x, "R")])
                b.action(f"drop_{x}_{room}_{h}", [("vl", room), ("vh", str(h + 1)), (x, "R")],
                         [("vh", str(h)), (x, room)])
    init = [("vl", first), ("vh", "0")] + [(x, first) for x in balls]
    return b.build(init, [(x, last) for x in balls])


def logistics(cities=2, locations=2, packages=2, airplanes=1):
    """One truck per city, one airport per city (its first location).

    Package i starts at a non-airport location of city i mod r (or the
    airport if the city has a single location) and must reach the last
    location of the next city.
    """
    for name, value in (("cities", cities), ("locations", locations),
                        ("packages", packages), ("airplanes", airplanes)):
        _positive(name, value)
    locs = [[f"c{c}l{k}" for k in range(1, locations + 1)] for c in range(1, cities + 1)]
    airports = [city[0] for city in locs]
    trucks = [f"t{c}" for c in range(1, cities + 1)]
    planes = [f"u{k}" for k in range(1, airplanes + 1)]
    vehicles = trucks + planes
    every_loc = [x for city in locs for x in city]
    pkgs = [f"p{i}" for i in range(1, packages + 1)]
    domains = [(t, locs[c]) for c, t in enumerate(trucks)] + [(u, airports) for u in planes]
    domains += [(p, every_loc + vehicles) for p in pkgs]
    b = _Builder(domains)
    dom = dict(domains)
    for t in vehicles:
        for l1 in dom[t]:
            for l2 in dom[t]:
                if l1 != l2:
                    b.action(f"move_{t}_{l1}_{l2}", [(t, l1)], [(t, l2)])
    for p in pkgs:
        for t in vehicles:
            for l in dom[t]:
                b.action(f"load_{p}_{t}_{l}", [(t, l), (p, l)], [(p, t)])
                b.action(f"unload_{p}_{t}_{l}", [(t, l), (p, t)], [(p, l)])
    init = [(t, locs[c][0]) for c, t in enumerate(trucks)]
    init += [(u, airports[k % cities]) for k, u in enumerate(planes)]
    goal = []
    for i, p in enumerate(pkgs):
        city = locs[i % cities]
        init.append((p, city[-1]))
        goal.append((p, locs[(i + 1) % cities][-1]))
    return b.build(init, goal)


def fig5(reversible=False):
    b = _Builder([("v1", "012"), ("v2", "01"), ("v3", "01")])
    b.action("a1_1", [("v1", "0")], [("v1", "1")])
    b.action("a1_2", [("v1", "0")], [("v1", "2")])
    b.action("a2_1", [("v1", "1"), ("v2", "0")], [("v2", "1")])
    b.action("a3_1", [("v1", "2"), ("v3", "0")], [("v3", "1")])
    if reversible:
        b.action("a1_3", [("v1", "1")], [("v1", "0")])
        b.action("a1_4", [("v1", "2")], [("v1", "0")])
    init = [("v1", "0"), ("v2", "0"), ("v3", "0")]
    return b.build(init, [("v2", "1"), ("v3", "1")])


def rir_pair():
    b = _Builder([("v", "0123"), ("w", "01")])
    b.action("a1", [("v", "0")], [("v", "1")])
    b.action("a2", [("v", "2")], [("v", "3")])
    b.action("a3", [("v", "1"), ("w", "0")], [("v", "2"), ("w", "1")])
    return b.build([("v", "0"), ("w", "0")], [("v", "3"), ("w", "1")])


def random_ir(seed=0, n=5, domain=3, actions=3, density=0.5, mode="sparse", goal_extra=0.3):
    """Random problem whose reduced causal graph is an inverted tree rooted at x0.

    ``mode`` is one of:
      sparse  pre-conditions on a random subset of the ancestors
      full    pre-conditions on every ancestor (and on the variable itself)
      shared  pre-conditions on the variable and its parents only, with one
              parent pre-condition per target value, and the initial parent
              values for actions restoring the initial value
    """
    _positive("n", n)
    if mode not in ("sparse", "full", "shared"):
        raise ValueError(f"unknown random_ir mode {mode!r}")
    rng = random.Random(seed)
    out = [None] + [rng.randrange(i) for i in range(1, n)]
    parents = {v: [i for i in range(n) if out[i] == v] for v in range(n)}
    anc = {}

    def ancestors(v):
        if v not in anc:
            acc = set()
            for w in parents[v]:
                acc |= {w} | ancestors(w)
            anc[v] = acc
        return anc[v]

    sizes = [rng.randint(2, domain) if domain > 2 else 2 for _ in range(n)]
    names = [f"x{i}" for i in range(n)]
    b = _Builder([(names[i], [str(d) for d in range(sizes[i])]) for i in range(n)])
    init = [rng.randrange(sizes[i]) for i in range(n)]

    def val(v, d):
        return (names[v], str(d))

    for v in range(n):
        anc_v = sorted(ancestors(v))
        pa = parents[v]
        count = max(actions, len(pa)) if mode != "shared" else actions
        shared_pre = {}
        made = []
        for k in range(count):
            src = rng.randrange(sizes[v])
            dst = rng.choice([d for d in range(sizes[v]) if d != src])
            pre = {}
            if mode == "full":
                pre = {w: rng.randrange(sizes[w]) for w in anc_v}
                pre[v] = src
            elif mode == "shared":
                if dst not in shared_pre:
                    if dst == init[v]:
                        shared_pre[dst] = {w: init[w] for w in pa}
                    else:
                        shared_pre[dst] = {w: rng.randrange(sizes[w]) for w in pa}
                pre = dict(shared_pre[dst])
                pre[v] = src
            else:
                for w in anc_v:
                    if rng.random() < density:
                        pre[w] = rng.randrange(sizes[w])
                # make every parent appear somewhere so the tree edges exist
                if k < len(pa):
                    pre.setdefault(pa[k], rng.randrange(sizes[pa[k]]))
                if rng.random() < 0.8:
                    pre[v] = src
            made.append((pre, dst))
        for k, (pre, dst) in enumerate(made):
            b.action(f"{names[v]}_{k}", [val(w, d) for w, d in sorted(pre.items())], [val(v, dst)])
    goal = {0: rng.randrange(sizes[0])}
    for v in range(1, n):
        if rng.random() < goal_extra:
            goal[v] = rng.randrange(sizes[v])
    return b.build([val(v, init[v]) for v in range(n)], [val(v, d) for v, d in sorted(goal.items())])


_GENERATORS = {
    "hanoi": hanoi,
    "jb_counter": jb_counter,
    "dd_chain": dd_chain,
    "gripper": gripper,
    "maze_gripper": maze_gripper,
    "logistics": logistics,
    "fig5": fig5,
    "rir_pair": rir_pair,
    "random_ir": random_ir,
}


def generate(spec) -> PlanningProblem:
    """Build a problem from a :class:`DomainSpec` or a ``kind:k=v,...`` string."""
    if isinstance(spec, str):
        spec = DomainSpec.parse(spec)
    try:
        gen = _GENERATORS[spec.kind]
    except KeyError:
        raise ValueError(f"unknown domain {spec.kind!r}; known: {', '.join(KINDS)}") from None
    try:
        return gen(**spec.params)
    except TypeError as e:
        raise ValueError(f"bad parameters for {spec.kind}: {e}") from None


def expected_optimum(spec):
    """Closed-form optimal plan length, or None when no formula is known."""
    if isinstance(spec, str):
        spec = DomainSpec.parse(spec)
    n = spec.params.get("n")
    if spec.kind in ("hanoi", "jb_counter"):
        return 2**n - 1
    if spec.kind == "dd_chain" and not spec.params.get("full_goal"):
        return 2 ** (n + 1) - 2
    return None
