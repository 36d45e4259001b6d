"""Variables, partial states, actions, macros and planning problems.

Variables and values are small integers; the :class:`Schema` keeps the
display names. Everything here is immutable once built.
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import NotApplicable, UnknownStep


class PartialState(Mapping):
    """Immutable assignment of values to a subset of the variables."""

    __slots__ = ("_map", "_items", "_hash")

    def __init__(self, assignment=()):
        d = dict(assignment)
        self._map = d
        self._items = tuple(sorted(d.items()))
        self._hash = hash(self._items)

    @classmethod
    def _from_dict(cls, d):
        obj = cls.__new__(cls)
        obj._map = d
        obj._items = tuple(sorted(d.items()))
        obj._hash = hash(obj._items)
        return obj

    def __getitem__(self, var):
        return self._map[var]

    def __iter__(self):
        return (v for v, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __contains__(self, var):
        return var in self._map

    def get(self, var, default=None):
        return self._map.get(var, default)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, PartialState):
            return self._hash == other._hash and self._items == other._items
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __lt__(self, other):
        return self._items < other._items

    def __repr__(self):
        inner = ", ".join(f"{v}={x}" for v, x in self._items)
        return f"({inner})"

    def items(self):
        return self._items

    @property
    def scope(self) -> frozenset:
        return frozenset(self._map)

    def restrict(self, variables) -> "PartialState":
        m = self._map
        if len(m) <= len(variables):
            d = {v: x for v, x in self._items if v in variables}
        else:
            d = {v: m[v] for v in variables if v in m}
        if len(d) == len(m):
            return self
        return PartialState._from_dict(d)

    def matches(self, other) -> bool:
        a, b = self._map, other._map if isinstance(other, PartialState) else other
        if len(a) > len(b):
            a, b = b, a
        for v, x in a.items():
            y = b.get(v)
            if y is not None and y != x:
                return False
        return True

    def compose(self, other) -> "PartialState":
        if not other:
            return self
        if not self:
            return other if isinstance(other, PartialState) else PartialState(other)
        d = dict(self._map)
        d.update(other._map if isinstance(other, PartialState) else other)
        return PartialState._from_dict(d)

    def set(self, var, value) -> "PartialState":
        if self._map.get(var) == value:
            return self
        d = dict(self._map)
        d[var] = value
        return PartialState._from_dict(d)


EMPTY = PartialState()


def restrict(x: PartialState, variables) -> PartialState:
    return x.restrict(variables)


def matches(x: PartialState, y: PartialState) -> bool:
    return x.matches(y)


def compose(x: PartialState, y: PartialState) -> PartialState:
    return x.compose(y)


@dataclass(frozen=True)
class Schema:
    names: tuple
    domains: tuple  # tuple of tuples of value names

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")
        if len(self.domains) != len(self.names):
            raise ValueError("one domain per variable")
        for name, dom in zip(self.names, self.domains):
            if not dom:
                raise ValueError(f"empty domain for {name}")
            if len(set(dom)) != len(dom):
                raise ValueError(f"duplicate values in domain of {name}")

    @classmethod
    def build(cls, variables: Iterable[tuple]) -> "Schema":
        names, domains = [], []
        for name, values in variables:
            names.append(str(name))
            domains.append(tuple(str(x) for x in values))
        return cls(tuple(names), tuple(domains))

    def __len__(self):
        return len(self.names)

    def domain_size(self, var: int) -> int:
        return len(self.domains[var])

    def var(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def value(self, var: int, name: str) -> int:
        try:
            return self.domains[var].index(name)
        except ValueError:
            raise KeyError(f"{name!r} not in domain of {self.names[var]}") from None

    @property
    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {n: i for i, n in enumerate(self.names)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def state(self, **assignment) -> PartialState:
        """Build a partial state from display names, e.g. ``schema.state(v1="A")``."""
        return self.parse_state(assignment.items())

    def parse_state(self, pairs) -> PartialState:
        d = {}
        for name, value in pairs:
            v = self.var(name)
            d[v] = self.value(v, str(value))
        return PartialState(d)

    def format(self, x: PartialState) -> str:
        return " ".join(f"{self.names[v]}={self.domains[v][d]}" for v, d in x.items())

    def with_dummy(self, name="v*") -> "Schema":
        return Schema(self.names + (name,), self.domains + (("0", "1"),))

    def check(self, x: PartialState, what="state"):
        for v, d in x.items():
            if not 0 <= v < len(self.names):
                raise ValueError(f"{what}: unknown variable {v}")
            if not 0 <= d < len(self.domains[v]):
                raise ValueError(f"{what}: value {d} outside domain of {self.names[v]}")


@dataclass(frozen=True, eq=False)
class Action:
    id: int
    name: str
    pre: PartialState
    post: PartialState
    dummy: bool = False

    length = 1
    is_macro = False

    def __post_init__(self):
        if not self.post:
            raise ValueError(f"action {self.name}: empty post-condition")

    @property
    def unary(self) -> bool:
        return len(self.post) == 1

    def __repr__(self):
        return f"Action({self.name})"


@dataclass(frozen=True, eq=False)
class Macro:
    """Hierarchical macro <pre, steps, post>; built through a MacroArena."""

    id: int
    owner: int
    pre: PartialState
    steps: tuple
    post: PartialState
    length: int

    is_macro = True

    @property
    def name(self):
        return f"m{self.id}"

    def __repr__(self):
        return f"Macro(m{self.id}, owner={self.owner}, len={self.length})"


Step = "Action | Macro"


@dataclass(frozen=True, eq=False)
class PlanningProblem:
    schema: Schema
    init: PartialState
    goal: PartialState
    actions: tuple
    variables: tuple = field(default=None)

    def __post_init__(self):
        if self.variables is None:
            object.__setattr__(self, "variables", tuple(range(len(self.schema))))
        object.__setattr__(self, "actions", tuple(self.actions))
        vs = set(self.variables)
        self.schema.check(self.init, "init")
        self.schema.check(self.goal, "goal")
        if self.init.scope != vs:
            raise ValueError("init must assign every variable")
        if not self.goal:
            raise ValueError("goal must be non-empty")
        if not self.goal.scope <= vs:
            raise ValueError("goal mentions variables outside the problem")
        for a in self.actions:
            self.schema.check(a.pre, a.name)
            self.schema.check(a.post, a.name)
            if not (a.pre.scope | a.post.scope) <= vs:
                raise ValueError(f"action {a.name} mentions variables outside the problem")

    @property
    def action_by_name(self):
        d = self.__dict__.get("_by_name")
        if d is None:
            d = {a.name: a for a in self.actions}
            object.__setattr__(self, "_by_name", d)
        return d

    def fmt(self, x: PartialState) -> str:
        return self.schema.format(x)


def apply(s: PartialState, a: Action) -> PartialState:
    if not s.matches(a.pre):
        raise NotApplicable(f"{a.name} not applicable")
    return s.compose(a.post)


def first_violation(steps: Sequence, s: PartialState):
    """Index of the first step whose pre-condition fails, or None."""
    state = s
    for i, step in enumerate(steps):
        if not isinstance(step, (Action, Macro)):
            raise UnknownStep(f"unknown step {step!r}")
        if not state.matches(step.pre):
            return i
        state = state.compose(step.post)
    return None


def seq_well_defined(steps: Sequence, s: PartialState) -> bool:
    return first_violation(steps, s) is None


def seq_post(steps: Sequence) -> PartialState:
    d = {}
    for step in steps:
        if not isinstance(step, (Action, Macro)):
            raise UnknownStep(f"unknown step {step!r}")
        d.update(step.post.items())
    return PartialState(d)


def macro_well_defined(m: Macro) -> bool:
    if not seq_well_defined(m.steps, m.pre):
        return False
    return m.pre.compose(seq_post(m.steps)) == m.post
