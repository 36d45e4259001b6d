"""Text formats: problem files (.mvp), plan files (.plan), DOT and bench TSV.

A problem file::

    # comment
    var v1 A B C
    init v1=A
    goal v1=C
    action move1_AB
      pre v1=A
      post v1=B

A plan file lists macros bottom-up and ends with the top-level sequence::

    macro 0 owner=v1 pre{v1=A} post{v1=B} steps[a:move1_AB]
    plan steps[m:0]

Macro ids in a plan file are local to the file.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import Action, Macro, PartialState, PlanningProblem, Schema
from .errors import DomainViolation, LimitExceeded, MissingInit, ParseError
from .graphs import transitive_reduction
from .plans import MacroArena, macros_in

_NAME = re.compile(r"^[^\s=#{}\[\]]+$")


def _pairs(tokens, lineno):
    out = []
    for tok in tokens:
        name, sep, value = tok.partition("=")
        if not sep or not name or not value:
            raise ParseError(f"expected name=value, got {tok!r}", lineno)
        out.append((name, value))
    return out


def _state(schema, pairs, lineno, what):
    d = {}
    for name, value in pairs:
        if name not in schema.names:
            raise ParseError(f"{what}: unknown variable {name!r}", lineno)
        v = schema.var(name)
        if value not in schema.domains[v]:
            raise DomainViolation(f"{what}: {value!r} outside the domain of {name}", lineno)
        if v in d and d[v] != schema.value(v, value):
            raise ParseError(f"{what}: {name} assigned twice", lineno)
        d[v] = schema.value(v, value)
    return PartialState(d)


def parse_problem(text: str) -> PlanningProblem:
    variables, inits, goals, actions = [], [], [], []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0].isspace()
        tokens = line.split()
        head, rest = tokens[0], tokens[1:]
        if indented:
            if current is None:
                raise ParseError("indented line outside an action", lineno)
            if head not in ("pre", "post"):
                raise ParseError(f"expected pre or post, got {head!r}", lineno)
            if current[head] is not None:
                raise ParseError(f"duplicate {head} for action {current['name']}", lineno)
            current[head] = (_pairs(rest, lineno), lineno)
            continue
        current = None
        if head == "var":
            if len(rest) < 2:
                raise ParseError("var needs a name and at least one value", lineno)
            for tok in rest:
                if not _NAME.match(tok):
                    raise ParseError(f"bad token {tok!r}", lineno)
            variables.append((rest[0], rest[1:], lineno))
        elif head == "init":
            inits.append((_pairs(rest, lineno), lineno))
        elif head == "goal":
            goals.append((_pairs(rest, lineno), lineno))
        elif head == "action":
            if len(rest) != 1 or not _NAME.match(rest[0]):
                raise ParseError("action needs exactly one name", lineno)
            current = {"name": rest[0], "pre": None, "post": None, "line": lineno}
            actions.append(current)
        else:
            raise ParseError(f"unknown keyword {head!r}", lineno)

    seen = set()
    for name, values, lineno in variables:
        if name in seen:
            raise ParseError(f"variable {name} declared twice", lineno)
        if len(set(values)) != len(values):
            raise ParseError(f"duplicate values for {name}", lineno)
        seen.add(name)
    if not variables:
        raise ParseError("no variables declared")
    schema = Schema.build((name, values) for name, values, _ in variables)

    init = {}
    for pairs, lineno in inits:
        init.update(_state(schema, pairs, lineno, "init").items())
    missing = [n for i, n in enumerate(schema.names) if i not in init]
    if missing:
        raise MissingInit(f"no initial value for {', '.join(missing)}")
    goal = {}
    for pairs, lineno in goals:
        goal.update(_state(schema, pairs, lineno, "goal").items())
    if not goal:
        raise ParseError("no goal given")

    acts, names = [], set()
    for i, a in enumerate(actions):
        if a["name"] in names:
            raise ParseError(f"action {a['name']} defined twice", a["line"])
        names.add(a["name"])
        if a["post"] is None or not a["post"][0]:
            raise ParseError(f"action {a['name']} has no post-condition", a["line"])
        pre = _state(schema, *a["pre"], a["name"]) if a["pre"] else PartialState()
        post = _state(schema, *a["post"], a["name"])
        acts.append(Action(i, a["name"], pre, post))
    return PlanningProblem(schema, PartialState(init), PartialState(goal), acts)


def serialize_problem(problem: PlanningProblem) -> str:
    schema = problem.schema
    lines = []
    for v in problem.variables:
        lines.append(f"var {schema.names[v]} {' '.join(schema.domains[v])}")
    for v in problem.variables:
        lines.append(f"init {schema.names[v]}={schema.domains[v][problem.init[v]]}")
    for v, d in problem.goal.items():
        lines.append(f"goal {schema.names[v]}={schema.domains[v][d]}")
    for a in problem.actions:
        if a.dummy:
            continue
        lines.append(f"action {a.name}")
        lines.append(f"  pre {schema.format(a.pre)}".rstrip())
        lines.append(f"  post {schema.format(a.post)}")
    return "\n".join(lines) + "\n"


# plan files ------------------------------------------------------------------

_MACRO = re.compile(r"^macro\s+(\d+)\s+owner=(\S+)\s+pre\{([^}]*)\}\s+post\{([^}]*)\}\s+steps\[([^\]]*)\]$")
_PLAN = re.compile(r"^plan\s+steps\[([^\]]*)\]$")


@dataclass
class MacroDef:
    id: int
    owner: str
    pre: list
    post: list
    steps: list  # ("a", name) or ("m", id)


@dataclass
class PlanFile:
    """A parsed plan file; usable without the problem it refers to."""

    macros: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)

    def _lengths(self):
        lengths = {}
        for mid in sorted(self.macros):
            total = 0
            for kind, ref in self.macros[mid].steps:
                total += 1 if kind == "a" else lengths[ref]
            lengths[mid] = total
        return lengths

    @property
    def length(self) -> int:
        lengths = self._lengths()
        return sum(1 if kind == "a" else lengths[ref] for kind, ref in self.steps)

    def expand(self, limit: int) -> list:
        n = self.length
        if n > limit:
            raise LimitExceeded(n, limit)
        out = []
        stack = [iter(self.steps)]
        while stack:
            step = next(stack[-1], None)
            if step is None:
                stack.pop()
            elif step[0] == "a":
                out.append(step[1])
            else:
                stack.append(iter(self.macros[step[1]].steps))
        return out

    def bind(self, problem: PlanningProblem, check=True):
        """Resolve names against ``problem``; returns (steps, arena).

        Every macro is re-checked for well-definedness when ``check`` is set.
        """
        schema = problem.schema
        arena = MacroArena(check=check)
        by_id = {}

        def resolve(refs):
            out = []
            for kind, ref in refs:
                if kind == "a":
                    try:
                        out.append(problem.action_by_name[ref])
                    except KeyError:
                        raise ParseError(f"unknown action {ref!r}") from None
                else:
                    out.append(by_id[ref])
            return out

        for mid in sorted(self.macros):
            d = self.macros[mid]
            pre = _state(schema, d.pre, None, f"m{mid}")
            post = _state(schema, d.post, None, f"m{mid}")
            by_id[mid] = arena.new_macro(schema.var(d.owner), pre, resolve(d.steps), post)
        return tuple(resolve(self.steps)), arena


def _refs(text, known, lineno):
    out = []
    for tok in text.split():
        kind, sep, ref = tok.partition(":")
        if kind == "a" and sep and ref:
            out.append(("a", ref))
        elif kind == "m" and sep and ref.isdigit():
            mid = int(ref)
            if mid not in known:
                raise ParseError(f"macro {mid} used before its definition", lineno)
            out.append(("m", mid))
        else:
            raise ParseError(f"bad step {tok!r}", lineno)
    return out


def parse_plan(text: str) -> PlanFile:
    pf = PlanFile()
    have_plan = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _MACRO.match(line)
        if m:
            mid = int(m.group(1))
            if mid in pf.macros:
                raise ParseError(f"macro {mid} defined twice", lineno)
            pf.macros[mid] = MacroDef(mid, m.group(2), _pairs(m.group(3).split(), lineno),
                                      _pairs(m.group(4).split(), lineno), _refs(m.group(5), pf.macros, lineno))
            continue
        m = _PLAN.match(line)
        if m:
            if have_plan:
                raise ParseError("more than one plan line", lineno)
            pf.steps = _refs(m.group(1), pf.macros, lineno)
            have_plan = True
            continue
        raise ParseError(f"cannot parse {line!r}", lineno)
    if not have_plan:
        raise ParseError("missing plan line")
    return pf


def serialize_plan(steps, problem: PlanningProblem, comments=()) -> str:
    """Write the macros reachable from ``steps``, renumbered from 0."""
    schema = problem.schema
    lines = [f"# {c}" for c in comments]
    local = {}

    def refs(seq):
        return " ".join(f"m:{local[s.id]}" if isinstance(s, Macro) else f"a:{s.name}" for s in seq)

    for m in sorted(macros_in(steps), key=lambda m: m.id):
        local[m.id] = len(local)
        lines.append(f"macro {local[m.id]} owner={schema.names[m.owner]} pre{{{schema.format(m.pre)}}} "
                     f"post{{{schema.format(m.post)}}} steps[{refs(m.steps)}]")
    lines.append(f"plan steps[{refs(steps)}]")
    return "\n".join(lines) + "\n"


# DOT -------------------------------------------------------------------------

def _quote(s):
    return '"' + str(s).replace('"', '\\"') + '"'


def emit_dot(g, reduced=True, names=None) -> str:
    """DOT text for ``g``. With ``reduced`` the edges removed by transitive
    reduction are kept but drawn dashed."""
    label = (lambda v: names[v]) if names is not None else str
    lines = ["digraph causal {"]
    for v in sorted(g.nodes):
        lines.append(f"  {_quote(label(v))};")
    keep = set(transitive_reduction(g).edges) if reduced else None
    for u, v in sorted(g.edges):
        style = "" if keep is None or (u, v) in keep else " [style=dashed]"
        lines.append(f"  {_quote(label(u))} -> {_quote(label(v))}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# bench -----------------------------------------------------------------------

BENCH_COLUMNS = ("instance", "ms", "macros_generated", "macros_used", "expanded_length", "planner", "classes")


@dataclass
class BenchRow:
    instance: str
    ms: float
    macros_generated: int
    macros_used: int
    expanded_length: int
    planner: str
    classes: str

    def to_tsv(self) -> str:
        return "\t".join([self.instance, f"{self.ms:.1f}", str(self.macros_generated), str(self.macros_used),
                          str(self.expanded_length), self.planner, self.classes])

    @classmethod
    def from_tsv(cls, line: str) -> "BenchRow":
        f = line.rstrip("\n").split("\t")
        if len(f) != len(BENCH_COLUMNS):
            raise ParseError(f"expected {len(BENCH_COLUMNS)} columns, got {len(f)}")
        return cls(f[0], float(f[1]), int(f[2]), int(f[3]), int(f[4]), f[5], f[6])
