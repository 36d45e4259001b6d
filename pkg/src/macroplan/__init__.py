"""Causal-graph classification and macro-based planning for multi-valued problems."""
from .core import (EMPTY, Action, Macro, PartialState, PlanningProblem, Schema, apply, compose,
                   macro_well_defined, matches, restrict, seq_post, seq_well_defined)
from .errors import (ClassViolation, CyclicGraphError, LimitExceeded, MacroError, MemoKeyViolation,
                     NoPlan, NotApplicable, ParseError, PlanningError, ResourceLimit, StateCapExceeded)
from .graphs import (CausalGraph, ClassReport, Verdict, causal_graph, classify, is_reversible, normalize,
                     relaxed_causal_graph, transitive_reduction)
from .plans import MacroArena, Metrics, PlanResult, expand, expanded_length, validate
from .oracle import oracle
from .irplanner import macroplanner, relaxed_planner
from .reversible import reversible_planner
from .acyclic import acyclic_planner
from .domains import DomainSpec, expected_optimum, generate
from .io import emit_dot, parse_plan, parse_problem, serialize_plan, serialize_problem

__version__ = "0.1.0"
