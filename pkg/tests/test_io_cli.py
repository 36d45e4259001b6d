import pytest

from macroplan import DomainSpec, generate, macroplanner, validate
from macroplan.cli import run_cli
from macroplan.errors import DomainViolation, MissingInit, ParseError
from macroplan.graphs import CausalGraph, Verdict, causal_graph, classify, normalize
from helpers import shortcut_problem
from macroplan.io import BenchRow, emit_dot, parse_plan, parse_problem, serialize_plan, serialize_problem

SPECS = ["hanoi:n=3", "jb_counter:n=4", "dd_chain:n=3", "gripper:n=2", "maze_gripper:R=5,n=2",
         "logistics", "fig5", "fig5:reversible=true", "rir_pair", "random_ir:seed=7,n=5"]


@pytest.mark.parametrize("text", SPECS)
def test_problem_round_trip(text):
    p = generate(DomainSpec.parse(text))
    s = serialize_problem(p)
    q = parse_problem(s)
    assert serialize_problem(q) == s
    assert q.init == p.init and q.goal == p.goal
    assert [(a.name, a.pre, a.post) for a in q.actions] == [(a.name, a.pre, a.post) for a in p.actions]


def test_round_trip_keeps_class():
    p = parse_problem(serialize_problem(generate(DomainSpec("hanoi", {"n": 3}))))
    assert classify(p, reversibility=False).ir == Verdict.YES


def test_canonical_form_ignores_comments_and_layout():
    text = """# two switches
var a 0 1   # first
var b 0 1
init a=0 b=0
goal b=1
action up_a
    post a=1
action up_b
  pre a=1
  post b=1
"""
    p = parse_problem(text)
    canon = serialize_problem(p)
    assert "init a=0\ninit b=0" in canon
    assert "action up_a\n  pre\n  post a=1" in canon
    assert parse_problem(canon).actions[1].pre == p.actions[1].pre


def test_parse_errors():
    with pytest.raises(MissingInit):
        parse_problem("var a 0 1\nvar b 0 1\ninit a=0\ngoal a=1\n")
    with pytest.raises(DomainViolation):
        parse_problem("var v1 A B\ninit v1=A\ngoal v1=X\n")
    with pytest.raises(ParseError) as info:
        parse_problem("var a 0 1\ninit a=0\ngoal a=1\nbogus line\n")
    assert info.value.line == 4
    with pytest.raises(ParseError):
        parse_problem("var a 0 1\ninit a=0\ngoal a=1\naction x\n  pre a=0\n")
    with pytest.raises(ParseError):
        parse_problem("  pre a=0\n")


def test_plan_file_round_trip():
    p = generate(DomainSpec("hanoi", {"n": 4}))
    r = macroplanner(p)
    text = serialize_plan(r.plan, p, ["note"])
    pf = parse_plan(text)
    assert pf.length == 15
    assert len(pf.expand(100)) == 15
    steps, arena = pf.bind(p)
    assert validate(steps, p)
    assert serialize_plan(steps, p, ["note"]) == text


def test_plan_file_errors():
    with pytest.raises(ParseError):
        parse_plan("plan steps[m:0]\n")
    with pytest.raises(ParseError):
        parse_plan("macro 0 owner=v1 pre{} post{} steps[]\n")
    p = generate(DomainSpec("hanoi", {"n": 2}))
    with pytest.raises(ParseError):
        parse_plan("plan steps[a:fly]\n").bind(p)


def test_huge_plan_length_without_expansion():
    p = generate(DomainSpec("hanoi", {"n": 60}))
    pf = parse_plan(serialize_plan(macroplanner(p).plan, p))
    assert pf.length == 2**60 - 1


def test_dot_output():
    p = generate(DomainSpec("hanoi", {"n": 3}))
    (comp,) = normalize(p)
    dot = emit_dot(comp.graph, names=comp.problem.schema.names)
    solid = [l for l in dot.splitlines() if "->" in l and "dashed" not in l]
    assert solid == ['  "v1" -> "v2";', '  "v2" -> "v3";', '  "v3" -> "v*";']
    f1 = shortcut_problem()
    dot = emit_dot(causal_graph(f1), names=f1.schema.names)
    dashed = {l.strip() for l in dot.splitlines() if "dashed" in l}
    assert dashed == {'"v1" -> "v5" [style=dashed];', '"v2" -> "v5" [style=dashed];'}
    assert "->" not in emit_dot(CausalGraph(range(2), []))


def test_bench_row_round_trip():
    row = BenchRow("hanoi:n=60", 12.5, 532, 177, 2**60 - 1, "ir", "IR=Yes")
    assert BenchRow.from_tsv(row.to_tsv()) == row


# command line --------------------------------------------------------------

def _gen(tmp_path, spec, name):
    path = tmp_path / name
    assert run_cli(["gen", spec, "-o", str(path)]) == 0
    return str(path)


def test_cli_plan_length_expand_validate(tmp_path, capsys):
    prob = _gen(tmp_path, "hanoi:n=3", "h3.mvp")
    plan = str(tmp_path / "h3.plan")
    assert run_cli(["plan", prob, "-o", plan]) == 0
    capsys.readouterr()
    assert run_cli(["length", plan]) == 0
    assert capsys.readouterr().out.strip() == "7"
    assert run_cli(["expand", plan, "--limit", "10"]) == 0
    assert len(capsys.readouterr().out.split()) == 7
    assert run_cli(["expand", plan, "--limit", "3"]) == 3
    assert run_cli(["validate", prob, plan]) == 0
    assert capsys.readouterr().out.strip() == "valid"


def test_cli_unsolvable_plan_fails(tmp_path, capsys):
    prob = _gen(tmp_path, "fig5", "branching.mvp")
    assert run_cli(["plan", prob]) == 1
    assert "fail" in capsys.readouterr().out
    assert run_cli(["oracle", prob]) == 1


def test_cli_analyze_gripper(tmp_path, capsys):
    prob = _gen(tmp_path, "gripper:n=2", "gripper2.mvp")
    assert run_cli(["analyze", prob, "--dot", "-", "--graph", "relaxed"]) == 0
    out = capsys.readouterr().out
    assert "IR=No" in out and "AR[relaxed]=Yes" in out
    assert "digraph" in out


def test_cli_planner_choice(tmp_path, capsys):
    prob = _gen(tmp_path, "rir_pair", "pair.mvp")
    assert run_cli(["plan", prob]) == 0
    assert "planner rir" in capsys.readouterr().out
    prob = _gen(tmp_path, "logistics", "log.mvp")
    for planner in ("ar", "aor"):
        plan = str(tmp_path / f"log.{planner}.plan")
        assert run_cli(["plan", prob, "--planner", planner, "-o", plan]) == 0
        assert run_cli(["validate", prob, plan]) == 0


def test_cli_oracle_and_caps(tmp_path, capsys):
    prob = _gen(tmp_path, "hanoi:n=4", "h4.mvp")
    assert run_cli(["oracle", prob]) == 0
    assert capsys.readouterr().out.split()[0] == "15"
    assert run_cli(["oracle", prob, "--cap", "5"]) == 3


def test_cli_usage_errors(tmp_path, capsys):
    assert run_cli([]) == 2
    assert run_cli(["plan", str(tmp_path / "missing.mvp")]) == 2
    bad = tmp_path / "bad.mvp"
    bad.write_text("var a 0 1\n")
    assert run_cli(["analyze", str(bad)]) == 2
    assert run_cli(["gen", "nosuch:n=1"]) == 2


def test_cli_bench_hanoi(capsys):
    assert run_cli(["bench", "hanoi", "10..60", "step", "10"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split("\t")[0] == "instance"
    rows = [BenchRow.from_tsv(l) for l in lines[1:]]
    assert [r.expanded_length for r in rows] == [2**n - 1 for n in range(10, 61, 10)]
    assert [r.macros_generated for r in rows] == [82, 172, 262, 352, 442, 532]
