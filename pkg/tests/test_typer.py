import pytest

from helpers import CORPUS, program
from lnuma.effects import filter_behaviour
from lnuma.syntax import parse_behaviour, parse_expr, parse_program, pretty
from lnuma.syntax.nodes import (
    BOOL, EPS, INT, NIL, AbstractLoc, NodeId, OwnedType, TrueLit,
)
from lnuma.diagnostics import TypingError
from lnuma.typer import ClassTable, Typer, check_program, conforms

HEADER = """
class D<p>
  flag: bool
  next: D<p>
  def poke(): nil as eps { this.flag = true }
  def get(): bool as eps { this.flag }
active class A<p, q>
  def go(): nil as eps { null }
  def ask(): bool as eps { true }
"""


def checked(main_body: str, behaviour: str = "eps", locs: str = "L1, L2", extra: str = ""):
    src = HEADER + extra + f"""
class Main<{locs}>
  def main(): nil as {behaviour} {{
    {main_body}
  }}
"""
    return check_program(parse_program(src))


def messages(diags):
    return " | ".join(d.format() for d in diags)


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_is_well_typed(name):
    assert check_program(program(name)) == []


def test_topology_filtered_main_behaviour():
    reports = []
    assert check_program(program("topology"), reports) == []
    main = next(r for r in reports if (r.cls, r.method) == ("Main", "main"))
    assert pretty(main.filtered) == "write(L1,L2).write(L1,L3)"
    assert main.ok
    # unfiltered: two local allocations plus three local field writes
    assert pretty(main.inferred).count("write(L1,L1)") == 5


def test_wrong_declaration_names_the_inferred_behaviour():
    src = program("topology")
    text = pretty(src).replace("as write(L1,L2).write(L1,L3)", "as eps")
    diags = check_program(parse_program(text))
    assert len(diags) == 1
    assert "write(L1,L2).write(L1,L3)" in diags[0].message
    assert diags[0].span.line > 0


def test_sync_call_must_stay_in_place():
    assert checked("let d = new D<L1> in d.poke()") == []
    diags = checked("let d = new D<L2> in d.poke()", "write(L1,L2)")
    assert "T-Call" in messages(diags)


def test_messages_must_return_nil():
    diags = checked("let a = new A<L2, L1> in a!ask()", "write(L1,L2).msg(L1,L2,ask).(eps || eps)")
    assert "T-Message" in messages(diags)


def test_actors_only_created_by_main():
    extra = """
class Maker<p, q>
  def make(): nil as write(p,q) { new A<q, p> }
"""
    diags = checked("null", extra=extra)
    assert "T-NewO" in messages(diags)


def test_recursion_is_rejected():
    extra = """
class R<p>
  def f(): nil as eps { this.g() }
  def g(): nil as eps { this.f() }
"""
    diags = checked("null", extra=extra)
    assert "recursive" in messages(diags)


def test_missing_main_is_reported():
    diags = check_program(parse_program("class D<p>"))
    assert "Main" in messages(diags)


@pytest.mark.parametrize("body, rule", [
    ("y", "T-Var"),
    ("if null then true else false", "T-Cond"),
    ("for i in 2..2 { null }", "T-For"),
    ("let d = new D<L1> in d.missing", "T-FRead"),
    ("let d = new D<L1> in d.flag = new D<L1>", "T-FWrite"),
    ("let d = new D<L1, L2> in null", "T-NewO"),
    ("let a = new A<L2, L1> in a!nope()", "T-Message"),
])
def test_rule_violations_name_their_rule(body, rule):
    assert rule in messages(checked(body, "write(L1,L2)"))


def test_conditional_behaviour_is_a_choice():
    body = "let d = new D<L2> in if d.flag then d.flag = false else null"
    reports = []
    src = HEADER + f"class Main<L1, L2>\n  def main(): nil as eps {{ {body} }}"
    check_program(parse_program(src), reports)
    main = next(r for r in reports if r.cls == "Main")
    assert pretty(main.filtered) == "write(L1,L2).read(L1,L2).(write(L1,L2) + eps)"


def test_loops_count_iterations():
    reports = []
    src = HEADER + "class Main<L1, L2>\n  def main(): nil as eps { " \
                   "let d = new D<L2> in for i in 1..4 { d.flag = true } }"
    check_program(parse_program(src), reports)
    main = next(r for r in reports if r.cls == "Main")
    assert main.filtered == parse_behaviour("write(L1,L2).4*{write(L1,L2)}")


def test_compatibility_relation():
    d = OwnedType("D", (AbstractLoc("L1"),))
    assert conforms(d, d)
    assert conforms(NIL, d)
    assert conforms(BOOL, NIL) and conforms(d, NIL)
    assert not conforms(d, BOOL)
    assert not conforms(d, OwnedType("D", (AbstractLoc("L2"),)))
    assert not conforms(INT, BOOL)


def test_typing_under_a_context():
    table = ClassTable(program("topology"))
    this = OwnedType("Main", (NodeId(0), NodeId(1), NodeId(1)))
    typer = Typer(table, strict=False)
    assert typer.type_expr([{"this": this}], TrueLit()) == (BOOL, EPS)
    e = parse_expr("new D<L2>", params=("L1", "L2", "L3"), main=True)
    ctx = [{"this": OwnedType("Main", (AbstractLoc("L1"), AbstractLoc("L2"), AbstractLoc("L3")))}]
    t, b = typer.type_expr(ctx, e)
    assert t == OwnedType("D", (AbstractLoc("L2"),))
    assert pretty(filter_behaviour(b)) == "write(L1,L2)"


def test_untypable_expression_raises():
    table = ClassTable(program("topology"))
    with pytest.raises(TypingError):
        Typer(table).type_expr([{}], parse_expr("x"))
