import random

import pytest

from tdx import (
    Atom,
    Lit,
    Mapping,
    ParseError,
    SttTgd,
    Tkc,
    Ucq,
    Var,
    parse_mapping,
    render_mapping,
    validate_mapping,
)

from generators import random_mapping
from helpers import rel


def test_parse_running_example(example1):
    assert [r.name for r in example1.source] == ["Employee1", "Employee2"]
    assert [r.name for r in example1.target] == ["Emp", "Sal"]
    assert len(example1.sttgds) == 2
    first = example1.sttgds[0]
    assert first.lhs == (Atom("Employee1", (Var("n"), Var("c")), "t"),)
    assert first.rhs == (
        Atom("Emp", (Var("n"), Var("p"), Var("c")), "t"),
        Atom("Sal", (Var("n"), Var("p"), Var("s")), "t"),
    )
    assert first.existentials == {"p", "s"}
    assert first.existential_order() == ("p", "s")
    assert len(example1.tkcs) == 2
    emp_key = example1.tkcs[0]
    assert emp_key == Tkc("Emp", frozenset({"name", "time"}), ("position", "company"))
    assert {q.name for q in example1.queries} == {"positions", "paid_positions"}
    assert validate_mapping(example1) == []


def test_parse_constants_and_disjuncts():
    text = """
source Log(event, @t).
target Out(event, level, @t).
rule Log(e, t) -> Out(e, 'info', t).
query q(e, t) :- Out(e, 'info', t).
query q(e, t) :- Out(e, 'warn', t).
"""
    m = parse_mapping(text)
    assert m.sttgds[0].rhs[0].args == (Var("e"), Lit("info"))
    (q,) = m.queries
    assert len(q.disjuncts) == 2
    assert q.columns == ("e", "t")


def expect_error(text, needle, line=None):
    with pytest.raises(ParseError) as err:
        parse_mapping(text)
    assert needle in str(err.value), str(err.value)
    if line is not None:
        assert err.value.line == line


DECLS = "source A(x, @t).\ntarget B(x, y, @t).\n"


def test_parse_errors_carry_locations():
    expect_error(DECLS + "rule A(n, t) -> B(n, ?p, u).",
                 "share one temporal variable", line=3)
    expect_error(DECLS + "key B(x, y, @t).", "at least one dependent")
    expect_error(DECLS + "rule A(n, t) -> B(n, q, t).", "not bound on the left")
    expect_error(DECLS + "rule A(?e, t) -> B(e, e, t).", "only allowed")
    expect_error(DECLS + "rule B(x, y, t) -> B(x, y, t).", "cannot be used here")
    expect_error(DECLS + "rule A(n, t) -> B(n, t, t).", "value position")
    expect_error(DECLS + "rule A(n, t) -> B(n, 'x', 't').", "plain variable")
    expect_error(DECLS + "source A(z, @t).", "already declared")
    expect_error(DECLS + "rule A(n, t) -> C(n, n, t).", "unknown target relation")
    expect_error(DECLS + "key B(z, @t).", "unknown attribute")
    expect_error(DECLS + "key B(x, t).", "write the temporal attribute as @t")
    expect_error(DECLS + "key A(@t).", "source relation")
    expect_error(DECLS + "query q(x, t) :- A(x, t).", "target relation is required")
    expect_error(DECLS + "query q(h, t) :- B(x, y, t).", "does not occur in the body")
    expect_error(DECLS + "query q(x, t) :- B(x, ?y, t).", "'?' markers are not allowed")
    expect_error(DECLS + "query q(x, t) :- B(x, y, t).\nquery q(y, t) :- B(y, x, t).",
                 "different head")
    expect_error(DECLS + "rule A(n, t) -> B(n, 'x, t).", "unterminated constant")
    expect_error(DECLS + "rule A(n, t) -> B(n, y, t)", "expected '.'")
    expect_error(DECLS + "bogus A(x, @t).", "expected one of")
    expect_error("source A(x).\n", "must declare a temporal attribute")
    expect_error("source A(@t, x).\n", "must be last")
    expect_error("source A(x, x, @t).\n", "duplicate attribute")


def test_existential_marker_hint():
    expect_error(DECLS + "rule A(n, t) -> B(n, ?p, t), B(n, p, t).",
                 "write it as ?p at every occurrence")


def test_temporal_only_key_is_permitted():
    m = parse_mapping("target B(x, @t).\nkey B(@t).")
    assert m.tkcs == (Tkc("B", frozenset({"t"}), ("x",)),)


def test_validate_mapping_detects_structural_defects():
    a, b = rel("A", "x", temporal="t"), rel("B", "x", "y", temporal="t")
    unsafe = Mapping((a,), (b,), (SttTgd(
        (Atom("A", (Var("n"),), "t"),),
        (Atom("B", (Var("n"), Var("m")), "t"),),
        frozenset()),), (), ())
    assert [v.code for v in validate_mapping(unsafe)] == ["unsafe-variable"]

    query_on_source = Mapping((a,), (b,), (), (), (
        Ucq("q", ("x",), "t", ((Atom("A", (Var("x"),), "t"),),)),))
    assert [v.code for v in validate_mapping(query_on_source)] == ["wrong-schema-side"]

    bad_key = Mapping((a,), (b,), (), (Tkc("B", frozenset({"x", "y", "t"}), ()),), ())
    assert "key-violation" in [v.code for v in validate_mapping(bad_key)]

    dangling = Mapping((a,), (b,), (SttTgd(
        (Atom("A", (Var("n"),), "t"),),
        (Atom("B", (Var("n"), Var("n")), "t"),),
        frozenset({"ghost"})),), (), ())
    assert [v.code for v in validate_mapping(dangling)] == ["existential-variable"]


def test_render_round_trip_running_example(example1, example3):
    assert parse_mapping(render_mapping(example1)) == example1
    assert parse_mapping(render_mapping(example3)) == example3


@pytest.mark.parametrize("seed", range(40))
def test_render_round_trip_random_mappings(seed):
    m = random_mapping(random.Random(seed))
    rendered = render_mapping(m)
    again = parse_mapping(rendered)
    assert again == m
    # every parsed dependency shares a single temporal variable
    for dep in again.sttgds:
        assert len({a.time_var for a in (*dep.lhs, *dep.rhs)}) == 1
