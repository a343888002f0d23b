import pytest

from tdx import (
    AnswerSet,
    Atom,
    Instance,
    InvalidHorizonError,
    NoSolution,
    PreconditionError,
    Ucq,
    Var,
    answers_sem,
    answers_to_instance,
    certain_abstract,
    certain_concrete,
    dumps_instance,
    find_abstract_hom,
    loads_instance,
    naive_eval,
    sem_instance,
)

from helpers import fact, iv, rel

HORIZON = 13


def positions_query(example1):
    return example1.query("positions")


def test_naive_eval_drops_rows_with_nulls(fig3, example1):
    ans = naive_eval(positions_query(example1), fig3)
    assert ans.columns == ("n", "p", "t")
    assert ans.kind == "concrete"
    assert ans.rows == {
        ("Ada", "Developer", iv(8, 10)),
        ("Ada", "DBA", iv(10, 11)),
    }


def test_naive_eval_on_the_abstract_view(fig4, example1):
    ans = naive_eval(positions_query(example1), fig4)
    assert ans.rows == {
        ("Ada", "Developer", 8),
        ("Ada", "Developer", 9),
        ("Ada", "DBA", 10),
    }


def test_naive_eval_on_empty_instance(example1):
    empty = Instance.concrete(example1.target, [])
    assert naive_eval(positions_query(example1), empty).rows == frozenset()


def test_naive_eval_requires_normalized_concrete_input(example1):
    inst = Instance.concrete(example1.target, [
        fact("Emp", "Ada", "DBA", "IBM", time=iv(0, 4)),
        fact("Emp", "Ada", "DBA", "IBM", time=iv(2, 3)),
    ])
    with pytest.raises(PreconditionError):
        naive_eval(positions_query(example1), inst)


def test_naive_eval_union_of_disjuncts(example1):
    q = Ucq("either", ("n",), "t", (
        (Atom("Emp", (Var("n"), Var("p"), Var("c")), "t"),),
        (Atom("Sal", (Var("n"), Var("p"), Var("s")), "t"),),
    ))
    inst = Instance.concrete(example1.target, [
        fact("Emp", "Ada", "DBA", "IBM", time=iv(0, 1)),
        fact("Sal", "Bob", "DBA", "50k", time=iv(2, 3)),
    ])
    assert naive_eval(q, inst).rows == {("Ada", iv(0, 1)), ("Bob", iv(2, 3))}


def test_answers_sem_expands_intervals(example1, fig3, fig4):
    ans = AnswerSet("q", "concrete", ("n", "p", "t"),
                    frozenset({("Ada", "Developer", iv(8, 10))}))
    assert answers_sem(ans, 13).rows == {("Ada", "Developer", 8), ("Ada", "Developer", 9)}
    empty = AnswerSet("q", "concrete", ("n", "t"), frozenset())
    assert answers_sem(empty, 13).rows == frozenset()
    q = positions_query(example1)
    assert answers_sem(naive_eval(q, fig3), HORIZON) == naive_eval(q, fig4)


def test_answers_sem_validates_horizon():
    ans = AnswerSet("q", "concrete", ("n", "t"), frozenset({("Ada", iv(8, 10))}))
    with pytest.raises(InvalidHorizonError):
        answers_sem(ans, 9)
    abstract = AnswerSet("q", "abstract", ("n", "t"), frozenset({("Ada", 8)}))
    with pytest.raises(PreconditionError):
        answers_sem(abstract, 13)


def test_certain_concrete_running_example(fig1, example1):
    ans = certain_concrete(positions_query(example1), fig1, example1)
    assert ans.rows == {
        ("Ada", "Developer", iv(8, 10)),
        ("Ada", "DBA", iv(10, 11)),
    }


def test_certain_concrete_failure_is_no_solution(fig1, example1):
    src = Instance.concrete(fig1.schema,
                            fig1.facts | {fact("Employee1", "Ada", "HP", time=iv(8, 9))})
    out = certain_concrete(positions_query(example1), src, example1)
    assert isinstance(out, NoSolution)
    assert out.failure.constants == ("HP", "IBM")


def test_certain_concrete_empty_source(example1):
    out = certain_concrete(positions_query(example1),
                           Instance.concrete(example1.source, []), example1)
    assert out.rows == frozenset()


def test_certain_abstract_running_example(fig2, example1):
    ans = certain_abstract(positions_query(example1), fig2, example1)
    assert ans.rows == {
        ("Ada", "Developer", 8),
        ("Ada", "Developer", 9),
        ("Ada", "DBA", 10),
    }


def test_certain_abstract_no_solution(example3, example3_source):
    out = certain_abstract(example3.query("pos"), example3_source, example3)
    assert isinstance(out, NoSolution)
    assert out.failure.constants == ("DBA", "Manager")


def test_certain_answers_commute_with_expansion(fig1, example1):
    for q in example1.queries:
        concrete = certain_concrete(q, fig1, example1)
        abstract = certain_abstract(q, sem_instance(fig1, HORIZON), example1)
        assert answers_sem(concrete, HORIZON) == abstract


def test_answers_never_contain_nulls(fig3, fig4, example1):
    for inst in (fig3, fig4):
        for q in example1.queries:
            for row in naive_eval(q, inst).rows:
                assert all(isinstance(v, str) for v in row[:-1])


def test_answers_monotone_under_hom(fig4, fig5, example1):
    # a hom from fig4 into fig5 exists, so fig4's complete answers survive in fig5
    assert find_abstract_hom(fig4, fig5) is not None
    for q in example1.queries:
        assert naive_eval(q, fig4).rows <= naive_eval(q, fig5).rows
    bigger = Instance.abstract(fig5.schema,
                               fig5.facts | {fact("Emp", "Bob", "CTO", "HP", time=8)})
    assert find_abstract_hom(fig5, bigger) is not None
    for q in example1.queries:
        assert naive_eval(q, fig5).rows <= naive_eval(q, bigger).rows


def test_answers_serialize_as_an_instance(fig3, example1):
    ans = naive_eval(positions_query(example1), fig3)
    inst = answers_to_instance(ans)
    assert inst.kind == "concrete"
    assert loads_instance(dumps_instance(inst)) == inst
    assert {f.relation for f in inst.facts} == {"positions"}
