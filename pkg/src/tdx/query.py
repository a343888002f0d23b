"""Naive query evaluation and certain answers through the chase.

Naive evaluation reads annotated nulls as distinct fresh constants, so a
variable may bind to a null during matching, but any answer tuple still
carrying one is dropped: answers contain constants and a time value only.
Certain answers are computed by evaluating naively on the chase result, which
is a universal solution; a failed chase yields the distinguished NoSolution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .chase_abstract import chase_abstract
from .chase_concrete import Failure, chase_concrete
from .errors import InvalidHorizonError, PreconditionError
from .homomorphism import enumerate_formula_homs
from .mapping_lang import Mapping, Ucq
from .model import (
    ABSTRACT,
    CONCRETE,
    Constant,
    Fact,
    Instance,
    RelationSchema,
    is_normalized,
    value_sort_key,
)
from .temporal import ClopenInterval, interval_points


@dataclass(frozen=True)
class AnswerSet:
    """Answers to one named query: complete tuples of constants plus a time value."""

    name: str
    kind: str
    columns: tuple[str, ...]
    rows: frozenset[tuple]

    @property
    def sorted_rows(self) -> tuple[tuple, ...]:
        return tuple(sorted(self.rows, key=lambda row: tuple(
            value_sort_key(v) if not isinstance(v, str) else (2, v, 0, 0, 0) for v in row)))


@dataclass(frozen=True)
class NoSolution:
    """Distinguished outcome when the chase fails: no solution exists to query."""

    failure: Failure


def naive_eval(q: Ucq, inst: Instance) -> AnswerSet:
    """Evaluate a union of conjunctive queries, discarding incomplete answers.

    Per disjunct, every formula homomorphism of the body is projected onto the
    head variables and the temporal variable; the disjunct results are
    unioned, and tuples containing any null are dropped.  A concrete instance
    must be normalized.
    """
    if inst.kind == CONCRETE and not is_normalized(inst):
        raise PreconditionError("naive evaluation on a concrete instance requires it normalized")
    rows: set[tuple] = set()
    for disjunct in q.disjuncts:
        for binding in enumerate_formula_homs(disjunct, inst):
            values = [binding[v] for v in q.head]
            if any(not isinstance(v, Constant) for v in values):
                continue  # a null never reaches an answer
            rows.add((*(v.symbol for v in values), binding[q.time_var]))
    return AnswerSet(q.name, inst.kind, q.columns, frozenset(rows))


def answers_sem(ans: AnswerSet, horizon: int) -> AnswerSet:
    """Expand concrete answers to one abstract answer per contained time point."""
    if ans.kind != CONCRETE:
        raise PreconditionError("answers_sem expects concrete answers")
    if not isinstance(horizon, int) or isinstance(horizon, bool):
        raise InvalidHorizonError(f"horizon must be a finite time point, got {horizon!r}")
    for row in ans.rows:
        iv: ClopenInterval = row[-1]
        for endpoint in (iv.start, *([iv.end] if isinstance(iv.end, int) else ())):
            if horizon < endpoint:
                raise InvalidHorizonError(f"horizon {horizon} is below endpoint {endpoint}")
    rows = {
        (*row[:-1], t0)
        for row in ans.rows
        for t0 in interval_points(row[-1], horizon)
    }
    return AnswerSet(ans.name, ABSTRACT, ans.columns, frozenset(rows))


def certain_concrete(q: Ucq, src: Instance, m: Mapping) -> Union[AnswerSet, NoSolution]:
    """Certain answers over the concrete view: chase, then evaluate naively."""
    outcome = chase_concrete(src, m)
    if isinstance(outcome, Failure):
        return NoSolution(outcome)
    return naive_eval(q, outcome.instance)


def certain_abstract(q: Ucq, src: Instance, m: Mapping) -> Union[AnswerSet, NoSolution]:
    """Certain answers over the abstract view: chase, then evaluate naively."""
    outcome = chase_abstract(src, m)
    if isinstance(outcome, Failure):
        return NoSolution(outcome)
    return naive_eval(q, outcome.instance)


def answers_to_instance(ans: AnswerSet) -> Instance:
    """Answers as a one-relation instance (complete facts only), for serialization."""
    schema = RelationSchema(ans.name, ans.columns[:-1], ans.columns[-1])
    facts = {
        Fact(ans.name, tuple(Constant(v) for v in row[:-1]), row[-1])
        for row in ans.rows
    }
    return Instance(ans.kind, (schema,), frozenset(facts))
