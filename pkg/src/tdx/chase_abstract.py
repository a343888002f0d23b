"""Abstract chase over finite, horizon-materialized instances.

Structurally the same two rounds as the concrete chase, but facts carry time
points and fresh nulls are point-annotated.  Infinite abstract views are never
materialized here; they are reached through ``sem_instance`` with an explicit
horizon, and the rounds run on the resulting finite instances.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import PreconditionError
from .chase_concrete import (
    ChaseOutcome,
    NullCounter,
    _close_and_replace,
    _round_equalities,
    _step_equalities,
)
from .homomorphism import enumerate_formula_homs, instantiate_atom
from .mapping_lang import Mapping, SttTgd, Tkc
from .model import (
    ABSTRACT,
    Fact,
    Instance,
    PointNull,
    RelationSchema,
    Value,
    conform_instance,
    is_complete,
)


def st_round_abstract(inst: Instance, rules: Sequence[SttTgd],
                      target: Iterable[RelationSchema]) -> Instance:
    """Union of all dependency steps: per rule and binding, instantiate the
    right-hand side with one fresh point null (context = the bound time point)
    per existential variable, shared across its occurrences."""
    if inst.kind != ABSTRACT:
        raise PreconditionError("the abstract dependency round expects an abstract instance")
    if not is_complete(inst):
        raise PreconditionError("the abstract dependency round requires a complete instance")
    nulls = NullCounter()
    facts: set[Fact] = set()
    for rule in rules:
        for binding in enumerate_formula_homs(rule.lhs, inst):
            extended = dict(binding)
            context = binding[rule.time_var]
            for var in rule.existential_order():
                extended[var] = PointNull(nulls.next_label(), context)
            facts |= {instantiate_atom(atom, extended) for atom in rule.rhs}
    return Instance(ABSTRACT, tuple(target), frozenset(facts))


def tkc_step_abstract(w1: Fact, w2: Fact, tkc: Tkc,
                      schema: RelationSchema) -> frozenset[tuple[Value, Value]]:
    """Equalities between the dependent values of two conflicting abstract facts."""
    return _step_equalities(w1, w2, tkc, schema)


def tkc_round_abstract(inst: Instance, tkcs: Sequence[Tkc]) -> ChaseOutcome:
    """Close all step equalities, then replace nulls by representatives or fail.

    The three derivable cases: two distinct constants equated is a failure; a
    null equated with a constant is replaced by it everywhere; two nulls of
    one time point equated collapse onto a designated one.
    """
    if inst.kind != ABSTRACT:
        raise PreconditionError("the abstract key round expects an abstract instance")
    return _close_and_replace(inst, _round_equalities(inst, tkcs, tkc_step_abstract))


def chase_abstract(src: Instance, m: Mapping) -> ChaseOutcome:
    """Dependency round followed by the key round on a finite complete source."""
    if src.kind != ABSTRACT:
        raise PreconditionError("the abstract chase expects an abstract source instance")
    src = conform_instance(src, m.source)
    if not is_complete(src):
        raise PreconditionError("the source instance must be complete")
    staged = st_round_abstract(src, m.sttgds, m.target)
    return tkc_round_abstract(staged, m.tkcs)
