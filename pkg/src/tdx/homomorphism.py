"""Formula-homomorphism enumeration and abstract-homomorphism search.

A *formula homomorphism* binds the variables of a conjunction of atoms so
that every atom instantiates to a fact of the instance; the shared temporal
variable binds to an interval (concrete instance) or a time point (abstract).
Chase steps and query evaluation are both driven by this enumeration.

An *abstract homomorphism* maps one abstract instance into another: constants
and time points are fixed, and each point null may go to a constant or to a
point null with the same context.  Existence in both directions is the
equivalence used to compare chase results across the two views.
"""
from __future__ import annotations

from typing import Mapping as TMapping, Optional, Sequence

from .errors import SchemaError
from .mapping_lang import Atom, Lit
from .model import (
    ABSTRACT,
    Constant,
    Fact,
    Instance,
    PointNull,
    Value,
    fact_sort_key,
    value_sort_key,
)

Binding = dict[str, object]  # variable -> Value, plus temporal variable -> interval/point
AbstractHom = dict[PointNull, Value]


def instantiate_atom(atom: Atom, binding: TMapping[str, object]) -> Fact:
    """Apply a total binding to one atom, producing a fact."""
    values = []
    for term in atom.args:
        if isinstance(term, Lit):
            values.append(Constant(term.value))
        else:
            values.append(binding[term.name])
    return Fact(atom.relation, tuple(values), binding[atom.time_var])


def _match_atom(atom: Atom, fact: Fact, binding: Binding) -> Optional[Binding]:
    ext = dict(binding)
    for term, value in zip(atom.args, fact.values):
        if isinstance(term, Lit):
            if value != Constant(term.value):
                return None
        else:
            bound = ext.get(term.name)
            if bound is None:
                ext[term.name] = value
            elif bound != value:
                return None
    bound = ext.get(atom.time_var)
    if bound is None:
        ext[atom.time_var] = fact.time
    elif bound != fact.time:
        return None
    return ext


def enumerate_formula_homs(atoms: Sequence[Atom], inst: Instance,
                           initial: TMapping[str, object] | None = None) -> list[Binding]:
    """All bindings under which every atom instantiates to a fact of ``inst``.

    The result is sorted by the bound values (variables in name order), so the
    enumeration order is deterministic.  ``initial`` seeds a partial binding.
    """
    for atom in atoms:
        schema = inst.schema_by_name.get(atom.relation)
        if schema is None:
            raise SchemaError(f"unknown relation {atom.relation!r}")
        if len(atom.args) != schema.arity:
            raise SchemaError(f"relation {atom.relation!r} expects {schema.arity} value "
                              f"arguments, got {len(atom.args)}")
    results: list[Binding] = []

    def extend(i: int, binding: Binding) -> None:
        if i == len(atoms):
            results.append(binding)
            return
        atom = atoms[i]
        for fact in inst.relation_facts(atom.relation):
            ext = _match_atom(atom, fact, binding)
            if ext is not None:
                extend(i + 1, ext)

    extend(0, dict(initial or {}))
    results.sort(key=lambda b: tuple(value_sort_key(b[v]) for v in sorted(b)))
    return results


def _check_same_abstract(a: Instance, b: Instance) -> None:
    if a.kind != ABSTRACT or b.kind != ABSTRACT:
        raise ValueError("abstract instances are required")
    if a.schema != b.schema:
        raise SchemaError("instances must share a schema")


def _try_image(f: Fact, g: Fact, assignment: AbstractHom) -> Optional[list[PointNull]]:
    """Try mapping fact ``f`` onto ``g``; mutates ``assignment`` on success."""
    if len(f.values) != len(g.values):
        return None
    newly: list[PointNull] = []
    for v, w in zip(f.values, g.values):
        if isinstance(v, Constant):
            if v == w:
                continue
        else:
            bound = assignment.get(v)
            if bound is None:
                if isinstance(w, Constant) or (isinstance(w, PointNull) and w.context == v.context):
                    assignment[v] = w
                    newly.append(v)
                    continue
            elif bound == w:
                continue
        for n in newly:
            del assignment[n]
        return None
    return newly


def _search_component(facts: Sequence[Fact], index: dict, assignment: AbstractHom) -> bool:
    """Backtracking over one group of facts; extends ``assignment`` in place."""
    trail: list[tuple[int, list[PointNull]]] = []
    depth, start = 0, 0
    while depth < len(facts):
        f = facts[depth]
        candidates = index.get((f.relation, f.time), [])
        pos = start
        newly = None
        while pos < len(candidates):
            newly = _try_image(f, candidates[pos], assignment)
            if newly is not None:
                break
            pos += 1
        if newly is None:
            if not trail:
                return False
            pos_prev, newly_prev = trail.pop()
            for n in newly_prev:
                del assignment[n]
            depth -= 1
            start = pos_prev + 1
        else:
            trail.append((pos, newly))
            depth += 1
            start = 0
    return True


def find_abstract_hom(a: Instance, b: Instance) -> Optional[AbstractHom]:
    """Search for an abstract homomorphism from ``a`` into ``b``.

    Facts interact only through shared nulls, so the search runs per connected
    component of the shared-null graph; a fact without nulls must itself occur
    in ``b``.  Within a component it backtracks over the facts in canonical
    order, trying candidate images in canonical order, which makes the result
    the canonically first assignment (component choices are independent).
    Returns None when no homomorphism exists.
    """
    _check_same_abstract(a, b)
    b_facts = b.facts
    index: dict[tuple[str, object], list[Fact]] = {}
    for g in b.sorted_facts:
        index.setdefault((g.relation, g.time), []).append(g)

    parent: dict[PointNull, PointNull] = {}

    def find(n: PointNull) -> PointNull:
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    components: dict[PointNull, list[Fact]] = {}
    assignment: AbstractHom = {}
    for f in a.sorted_facts:
        nulls = [v for v in f.values if isinstance(v, PointNull)]
        if not nulls:
            if f not in b_facts:  # constants are fixed, so the image is f itself
                return None
            continue
        for n in nulls:
            parent.setdefault(n, n)
        first = find(nulls[0])
        for n in nulls[1:]:
            parent[find(n)] = first
        components.setdefault(first, []).append(f)

    merged: dict[PointNull, list[Fact]] = {}
    for root, facts in components.items():
        merged.setdefault(find(root), []).extend(facts)
    for facts in merged.values():
        facts.sort(key=fact_sort_key)
        if not _search_component(facts, index, assignment):
            return None
    return dict(assignment)


def apply_abstract_hom(hom: TMapping[PointNull, Value], inst: Instance) -> Instance:
    """Image of an abstract instance under a null assignment."""
    facts = {
        Fact(f.relation, tuple(hom.get(v, v) if isinstance(v, PointNull) else v
                               for v in f.values), f.time)
        for f in inst.facts
    }
    return Instance(inst.kind, inst.schema, frozenset(facts))


def hom_equivalent(a: Instance, b: Instance) -> bool:
    """True iff abstract homomorphisms exist in both directions."""
    return find_abstract_hom(a, b) is not None and find_abstract_hom(b, a) is not None
