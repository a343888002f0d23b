"""Concrete chase: a dependency round producing fresh interval-annotated nulls,
then a key round that collects equalities, closes them, and either applies the
replacements or fails on a constant conflict.

Both rounds are parallel: the dependency round is the union of one step per
rule and left-hand-side binding, and the key round derives a single equality
closure from every conflicting fact pair before any replacement happens, so
the outcome does not depend on step order.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import KeyNullViolation, PreconditionError, SchemaError
from .homomorphism import Binding, enumerate_formula_homs, instantiate_atom
from .mapping_lang import Mapping, SttTgd, Tkc
from .model import (
    CONCRETE,
    Constant,
    Fact,
    Instance,
    IntervalNull,
    RelationSchema,
    Value,
    conform_instance,
    is_complete,
    is_normalized,
    is_null,
    normalize_instance,
    value_sort_key,
)


@dataclass(frozen=True)
class Success:
    instance: Instance


@dataclass(frozen=True)
class Failure:
    """Witness of an unsatisfiable key round: two distinct constants forced equal,
    with the chain of derived equalities connecting them."""

    constants: tuple[str, str]
    trace: tuple[tuple[Value, Value], ...]


ChaseOutcome = Union[Success, Failure]


class NullCounter:
    """Deterministic source of fresh null labels: N1, N2, ..."""

    def __init__(self, prefix: str = "N"):
        self._prefix = prefix
        self._n = 0

    def next_label(self) -> str:
        self._n += 1
        return f"{self._prefix}{self._n}"


class EqClosure:
    """Disjoint sets over values, recording the equalities that produced them.

    Merging two classes whose constants differ is a conflict (reported, not
    applied).  A class containing a constant is represented by it; otherwise
    by its null with the least label.  Nulls of different temporal contexts
    can share a class only through a constant, which then represents them.
    """

    def __init__(self) -> None:
        self._parent: dict[Value, Value] = {}
        self._size: dict[Value, int] = {}
        self._const: dict[Value, Constant] = {}
        self._adj: dict[Value, list[Value]] = {}

    def find(self, v: Value) -> Value:
        if v not in self._parent:
            self._parent[v] = v
            self._size[v] = 1
            if isinstance(v, Constant):
                self._const[v] = v
            return v
        root = v
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[v] != root:
            self._parent[v], v = root, self._parent[v]
        return root

    def merge(self, x: Value, y: Value) -> tuple[Constant, Constant] | None:
        """Union the classes of x and y; returns the conflicting constants, if any."""
        self._adj.setdefault(x, []).append(y)
        self._adj.setdefault(y, []).append(x)
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return None
        cx, cy = self._const.get(rx), self._const.get(ry)
        if cx is not None and cy is not None and cx != cy:
            pair = sorted((cx, cy), key=value_sort_key)
            return (pair[0], pair[1])
        if self._size[rx] < self._size[ry]:
            rx, ry = ry, rx
        self._parent[ry] = rx
        self._size[rx] += self._size[ry]
        if cx is None and cy is not None:
            self._const[rx] = cy
        return None

    def members(self) -> dict[Value, list[Value]]:
        grouped: dict[Value, list[Value]] = {}
        for v in self._parent:
            grouped.setdefault(self.find(v), []).append(v)
        return grouped

    def representatives(self) -> dict[Value, Value]:
        """Final replacement map: every tracked value to its class representative."""
        reps: dict[Value, Value] = {}
        for root, members in self.members().items():
            rep = self._const.get(root)
            if rep is None:
                rep = min(members, key=value_sort_key)
            for v in members:
                reps[v] = rep
        return reps

    def trace(self, x: Value, y: Value) -> tuple[tuple[Value, Value], ...]:
        """Shortest chain of recorded equalities linking x to y."""
        prev: dict[Value, Value | None] = {x: None}
        queue = deque([x])
        while queue:
            u = queue.popleft()
            if u == y:
                break
            for w in self._adj.get(u, ()):
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        if y not in prev:
            return ()
        path = []
        cur: Value = y
        while prev[cur] is not None:
            path.append((prev[cur], cur))
            cur = prev[cur]
        return tuple(reversed(path))


def _ordered_pair(x: Value, y: Value) -> tuple[Value, Value]:
    return (x, y) if value_sort_key(x) <= value_sort_key(y) else (y, x)


def _close_and_replace(inst: Instance, equalities: Iterable[tuple[Value, Value]]) -> ChaseOutcome:
    closure = EqClosure()
    for x, y in sorted(set(equalities), key=lambda p: (value_sort_key(p[0]), value_sort_key(p[1]))):
        conflict = closure.merge(x, y)
        if conflict is not None:
            c1, c2 = conflict
            return Failure((c1.symbol, c2.symbol), closure.trace(c1, c2))
    reps = closure.representatives()
    facts = {
        Fact(f.relation, tuple(reps.get(v, v) for v in f.values), f.time)
        for f in inst.facts
    }
    return Success(inst.replace_facts(facts))


def tkc_positions(tkc: Tkc, schema: RelationSchema) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Key and dependent positions of a key constraint within a relation schema."""
    if tkc.relation != schema.name:
        raise SchemaError(f"key constraint on {tkc.relation!r} applied to schema {schema.name!r}")
    unknown = (tkc.key | set(tkc.dependents)) - set(schema.all_attributes)
    if unknown:
        raise SchemaError(f"key constraint on {tkc.relation!r} names unknown attributes {sorted(unknown)}")
    key_pos = tuple(i for i, a in enumerate(schema.attributes) if a in tkc.key)
    dep_pos = tuple(schema.attributes.index(a) for a in tkc.dependents)
    return key_pos, dep_pos


def _step_equalities(u1: Fact, u2: Fact, tkc: Tkc, schema: RelationSchema) -> frozenset[tuple[Value, Value]]:
    key_pos, dep_pos = tkc_positions(tkc, schema)
    if u1.relation != tkc.relation or u2.relation != tkc.relation:
        raise ValueError(f"facts must belong to relation {tkc.relation!r}")
    for f in (u1, u2):
        for i in key_pos:
            if is_null(f.values[i]):
                raise KeyNullViolation(
                    f"{f}: null {f.values[i]} in key position {schema.attributes[i]!r}")
    if u1.time != u2.time or any(u1.values[i] != u2.values[i] for i in key_pos):
        raise ValueError(f"facts {u1} and {u2} do not agree on the temporal key")
    if u1 == u2:
        raise ValueError(f"facts are identical, not conflicting: {u1}")
    return frozenset(
        _ordered_pair(u1.values[i], u2.values[i])
        for i in dep_pos if u1.values[i] != u2.values[i])


def tkc_step_concrete(u1: Fact, u2: Fact, tkc: Tkc,
                      schema: RelationSchema) -> frozenset[tuple[Value, Value]]:
    """Equalities between the dependent values of two conflicting concrete facts."""
    return _step_equalities(u1, u2, tkc, schema)


def _round_equalities(inst: Instance, tkcs: Sequence[Tkc],
                      step) -> list[tuple[Value, Value]]:
    equalities: list[tuple[Value, Value]] = []
    for tkc in tkcs:
        schema = inst.schema_by_name.get(tkc.relation)
        if schema is None:
            raise SchemaError(f"key constraint on unknown relation {tkc.relation!r}")
        key_pos, _ = tkc_positions(tkc, schema)
        groups: dict[tuple, list[Fact]] = {}
        for f in inst.relation_facts(tkc.relation):
            groups.setdefault((f.time, tuple(f.values[i] for i in key_pos)), []).append(f)
        for group in groups.values():
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    equalities.extend(step(group[i], group[j], tkc, schema))
    return equalities


def st_step_concrete(inst: Instance, rule: SttTgd, binding: Binding,
                     nulls: NullCounter) -> frozenset[Fact]:
    """One chase step: extend the binding with fresh interval nulls and fire the rule.

    Each existential variable gets one fresh null annotated with the bound
    interval, reused at every occurrence across the right-hand-side atoms.
    """
    overlap = set(binding) & rule.existentials
    if overlap:
        raise ValueError(f"binding must not cover existential variables {sorted(overlap)}")
    for atom in rule.lhs:
        if instantiate_atom(atom, binding) not in inst.facts:
            raise ValueError(f"binding is not a formula homomorphism for atom {atom.relation!r}")
    extended = dict(binding)
    context = binding[rule.time_var]
    for var in rule.existential_order():
        extended[var] = IntervalNull(nulls.next_label(), context)
    return frozenset(instantiate_atom(atom, extended) for atom in rule.rhs)


def st_round_concrete(inst: Instance, rules: Sequence[SttTgd],
                      target: Iterable[RelationSchema]) -> Instance:
    """Union of all dependency steps over every rule and left-hand-side binding.

    Requires a normalized, complete concrete instance.  Fresh null labels are
    issued in enumeration order (rules in order, bindings in canonical order,
    existential variables in textual order), so the output is deterministic.
    """
    if inst.kind != CONCRETE:
        raise PreconditionError("the concrete dependency round expects a concrete instance")
    if not is_normalized(inst):
        raise PreconditionError("the concrete dependency round requires a normalized instance")
    if not is_complete(inst):
        raise PreconditionError("the concrete dependency round requires a complete instance")
    nulls = NullCounter()
    facts: set[Fact] = set()
    for rule in rules:
        for binding in enumerate_formula_homs(rule.lhs, inst):
            facts |= st_step_concrete(inst, rule, binding, nulls)
    return Instance(CONCRETE, tuple(target), frozenset(facts))


def tkc_round_concrete(inst: Instance, tkcs: Sequence[Tkc]) -> ChaseOutcome:
    """Close the equalities of every conflicting pair, then replace or fail.

    All replacements are applied simultaneously from the closure's final
    representatives; a merge of two distinct constants aborts the round with
    a witness.  A null in a key position raises KeyNullViolation instead.
    """
    if inst.kind != CONCRETE:
        raise PreconditionError("the concrete key round expects a concrete instance")
    if not is_normalized(inst):
        raise PreconditionError("the concrete key round requires a normalized instance")
    return _close_and_replace(inst, _round_equalities(inst, tkcs, tkc_step_concrete))


def chase_concrete(src: Instance, m: Mapping) -> ChaseOutcome:
    """Normalize, run the dependency round, then the key round.

    On success the result together with the source satisfies every dependency,
    and the result satisfies every key constraint.
    """
    if src.kind != CONCRETE:
        raise PreconditionError("the concrete chase expects a concrete source instance")
    src = conform_instance(src, m.source)
    if not is_complete(src):
        raise PreconditionError("the source instance must be complete")
    staged = st_round_concrete(normalize_instance(src), m.sttgds, m.target)
    return tkc_round_concrete(staged, m.tkcs)
