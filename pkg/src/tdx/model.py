"""Values, facts, schemas, instances, and the two views of temporal data.

A *concrete* instance stores each fact with a clopen interval; an *abstract*
instance stores one fact per time point.  Unknown values are labeled nulls
annotated with the temporal context of the fact they occur in: an interval
null ``N^[s,e)`` in a concrete fact, a point null ``N^t`` in an abstract one.
Two annotated nulls are equal exactly when label and context are both equal.

``sem_fact`` / ``sem_instance`` expand the concrete view into the abstract one
up to an explicit finite horizon (abstract views of unbounded intervals are
infinite, so materialization must be bounded).  ``normalize_instance``
rewrites a concrete instance so that any two intervals across all relations
are either equal or disjoint.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

from .errors import InvalidHorizonError, SchemaError
from .temporal import (
    INF,
    ClopenInterval,
    Infinity,
    build_grid,
    interval_points,
    interval_sort_key,
    split_interval,
)

CONCRETE = "concrete"
ABSTRACT = "abstract"


@dataclass(frozen=True)
class Constant:
    symbol: str

    def __str__(self) -> str:
        return self.symbol


@dataclass(frozen=True)
class IntervalNull:
    label: str
    context: ClopenInterval

    def __str__(self) -> str:
        return f"{self.label}^{self.context}"


@dataclass(frozen=True)
class PointNull:
    label: str
    context: int

    def __str__(self) -> str:
        return f"{self.label}^{self.context}"


Value = Union[Constant, IntervalNull, PointNull]
TimeValue = Union[ClopenInterval, int]


def is_null(v: Value) -> bool:
    return isinstance(v, (IntervalNull, PointNull))


def value_sort_key(v: object) -> tuple:
    """Total order over constants, nulls, time points, and intervals."""
    if isinstance(v, bool):
        raise TypeError(f"not a value: {v!r}")
    if isinstance(v, int):
        return (0, "", v, 0, 0)
    if isinstance(v, ClopenInterval):
        return (1, "", *interval_sort_key(v))
    if isinstance(v, Constant):
        return (2, v.symbol, 0, 0, 0)
    if isinstance(v, IntervalNull):
        return (3, v.label, *interval_sort_key(v.context))
    if isinstance(v, PointNull):
        return (4, v.label, v.context, 0, 0)
    raise TypeError(f"not a value: {v!r}")


@dataclass(frozen=True)
class Fact:
    """One tuple of a relation: non-temporal values plus its time (interval or point)."""

    relation: str
    values: tuple[Value, ...]
    time: TimeValue

    def __str__(self) -> str:
        time = f"[{self.time.start},{'inf' if isinstance(self.time.end, Infinity) else self.time.end})" \
            if isinstance(self.time, ClopenInterval) else str(self.time)
        inner = ", ".join([*(str(v) for v in self.values), time])
        return f"{self.relation}({inner})"


def fact_sort_key(f: Fact) -> tuple:
    return (f.relation, tuple(value_sort_key(v) for v in f.values), value_sort_key(f.time))


@dataclass(frozen=True)
class RelationSchema:
    """Relation signature: non-temporal attributes plus the temporal attribute (last)."""

    name: str
    attributes: tuple[str, ...]
    temporal: str

    @property
    def arity(self) -> int:
        return len(self.attributes)

    @property
    def all_attributes(self) -> tuple[str, ...]:
        return (*self.attributes, self.temporal)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class Instance:
    """A finite set of facts per relation, tagged concrete or abstract.

    Instances are immutable values; the schema is kept sorted by relation name
    so that equal instances serialize identically.
    """

    kind: str
    schema: tuple[RelationSchema, ...]
    facts: frozenset[Fact]

    def __post_init__(self) -> None:
        if self.kind not in (CONCRETE, ABSTRACT):
            raise ValueError(f"instance kind must be {CONCRETE!r} or {ABSTRACT!r}, got {self.kind!r}")
        object.__setattr__(self, "schema", tuple(sorted(self.schema, key=lambda r: r.name)))
        object.__setattr__(self, "facts", frozenset(self.facts))
        names = [r.name for r in self.schema]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate relation name in instance schema")

    @classmethod
    def concrete(cls, schema: Iterable[RelationSchema], facts: Iterable[Fact] = ()) -> "Instance":
        return cls(CONCRETE, tuple(schema), frozenset(facts))

    @classmethod
    def abstract(cls, schema: Iterable[RelationSchema], facts: Iterable[Fact] = ()) -> "Instance":
        return cls(ABSTRACT, tuple(schema), frozenset(facts))

    @cached_property
    def schema_by_name(self) -> dict[str, RelationSchema]:
        return {r.name: r for r in self.schema}

    @cached_property
    def sorted_facts(self) -> tuple[Fact, ...]:
        return tuple(sorted(self.facts, key=fact_sort_key))

    @cached_property
    def facts_by_relation(self) -> dict[str, tuple[Fact, ...]]:
        grouped: dict[str, list[Fact]] = {r.name: [] for r in self.schema}
        for f in self.sorted_facts:
            grouped.setdefault(f.relation, []).append(f)
        return {name: tuple(facts) for name, facts in grouped.items()}

    def relation_facts(self, name: str) -> tuple[Fact, ...]:
        return self.facts_by_relation.get(name, ())

    def replace_facts(self, facts: Iterable[Fact]) -> "Instance":
        return Instance(self.kind, self.schema, frozenset(facts))


def validate_instance(inst: Instance) -> list[Violation]:
    """Check arity, kind-homogeneity, and null-context coherence; violations are data."""
    out: list[Violation] = []
    for f in inst.sorted_facts:
        schema = inst.schema_by_name.get(f.relation)
        if schema is None:
            out.append(Violation("unknown-relation", f"{f}: relation {f.relation!r} is not in the schema"))
            continue
        if len(f.values) != schema.arity:
            out.append(Violation(
                "arity-mismatch",
                f"{f}: relation {f.relation!r} expects {schema.arity} non-temporal values, got {len(f.values)}"))
        if inst.kind == CONCRETE:
            if not isinstance(f.time, ClopenInterval):
                out.append(Violation("kind-violation", f"{f}: concrete fact must carry a clopen interval"))
                continue
            for v in f.values:
                if isinstance(v, PointNull):
                    out.append(Violation("kind-violation", f"{f}: point-annotated null {v} in a concrete fact"))
                elif isinstance(v, IntervalNull) and v.context != f.time:
                    out.append(Violation("context-mismatch", f"{f}: null {v} is not annotated with the fact's interval"))
        else:
            if not isinstance(f.time, int) or isinstance(f.time, bool) or f.time < 0:
                out.append(Violation("kind-violation", f"{f}: abstract fact must carry a finite time point"))
                continue
            for v in f.values:
                if isinstance(v, IntervalNull):
                    out.append(Violation("kind-violation", f"{f}: interval-annotated null {v} in an abstract fact"))
                elif isinstance(v, PointNull) and v.context != f.time:
                    out.append(Violation("context-mismatch", f"{f}: null {v} is not annotated with the fact's time point"))
    return out


def is_complete(inst: Instance) -> bool:
    """True iff no fact contains an annotated null."""
    return not any(is_null(v) for f in inst.facts for v in f.values)


def max_finite_endpoint(inst: Instance) -> int | None:
    """Largest finite interval endpoint or time point in the instance, if any."""
    best: int | None = None
    for f in inst.facts:
        if isinstance(f.time, ClopenInterval):
            candidates = [f.time.start] + ([f.time.end] if isinstance(f.time.end, int) else [])
        else:
            candidates = [f.time]
        for c in candidates:
            if best is None or c > best:
                best = c
    return best


def _check_horizon(horizon: int, fact: Fact) -> None:
    if not isinstance(horizon, int) or isinstance(horizon, bool):
        raise InvalidHorizonError(f"horizon must be a finite time point, got {horizon!r}")
    iv = fact.time
    endpoints = [iv.start] + ([iv.end] if isinstance(iv.end, int) else [])
    for e in endpoints:
        if horizon < e:
            raise InvalidHorizonError(f"horizon {horizon} is below endpoint {e} of fact {fact}")


def sem_fact(f: Fact, horizon: int) -> frozenset[Fact]:
    """Abstract expansion of one concrete fact: one fact per contained time point.

    Constants are copied; an interval null keeps its label and is re-annotated
    with each time point.  ``horizon`` must be at least every finite endpoint
    of the fact; unbounded intervals are truncated at the horizon.
    """
    if not isinstance(f.time, ClopenInterval):
        raise SchemaError(f"{f}: not a concrete fact")
    _check_horizon(horizon, f)
    out = set()
    for t0 in interval_points(f.time, horizon):
        values = []
        for v in f.values:
            if isinstance(v, Constant):
                values.append(v)
            elif isinstance(v, IntervalNull):
                values.append(PointNull(v.label, t0))
            else:
                raise SchemaError(f"{f}: point-annotated null {v} in a concrete fact")
        out.add(Fact(f.relation, tuple(values), t0))
    return frozenset(out)


def sem_instance(inst: Instance, horizon: int) -> Instance:
    """Abstract view of a concrete instance, materialized up to ``horizon``."""
    if inst.kind != CONCRETE:
        raise SchemaError("sem_instance expects a concrete instance")
    facts: set[Fact] = set()
    for f in inst.sorted_facts:
        facts |= sem_fact(f, horizon)
    return Instance(ABSTRACT, inst.schema, frozenset(facts))


def is_normalized(inst: Instance) -> bool:
    """True iff any two fact intervals across all relations are equal or disjoint."""
    if inst.kind != CONCRETE:
        raise SchemaError("normalization is defined for concrete instances")
    intervals = sorted({f.time for f in inst.facts}, key=interval_sort_key)
    for prev, cur in zip(intervals, intervals[1:]):
        if prev.end > cur.start:
            return False
    return True


def normalize_instance(inst: Instance) -> Instance:
    """Split every fact over the endpoint grid of the whole instance.

    The output satisfies the normalization predicate and has the same abstract
    view at every valid horizon: an interval null in a split fact keeps its
    label and is re-annotated with each subinterval.
    """
    if inst.kind != CONCRETE:
        raise SchemaError("normalize_instance expects a concrete instance")
    grid = build_grid(f.time for f in inst.facts)
    facts: set[Fact] = set()
    for f in inst.facts:
        for piece in split_interval(f.time, grid):
            values = tuple(
                IntervalNull(v.label, piece) if isinstance(v, IntervalNull) else v
                for v in f.values)
            facts.add(Fact(f.relation, values, piece))
    return Instance(CONCRETE, inst.schema, frozenset(facts))


def conform_instance(inst: Instance, declared: Iterable[RelationSchema]) -> Instance:
    """Re-type an instance against declared schemas, adding missing relations as empty.

    Raises SchemaError if the instance carries a relation the declaration does
    not know, or one whose attributes disagree with the declaration.
    """
    declared = tuple(declared)
    by_name = {r.name: r for r in declared}
    for r in inst.schema:
        known = by_name.get(r.name)
        if known is None:
            if inst.relation_facts(r.name):
                raise SchemaError(f"relation {r.name!r} is not declared in the mapping")
            continue
        if known != r:
            raise SchemaError(
                f"relation {r.name!r} declared as {known.all_attributes}, instance has {r.all_attributes}")
    return Instance(inst.kind, declared, inst.facts)


# ---------------------------------------------------------------------------
# JSON instance format
#
#   {"kind": "concrete" | "abstract",
#    "relations": {name: {"attributes": [..., temporal_last], "facts": [...]}}}
#
# A fact is {"values": [v, ...], "interval": {"start": s, "end": e | "inf"}}
# (concrete) or {"values": [v, ...], "time": t} (abstract).  A value is a JSON
# string (constant) or {"null": "<label>"}; the null's context is implied by
# the fact's time.
# ---------------------------------------------------------------------------


def instance_to_json(inst: Instance) -> dict:
    relations = {}
    for schema in inst.schema:
        facts = []
        for f in inst.relation_facts(schema.name):
            values = [v.symbol if isinstance(v, Constant) else {"null": v.label} for v in f.values]
            if isinstance(f.time, ClopenInterval):
                end = "inf" if isinstance(f.time.end, Infinity) else f.time.end
                facts.append({"values": values, "interval": {"start": f.time.start, "end": end}})
            else:
                facts.append({"values": values, "time": f.time})
        relations[schema.name] = {"attributes": list(schema.all_attributes), "facts": facts}
    return {"kind": inst.kind, "relations": relations}


def _require(cond: bool, where: str, message: str) -> None:
    if not cond:
        raise SchemaError(f"{where}: {message}")


def _time_from_json(doc: dict, kind: str, where: str) -> TimeValue:
    if kind == CONCRETE:
        _require("interval" in doc, where, "concrete fact must carry an \"interval\"")
        iv = doc["interval"]
        _require(isinstance(iv, dict) and set(iv) == {"start", "end"}, where,
                 "interval must be {\"start\": ..., \"end\": ...}")
        start, end = iv["start"], iv["end"]
        _require(isinstance(start, int) and not isinstance(start, bool), where, "interval start must be an integer")
        if end == "inf":
            end = INF
        else:
            _require(isinstance(end, int) and not isinstance(end, bool), where,
                     "interval end must be an integer or \"inf\"")
        try:
            return ClopenInterval(start, end)
        except ValueError as exc:
            raise SchemaError(f"{where}: {exc}") from exc
    _require("time" in doc, where, "abstract fact must carry a \"time\"")
    t = doc["time"]
    _require(isinstance(t, int) and not isinstance(t, bool) and t >= 0, where,
             "time must be a non-negative integer")
    return t


def _value_from_json(v: object, time: TimeValue, kind: str, where: str) -> Value:
    if isinstance(v, str):
        return Constant(v)
    if isinstance(v, dict) and set(v) == {"null"} and isinstance(v["null"], str):
        if kind == CONCRETE:
            return IntervalNull(v["null"], time)
        return PointNull(v["null"], time)
    raise SchemaError(f"{where}: a value must be a string or {{\"null\": \"<label>\"}}, got {v!r}")


def instance_from_json(doc: object) -> Instance:
    _require(isinstance(doc, dict), "instance", "top level must be a JSON object")
    kind = doc.get("kind")
    _require(kind in (CONCRETE, ABSTRACT), "instance", "\"kind\" must be \"concrete\" or \"abstract\"")
    relations = doc.get("relations")
    _require(isinstance(relations, dict), "instance", "\"relations\" must be an object")
    schemas: list[RelationSchema] = []
    facts: set[Fact] = set()
    for name in relations:
        where = f"relation {name!r}"
        rel = relations[name]
        _require(isinstance(rel, dict), where, "must be an object")
        attrs = rel.get("attributes")
        _require(isinstance(attrs, list) and attrs and all(isinstance(a, str) for a in attrs),
                 where, "\"attributes\" must be a non-empty list of names")
        _require(len(set(attrs)) == len(attrs), where, "duplicate attribute name")
        schema = RelationSchema(name, tuple(attrs[:-1]), attrs[-1])
        schemas.append(schema)
        rows = rel.get("facts", [])
        _require(isinstance(rows, list), where, "\"facts\" must be a list")
        for i, row in enumerate(rows):
            fwhere = f"{where} fact #{i}"
            _require(isinstance(row, dict), fwhere, "must be an object")
            time = _time_from_json(row, kind, fwhere)
            values = row.get("values")
            _require(isinstance(values, list), fwhere, "\"values\" must be a list")
            _require(len(values) == schema.arity, fwhere,
                     f"expected {schema.arity} values, got {len(values)}")
            facts.add(Fact(name, tuple(_value_from_json(v, time, kind, fwhere) for v in values), time))
    return Instance(kind, tuple(schemas), frozenset(facts))


def dumps_instance(inst: Instance) -> str:
    """Canonical, newline-terminated JSON text; byte-deterministic."""
    return json.dumps(instance_to_json(inst), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def loads_instance(text: str) -> Instance:
    return instance_from_json(json.loads(text))
