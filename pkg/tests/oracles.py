"""Independent oracles the main code paths are checked against.

These deliberately avoid the package's search and expansion routines: interval
semantics is recomputed by explicit point enumeration, and homomorphism
existence by exhaustive enumeration of null assignments.
"""
from __future__ import annotations

import itertools

from tdx import ClopenInterval, Constant, Fact, Instance, PointNull, value_sort_key


def interval_point_set(interval: ClopenInterval, horizon: int) -> set[int]:
    points = set()
    t = interval.start
    while t < horizon and (not isinstance(interval.end, int) or t < interval.end):
        points.add(t)
        t += 1
    return points


def expand_fact_by_points(f: Fact, horizon: int) -> set[Fact]:
    """Point-by-point expansion of a concrete fact, written independently."""
    out = set()
    for t in interval_point_set(f.time, horizon):
        values = tuple(
            PointNull(v.label, t) if not isinstance(v, Constant) else v
            for v in f.values)
        out.add(Fact(f.relation, values, t))
    return out


def expand_instance_by_points(inst: Instance, horizon: int) -> set[Fact]:
    out: set[Fact] = set()
    for f in inst.facts:
        out |= expand_fact_by_points(f, horizon)
    return out


def brute_force_hom_exists(a: Instance, b: Instance) -> bool:
    """Exhaustive enumeration over context-respecting null assignments.

    Per-null candidates are narrowed to the values appearing in ``b`` at the
    positions where the null occurs in ``a`` (with matching relation and
    time); any assignment outside those sets maps some fact of ``a`` onto a
    tuple absent from ``b``, so the narrowing cannot lose a homomorphism.
    """
    nulls = sorted({v for f in a.facts for v in f.values if isinstance(v, PointNull)},
                   key=value_sort_key)
    candidates = []
    for n in nulls:
        pool = None
        for f in a.facts:
            for pos, v in enumerate(f.values):
                if v != n:
                    continue
                here = {
                    g.values[pos]
                    for g in b.facts
                    if g.relation == f.relation and g.time == f.time
                }
                pool = here if pool is None else pool & here
        assert pool is not None
        pool = {
            v for v in pool
            if isinstance(v, Constant) or (isinstance(v, PointNull) and v.context == n.context)
        }
        if not pool:
            return False
        candidates.append(sorted(pool, key=value_sort_key))

    b_facts = set(b.facts)
    for combo in itertools.product(*candidates):
        assignment = dict(zip(nulls, combo))
        ok = True
        for f in a.facts:
            image = Fact(
                f.relation,
                tuple(assignment.get(v, v) if isinstance(v, PointNull) else v for v in f.values),
                f.time)
            if image not in b_facts:
                ok = False
                break
        if ok:
            return True
    return False
