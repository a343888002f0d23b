import pytest
from hypothesis import given, strategies as st

from tdx import INF, ClopenInterval, Infinity, build_grid, interval_contains, split_interval

from helpers import iv
from oracles import interval_point_set


def test_infinity_is_a_singleton_and_orders_above_every_natural():
    assert Infinity() is INF
    assert 0 < INF and 10**9 < INF
    assert INF > 5 and not INF < 5
    assert not INF < INF and INF <= INF and INF >= 5
    assert INF != 5 and INF == Infinity()


def test_interval_validation():
    with pytest.raises(ValueError):
        ClopenInterval(5, 5)
    with pytest.raises(ValueError):
        ClopenInterval(7, 3)
    with pytest.raises(ValueError):
        ClopenInterval(-1, 3)
    with pytest.raises(ValueError):
        ClopenInterval(INF, INF)  # infinity never starts an interval
    assert str(iv(8, 11)) == "[8,11)"
    assert str(iv(2014, INF)) == "[2014,inf)"


def test_contains():
    assert interval_contains(iv(2008, 2011), 2010)
    assert not interval_contains(iv(2008, 2011), 2011)
    assert interval_contains(iv(2014, INF), 9999)
    with pytest.raises(ValueError):
        interval_contains(iv(0, 2), INF)


def test_build_grid():
    assert build_grid([iv(8, 11), iv(11, 13), iv(8, 10), iv(10, 11)]) == [8, 10, 11, 13]
    assert build_grid([]) == []
    assert build_grid([iv(2014, INF), iv(2016, 2018)]) == [2014, 2016, 2018]


def test_split_interval():
    assert split_interval(iv(8, 11), [8, 10, 11, 13]) == [iv(8, 10), iv(10, 11)]
    assert split_interval(iv(10, 11), [8, 10, 11, 13]) == [iv(10, 11)]
    pieces = split_interval(iv(2014, INF), [2014, 2016])
    assert pieces == [iv(2014, 2016), iv(2016, INF)]
    # the pieces partition the interval's point set at any finite horizon
    union = set()
    for piece in pieces:
        points = interval_point_set(piece, 2020)
        assert not (union & points)
        union |= points
    assert union == interval_point_set(iv(2014, INF), 2020)


def test_split_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        split_interval(iv(0, 5), [3, 1])
    with pytest.raises(ValueError):
        split_interval(iv(0, 5), [1, 1, 3])


intervals = st.builds(
    lambda s, length: iv(s, INF if length is None else s + length),
    st.integers(0, 20),
    st.one_of(st.none(), st.integers(1, 10)),
)


@given(st.sets(intervals, min_size=0, max_size=8))
def test_grid_splitting_properties(ivs):
    grid = build_grid(ivs)
    assert grid == sorted(set(grid))
    horizon = max(grid, default=0) + 3
    pieces_of = {interval: split_interval(interval, grid) for interval in ivs}
    for interval, pieces in pieces_of.items():
        union = set()
        for piece in pieces:
            points = interval_point_set(piece, horizon)
            assert not (union & points), "pieces overlap"
            union |= points
        assert union == interval_point_set(interval, horizon)
    # across all calls over the same grid, pieces are pairwise equal or disjoint
    every = [p for pieces in pieces_of.values() for p in pieces]
    for a in every:
        for b in every:
            if a != b:
                assert not (interval_point_set(a, horizon) & interval_point_set(b, horizon))


@given(st.sets(intervals, min_size=1, max_size=8))
def test_splitting_already_split_intervals_is_the_identity(ivs):
    grid = build_grid(ivs)
    pieces = [p for interval in ivs for p in split_interval(interval, grid)]
    for piece in pieces:
        assert split_interval(piece, grid) == [piece]
