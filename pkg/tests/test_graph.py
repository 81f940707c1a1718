import pytest
from hypothesis import given, strategies as st

from bipartite_qst.errors import NonAdjacent, OutOfRange
from bipartite_qst.graph import BipartiteSpec, arc_index, arc_pair, arcs, degree, neighbors


def test_arc_index_in_range():
    spec = BipartiteSpec(2, 2)
    assert 0 <= arc_index(spec, 0, 2) < 8


def test_arc_index_same_partition_rejected():
    with pytest.raises(NonAdjacent):
        arc_index(BipartiteSpec(2, 2), 0, 1)


def test_arc_index_out_of_range_rejected():
    with pytest.raises(NonAdjacent):
        arc_index(BipartiteSpec(2, 2), 0, 9)


def test_all_arcs_distinct_m3_n2():
    spec = BipartiteSpec(3, 2)
    idx = []
    for u in range(3):
        for v in (3, 4):
            idx += [arc_index(spec, u, v), arc_index(spec, v, u)]
    assert sorted(idx) == list(range(12))


@pytest.mark.parametrize("m,n,u,d", [(4, 3, 0, 3), (4, 3, 4, 4), (1, 1, 0, 1)])
def test_degree(m, n, u, d):
    assert degree(BipartiteSpec(m, n), u) == d


@pytest.mark.parametrize("m,n,u,expect", [(2, 2, 0, [2, 3]), (2, 2, 3, [0, 1]), (3, 1, 3, [0, 1, 2])])
def test_neighbors(m, n, u, expect):
    assert list(neighbors(BipartiteSpec(m, n), u)) == expect


@pytest.mark.parametrize("m,n", [(0, 3), (3, 0), (-1, 2)])
def test_bad_sizes(m, n):
    with pytest.raises(ValueError):
        BipartiteSpec(m, n)


def test_arc_pair_out_of_range():
    with pytest.raises(OutOfRange):
        arc_pair(BipartiteSpec(2, 3), 12)


@given(st.integers(1, 9), st.integers(1, 9))
def test_arc_round_trip(m, n):
    spec = BipartiteSpec(m, n)
    seen = set()
    for i, (u, v) in enumerate(arcs(spec)):
        assert arc_index(spec, u, v) == i
        assert arc_pair(spec, i) == (u, v)
        assert not spec.same_side(u, v)
        seen.add(i)
    assert seen == set(range(spec.num_arcs)) and spec.num_arcs == 2 * m * n
