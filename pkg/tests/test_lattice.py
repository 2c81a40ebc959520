import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bfs_distance, face_span_basis, gf2_homology, naive_syndrome
from toric_rg.errors import NonCycleInput, NotInSublattice
from toric_rg.lattice import (
    EdgeId,
    EdgeSet,
    HomologyClass,
    SyndromeSet,
    TorusLevel,
    VertexCoord,
    cell_side_indices,
    edge_endpoints,
    edge_from_index,
    edge_index,
    faces,
    full_column,
    full_row,
    homology_class,
    in_sublattice,
    lift_cell_side,
    syndrome,
    torus_distance,
)


def edge_sets(k):
    n = TorusLevel(k).n
    return st.lists(st.integers(0, n - 1), max_size=3 * n // 4).map(lambda idx: EdgeSet.from_indices(TorusLevel(k), idx))


def test_level_sizes():
    L = TorusLevel(3)
    assert (L.m, L.n, L.d) == (8, 128, 8)
    assert [L.spacing(i) for i in range(4)] == [8, 4, 2, 1]
    with pytest.raises(ValueError):
        TorusLevel(0)
    with pytest.raises(ValueError):
        L.spacing(4)


def test_edge_index_layout():
    L = TorusLevel(2)
    assert edge_index(L, EdgeId("H", 1, 2)) == 9
    assert edge_index(L, EdgeId("V", 1, 2)) == 16 + 9
    for i in range(L.n):
        assert edge_index(L, edge_from_index(L, i)) == i
    with pytest.raises(ValueError):
        edge_index(L, EdgeId("H", 4, 0))
    with pytest.raises(ValueError):
        edge_index(L, EdgeId("D", 0, 0))


def test_wraparound_endpoints():
    L = TorusLevel(2)
    assert edge_endpoints(L, edge_index(L, EdgeId("H", 3, 1))) == (7, 4)
    assert edge_endpoints(L, edge_index(L, EdgeId("V", 2, 3))) == (14, 2)


def test_edgeset_algebra():
    L = TorusLevel(2)
    a = EdgeSet.from_indices(L, [1, 2, 2, 5])
    assert a.indices().tolist() == [1, 5]
    b = EdgeSet.from_edges(L, [("H", 1, 0)])
    assert (a ^ b).indices().tolist() == [5]
    assert a ^ a == EdgeSet.empty(L)
    assert hash(a) == hash(EdgeSet.from_indices(L, [5, 1]))
    assert ("H", 1, 0) in a
    with pytest.raises(ValueError):
        a.bits[0] = 1


def test_syndrome_set():
    L = TorusLevel(2)
    s = SyndromeSet(L, [(1, 0), (0, 1)])
    assert s.ids() == {1, 4}
    assert s.sorted() == [VertexCoord(1, 0), VertexCoord(0, 1)]
    assert SyndromeSet.from_array(L, s.to_array()) == s
    with pytest.raises(ValueError):
        SyndromeSet(L, [(4, 0)])


def test_single_edge_syndrome(backend):
    L = TorusLevel(3)
    e = EdgeSet.from_edges(L, [("V", 7, 7)])
    assert syndrome(e) == SyndromeSet(L, [(7, 7), (7, 0)])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(edge_sets))
def test_syndrome_matches_oracle(e):
    assert syndrome(e).ids() == naive_syndrome(e.level.m, e.indices().tolist())


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda k: st.tuples(edge_sets(k), edge_sets(k))))
def test_syndrome_is_linear(pair):
    a, b = pair
    assert syndrome(a ^ b) == syndrome(a) ^ syndrome(b)


def test_faces_are_trivial_cycles(backend):
    L = TorusLevel(2)
    fs = list(faces(L))
    assert len(fs) == 16
    for f in fs:
        assert f.weight == 4
        assert len(syndrome(f)) == 0
        assert homology_class(f) == HomologyClass(0, 0)


def test_row_and_column_classes(backend):
    L = TorusLevel(3)
    assert homology_class(full_row(L, 5)) == (1, 0)
    assert homology_class(full_column(L, 2)) == (0, 1)
    assert homology_class(full_row(L) ^ full_column(L)) == (1, 1)
    assert not homology_class(full_row(L)).trivial


def test_homology_rejects_open_chain():
    L = TorusLevel(2)
    with pytest.raises(NonCycleInput):
        homology_class(EdgeSet.from_indices(L, [0]))


def _random_cycle(rng, k):
    """Random sum of faces plus random row/column windings."""
    L = TorusLevel(k)
    fs = list(faces(L))
    bits = np.zeros(L.n, dtype=np.uint8)
    for j in rng.choice(len(fs), size=rng.integers(0, len(fs)), replace=False):
        bits ^= fs[j].bits
    if rng.integers(2):
        bits ^= full_row(L, int(rng.integers(L.m))).bits
    if rng.integers(2):
        bits ^= full_column(L, int(rng.integers(L.m))).bits
    return EdgeSet(L, bits)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_homology_matches_linear_algebra(k, backend):
    rng = np.random.default_rng(k)
    basis = face_span_basis(1 << k)
    for _ in range(60):
        c = _random_cycle(rng, k)
        assert tuple(homology_class(c)) == gf2_homology(c.level.m, c.indices().tolist(), basis)


def test_homology_invariant_under_faces(backend):
    rng = np.random.default_rng(7)
    L = TorusLevel(3)
    fs = list(faces(L))
    for _ in range(50):
        c = _random_cycle(rng, 3)
        f = fs[int(rng.integers(len(fs)))]
        assert homology_class(c ^ f) == homology_class(c)


def test_in_sublattice():
    L = TorusLevel(3)
    assert in_sublattice(L, (4, 0), 1)
    assert not in_sublattice(L, (2, 0), 1)
    assert in_sublattice(L, (2, 6), 2)
    assert all(in_sublattice(L, (x, y), 3) for x in range(8) for y in range(8))


def test_torus_distance_examples():
    L = TorusLevel(3)
    assert torus_distance(L, (0, 0), (3, 1), 3) == 4
    assert torus_distance(L, (0, 0), (7, 7), 3) == 2
    assert torus_distance(L, (0, 0), (4, 4), 1) == 2
    assert torus_distance(L, (0, 0), (6, 2), 2) == 2
    with pytest.raises(NotInSublattice):
        torus_distance(L, (0, 0), (1, 0), 2)


@pytest.mark.parametrize("k,i", [(3, 3), (3, 2), (4, 3), (4, 1)])
def test_torus_distance_matches_bfs(k, i):
    L = TorusLevel(k)
    g = L.spacing(i)
    pts = [(x, y) for x in range(0, L.m, g) for y in range(0, L.m, g)]
    a = pts[len(pts) // 3]
    for b in pts:
        assert torus_distance(L, a, b, i) == bfs_distance(L.m, g, a[1] * L.m + a[0], b[1] * L.m + b[0])


def test_cell_sides():
    L = TorusLevel(3)
    assert cell_side_indices(L, (6, 6), "t", 2) == [6 * 8 + 6, 6 * 8 + 7]
    assert cell_side_indices(L, (6, 6), "b", 2) == [6, 7]
    assert cell_side_indices(L, (6, 6), "r", 2) == [64 + 6 * 8 + 0, 64 + 7 * 8 + 0]
    side = lift_cell_side(L, (0, 0), "l", 4)
    assert side.weight == 4
    assert syndrome(side) == SyndromeSet(L, [(0, 0), (0, 4)])
    with pytest.raises(ValueError):
        cell_side_indices(L, (0, 0), "x", 1)
