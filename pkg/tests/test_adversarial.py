from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from toric_rg import _purepy
from toric_rg.adversarial import (
    BoundSequences,
    ablation_fails,
    decode_1d,
    decode_1d_mask,
    fails_1d,
    find_ablation_witness,
    fractal_error,
    fractal_paths,
    largest_weight_below,
    radius_1d,
    radius_2d,
    row_syndrome_mask,
    u_seq,
    v_seq,
    verify_bounds,
    verify_fractal,
)
from toric_rg.decoder import decode
from toric_rg.errors import InvalidSyndrome, SearchBudgetExceeded
from toric_rg.lattice import EdgeSet, SyndromeSet, TorusLevel, homology_class, syndrome


def test_sequences():
    assert BoundSequences(12).u == [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64]
    assert v_seq(1) == 1 and v_seq(3) == Fraction(36, 25)
    assert [largest_weight_below(v_seq(k)) for k in range(1, 8)] == [0, 1, 1, 1, 2, 2, 2]
    assert largest_weight_below(Fraction(2)) == 1
    with pytest.raises(ValueError):
        u_seq(0)


def test_fractal_shapes():
    assert fractal_paths(1) == [(0, 1)]
    assert fractal_paths(2) == [(0, 2)]
    assert fractal_paths(3) == [(1, 3)]
    assert fractal_paths(4) == [(3, 2), (6, 2)]
    assert fractal_paths(5) == [(7, 3), (13, 3)]
    assert fractal_error(4).indices().tolist() == [3, 4, 6, 7]


@pytest.mark.parametrize("k", range(1, 11))
def test_fractal_fails_to_a_row(k):
    info = verify_fractal(k)
    assert info["weight"] == u_seq(k)
    assert info["residual_class"] == (1, 0)
    assert info["residual_is_row"]
    assert info["failed"]


def _row_decode_dense(edges, k):
    L = TorusLevel(k)
    e = EdgeSet.from_indices(L, [x for x in range(L.m) if edges >> x & 1])
    return e ^ decode(syndrome(e))


@pytest.mark.parametrize("k", [3, 4])
def test_1d_decoder_matches_full_decoder_on_all_rows(k):
    m = 1 << k
    full = (1 << m) - 1
    for edges in range(1 << m):
        res = _row_decode_dense(edges, k) if edges % 37 == 0 or k == 3 else None
        vertices = row_syndrome_mask(edges, m)
        corr = decode_1d_mask(vertices, k)
        assert row_syndrome_mask(corr, m) == vertices
        r = edges ^ corr
        assert r in (0, full)
        assert fails_1d(edges, k) == (r == full)
        if res is not None:
            assert res.indices().tolist() == [x for x in range(m) if r >> x & 1]
        assert fails_1d(edges, k) == (_purepy.residual_class(m, k, [x for x in range(m) if edges >> x & 1]) == (1, 0))


def test_decode_1d_validation():
    assert decode_1d([0, 1], 1).indices().tolist() == [1]
    with pytest.raises(InvalidSyndrome):
        decode_1d([0], 2)
    with pytest.raises(InvalidSyndrome):
        decode_1d([0, 9], 3)


@pytest.mark.parametrize("k,omega", [(1, 0), (2, 1), (3, 2), (4, 3)])
def test_radius_1d(k, omega):
    r = radius_1d(k)
    assert r.omega == omega and r.certified
    assert r.witness.weight == u_seq(k)
    assert not homology_class(r.witness ^ decode(syndrome(r.witness))).trivial
    assert all(r.failures_by_weight[w] == 0 for w in range(u_seq(k)))


def test_radius_2d_small():
    r1 = radius_2d(1, 8, stop_at_witness=False)
    assert r1.patterns_checked == 256 and r1.omega == 0 and r1.witness.weight == 1
    r2 = radius_2d(2, 2)
    assert r2.omega == 1 and r2.witness.weight == 2
    assert r2.failures_by_weight[1] == 0


def test_sparse_residual_matches_dense():
    rng = np.random.default_rng(0)
    for _ in range(300):
        k = int(rng.integers(1, 5))
        L = TorusLevel(k)
        idx = rng.choice(L.n, size=int(rng.integers(0, 8)), replace=False).tolist()
        e = EdgeSet.from_indices(L, idx)
        assert _purepy.residual_class(L.m, k, idx) == tuple(homology_class(e ^ decode(syndrome(e))))


def test_search_budget_reports_partial():
    with pytest.raises(SearchBudgetExceeded) as info:
        radius_2d(3, 3, budget=1_000)
    rep = info.value.report
    assert rep.lower_bound == 1 and rep.omega is None
    assert rep.patterns_checked == 1 + 128


@pytest.mark.parametrize("k", [2, 3, 4])
def test_ablation_witnesses(k):
    L = TorusLevel(k)
    w2 = find_ablation_witness(k, ("step2",), 1)
    assert w2 is not None and w2.weight == 1
    assert find_ablation_witness(k, ("step1",), 1) is None
    w1 = find_ablation_witness(k, ("step1",), 2)
    assert w1 is not None and w1.weight == 2
    for w, skip in [(w2, ("step2",)), (w1, ("step1",))]:
        residual_ablated = w ^ decode(syndrome(w), skip=skip)
        assert not homology_class(residual_ablated).trivial
        assert homology_class(w ^ decode(syndrome(w))).trivial
    # the full decoder corrects every weight-1 error
    assert not any(ablation_fails(L, c, ()) for c in combinations(range(L.n), 1))


def test_verify_bounds_small():
    rows = verify_bounds(range(1, 6), samples=500, seed=1)
    for r in rows:
        assert not r.falsified
        assert r.witness_weight == r.u_k
        assert r.certified_upper == r.u_k - 1
        assert r.certified_lower <= r.target_lower
    assert [r.target_lower for r in rows] == [0, 1, 1, 1, 2]
    assert rows[4].lower_method == "exhaustive+sampled" and rows[4].samples == 500
    with pytest.raises(ValueError):
        verify_bounds([13])


def test_verify_bounds_deterministic():
    a = verify_bounds([5], samples=200, seed=4)
    b = verify_bounds([5], samples=200, seed=4)
    assert a == b


def test_row_syndrome():
    assert row_syndrome_mask(0b1, 4) == 0b11
    assert row_syndrome_mask(0b1000, 4) == 0b1001
    assert SyndromeSet(TorusLevel(2), [(0, 0), (1, 0)]).ids() == {0, 1}
