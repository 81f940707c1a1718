import math

import numpy as np
import pytest

from bipartite_qst import walk
from bipartite_qst.errors import DegenerateSize, DimensionMismatch, UnsupportedBasis
from bipartite_qst.graph import BipartiteSpec, arc_index
from bipartite_qst.schedule import AngleSchedule, Stage, stage1_schedule, stage2_diff_schedule
from bipartite_qst.subspace import (LEAKAGE_TOL, SHIFT_4, ReducedOp, combined_diff_basis,
                                    combined_same_basis, compressed_operators, leakage, lift,
                                    mixer_A, omega_for, project, reduced_evolve, reduced_operator,
                                    rotation_R, stage1_basis, stage2_diff_basis, stage2_same_basis,
                                    verify_decompositions)


def compress(basis, fn):
    v = basis.vectors
    return v.conj() @ fn(v).T


def test_stage1_basis_small():
    spec = BipartiteSpec(2, 2)
    b = stage1_basis(spec, 0)
    e1 = b.vectors[0]
    for v in (2, 3):
        assert e1[arc_index(spec, 0, v)] == pytest.approx(1 / math.sqrt(2))
    assert b.gram_residual() < 1e-14
    assert np.allclose(e1, walk.initial_state(spec, 0).amplitudes)


def test_stage2_bases_small():
    spec = BipartiteSpec(2, 2)
    e1 = stage2_same_basis(spec, 1).vectors[0]
    assert set(np.flatnonzero(e1)) == {arc_index(spec, 1, 2), arc_index(spec, 1, 3)}
    e1 = stage2_diff_basis(spec, 2).vectors[0]
    for u in (0, 1):
        assert e1[arc_index(spec, 2, u)] == pytest.approx(1 / math.sqrt(2))


@pytest.mark.parametrize("m,n", [(2, 2), (3, 5), (6, 4), (8, 8)])
def test_stage_bases_closed(m, n):
    spec = BipartiteSpec(m, n)
    for basis, marked in ((stage1_basis(spec, 0), 0), (stage2_same_basis(spec, 1), 1),
                          (stage2_diff_basis(spec, m), m)):
        assert basis.gram_residual() < 1e-12
        for k in range(4):
            out = walk.step(lift(np.eye(4)[k], basis), 0.9, -1.3, marked)
            assert leakage(out, basis) < 1e-12


def test_degenerate_sizes():
    with pytest.raises(DegenerateSize):
        stage1_basis(BipartiteSpec(1, 3), 0)
    with pytest.raises(DegenerateSize):
        stage2_diff_basis(BipartiteSpec(3, 1), 3)
    with pytest.raises(DegenerateSize):
        combined_same_basis(BipartiteSpec(2, 3), 0, 1)
    with pytest.raises(DegenerateSize):
        combined_diff_basis(BipartiteSpec(1, 3), 0, 1)


def test_combined_same_basis():
    spec = BipartiteSpec(3, 2)
    b = combined_same_basis(spec, 0, 1)
    assert b.dim == 6 and b.gram_residual() < 1e-14
    assert np.allclose(b.vectors[2], walk.target_state(spec, 1).amplitudes)
    c = project(walk.opposite_side_state(spec, 0), b)
    want = np.array([0, 1, 0, 1, 0, 1]) / math.sqrt(3)
    assert np.allclose(c, want)


def test_combined_diff_basis_spans_everything_at_2x2():
    spec = BipartiteSpec(2, 2)
    b = combined_diff_basis(spec, 0, 2)
    assert b.dim == 8 and b.gram_residual() < 1e-14
    assert np.linalg.matrix_rank(b.vectors) == 8


def test_combined_diff_target_coords():
    spec = BipartiteSpec(4, 3)
    b = combined_diff_basis(spec, 0, 4)
    c = project(walk.target_state(spec, 4), b)
    want = np.zeros(8)
    want[1], want[5] = 1 / 2, math.sqrt(3) / 2
    assert np.allclose(c, want)


@pytest.mark.parametrize("m,n", [(3, 2), (5, 4), (4, 7)])
def test_combined_closure(m, n):
    spec = BipartiteSpec(m, n)
    for b in (combined_same_basis(spec, 0, 1), combined_diff_basis(spec, 0, m)):
        for k in range(b.dim):
            for marked in (b.sender, b.receiver):
                out = walk.step(lift(np.eye(b.dim)[k], b), 0.4, 2.1, marked)
                assert leakage(out, b) < LEAKAGE_TOL


@pytest.mark.parametrize("m", [2, 3, 7])
def test_closed_forms_match_compression(m):
    spec = BipartiteSpec(m, 3)
    b = stage1_basis(spec, 0)
    assert np.array_equal(reduced_operator(ReducedOp.SHIFT, b), SHIFT_4)
    assert np.abs(compress(b, lambda x: walk.shift_array(spec, x)) - SHIFT_4).max() < 1e-12
    for a in (0.0, 0.8, math.pi):
        full = compress(b, lambda x: walk.coin_array(spec, x, a))
        assert np.abs(reduced_operator("coin", b, a) - full).max() < 1e-12
    full = compress(b, lambda x: walk.oracle_array(spec, x, 1.2, 0))
    assert np.abs(reduced_operator("oracle", b, 1.2) - full).max() < 1e-12
    assert np.array_equal(reduced_operator("oracle", b, 0.0), np.eye(4))


def test_omega_at_two():
    w = omega_for(2)
    assert math.cos(w) == pytest.approx(0, abs=1e-15) and math.sin(w) == pytest.approx(1)


def test_combined_has_no_closed_form():
    with pytest.raises(UnsupportedBasis):
        reduced_operator("shift", combined_diff_basis(BipartiteSpec(3, 3), 0, 3))


def test_R_and_A():
    assert np.allclose(rotation_R(0.0), -np.eye(4))
    assert np.allclose(mixer_A(1.3, 0.0), np.eye(4))
    a = mixer_A(0.7, omega_for(5))
    assert np.abs(a @ a.conj().T - np.eye(4)).max() < 1e-14


@pytest.mark.parametrize("alpha,beta,m", [(math.pi, math.pi, 4), (0.0, 0.3, 3), (1.9, -2.5, 11)])
def test_decompositions(alpha, beta, m):
    rep = verify_decompositions(alpha, beta, omega_for(m), rng=np.random.default_rng(m))
    assert rep.passed


def test_reduced_evolve_matches_full():
    spec = BipartiteSpec(6, 5)
    b = stage1_basis(spec, 0)
    sched = stage1_schedule(7, 0.04)
    psi = walk.initial_state(spec, 0)
    red = lift(reduced_evolve(project(psi, b), sched, b), b)
    full = walk.evolve(psi, sched, 0)
    assert np.abs(red.amplitudes - full.amplitudes).max() < 1e-10
    assert abs(red.norm() - 1) < 1e-10


def test_reduced_single_trivial_step():
    b = stage2_diff_basis(BipartiteSpec(3, 4), 3)
    sched = AngleSchedule(2, (0.0, 0.0), (0.0, 0.0), Stage.STAGE2_DIFF, 1.0)
    c = np.array([0.6, 0.8j, 0, 0])
    # alpha = 0 makes the coin -I and beta = 0 makes the oracle I
    assert np.allclose(reduced_evolve(c, sched, b), c)
    one = reduced_operator("shift", b) @ -np.eye(4) @ reduced_operator("oracle", b, 0.0)
    assert np.allclose(one, -SHIFT_4)


def test_reduced_evolve_shape_check():
    b = stage1_basis(BipartiteSpec(3, 3), 0)
    with pytest.raises(DimensionMismatch):
        reduced_evolve(np.ones(6) / math.sqrt(6), stage1_schedule(3, 0.5), b)


def test_project_lift_round_trip():
    spec = BipartiteSpec(4, 4)
    b = combined_same_basis(spec, 0, 2)
    rng = np.random.default_rng(0)
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    c /= np.linalg.norm(c)
    assert np.abs(project(lift(c, b), b) - c).max() < 1e-12
    psi = lift(c, b)
    assert np.abs(lift(project(psi, b), b).amplitudes - psi.amplitudes).max() < 1e-12
    assert np.allclose(project(lift(np.eye(6)[1], b), b), np.eye(6)[1])


def test_leakage_of_outside_state():
    spec = BipartiteSpec(3, 3)
    b = stage1_basis(spec, 0)
    # one arc 1 -> 3 overlaps only e4, which spreads over n(m-1) = 6 arcs
    e = np.zeros(spec.num_arcs)
    e[arc_index(spec, 1, 3)] = 1
    assert leakage(walk.StateVector(spec, e), b) == pytest.approx(5 / 6)
    assert leakage(walk.initial_state(spec, 0), b) == pytest.approx(0, abs=1e-15)


def test_compressed_cache_reused():
    b = combined_diff_basis(BipartiteSpec(3, 3), 0, 3)
    assert compressed_operators(b) is compressed_operators(b)


def test_diff_basis_uses_receiver_side_omega():
    # the stage-2 coin mixes with cos(w) = 1 - 2/n where n is the receiver's partition
    spec = BipartiteSpec(3, 6)
    b = stage2_diff_basis(spec, 3)
    full = compress(b, lambda x: walk.coin_array(spec, x, 1.0))
    assert np.abs(reduced_operator("coin", b, 1.0) - full).max() < 1e-12
    assert b.pivot_side == 6
