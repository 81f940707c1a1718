import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipartite_qst import walk
from bipartite_qst.errors import OutOfRange, SpecMismatch
from bipartite_qst.graph import BipartiteSpec, arc_index, arcs, neighbors
from bipartite_qst.schedule import AngleSchedule, Stage, min_steps, Parity, stage1_schedule
from bipartite_qst.subspace import lift, project, reduced_step_matrix, stage1_basis
from bipartite_qst.walk import StateVector


def random_state(spec, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=spec.num_arcs) + 1j * rng.normal(size=spec.num_arcs)
    return StateVector.normalized(spec, x)


def test_initial_state_single_edge():
    s = walk.initial_state(BipartiteSpec(1, 1), 0)
    assert s.amplitudes[arc_index(s.spec, 0, 1)] == 1


def test_initial_state_fig2_sender():
    spec = BipartiteSpec(4, 3)
    a = walk.initial_state(spec, 0).amplitudes
    for v in (4, 5, 6):
        assert a[arc_index(spec, 0, v)] == pytest.approx(1 / math.sqrt(3))
    assert np.count_nonzero(a) == 3


def test_target_state_fig2_receiver():
    spec = BipartiteSpec(4, 3)
    a = walk.target_state(spec, 4).amplitudes
    for u in range(4):
        assert a[arc_index(spec, 4, u)] == pytest.approx(0.5)
    assert np.count_nonzero(a) == 4


def test_target_overlaps():
    spec = BipartiteSpec(4, 3)
    s0 = walk.initial_state(spec, 0)
    assert s0.inner(walk.target_state(spec, 0)) == pytest.approx(1)
    assert s0.inner(walk.target_state(spec, 1)) == 0
    # outgoing arcs of vertices on opposite sides never coincide
    assert s0.inner(walk.target_state(spec, 4)) == 0


def test_shift_involution_and_image():
    spec = BipartiteSpec(4, 3)
    psi = random_state(spec)
    assert np.abs(walk.apply_shift(walk.apply_shift(psi)).amplitudes - psi.amplitudes).max() < 1e-15
    out = walk.apply_shift(walk.initial_state(spec, 0)).amplitudes
    for v in (4, 5, 6):
        assert out[arc_index(spec, v, 0)] == pytest.approx(1 / math.sqrt(3))


def test_grover_coin_degree_two_is_swap():
    spec = BipartiteSpec(2, 2)
    for i, (u, v) in enumerate(arcs(spec)):
        other = next(w for w in neighbors(spec, u) if w != v)
        e = np.zeros(spec.num_arcs, complex)
        e[i] = 1
        out = walk.apply_coin(StateVector(spec, e), math.pi).amplitudes
        want = np.zeros(spec.num_arcs)
        want[arc_index(spec, u, other)] = 1
        assert np.abs(out - want).max() < 1e-15


def test_coin_alpha_zero_is_minus_identity():
    psi = random_state(BipartiteSpec(3, 4))
    out = walk.apply_coin(psi, 0.0).amplitudes
    assert np.abs(out + psi.amplitudes).max() < 1e-15


@pytest.mark.parametrize("alpha", [0.3, 1.7, math.pi, -2.2])
def test_uniform_block_eigenvector(alpha):
    spec = BipartiteSpec(3, 4)
    s = walk.initial_state(spec, 1)
    out = walk.apply_coin(s, alpha).amplitudes
    assert np.abs(out + np.exp(-1j * alpha) * s.amplitudes).max() < 1e-14


def test_oracle_identities():
    spec = BipartiteSpec(3, 2)
    psi = random_state(spec)
    assert np.array_equal(walk.apply_oracle(psi, 0.0, 1).amplitudes, psi.amplitudes)
    out = walk.apply_oracle(psi, math.pi, 1).amplitudes
    marked = [arc_index(spec, 1, v) for v in (3, 4)]
    for i in range(spec.num_arcs):
        want = -psi.amplitudes[i] if i in marked else psi.amplitudes[i]
        assert out[i] == pytest.approx(want, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.floats(-10, 10), st.floats(-10, 10), st.integers(0, 10))
def test_step_preserves_norm(m, n, alpha, beta, seed):
    spec = BipartiteSpec(m, n)
    psi = random_state(spec, seed)
    marked = seed % spec.num_vertices
    for out in (walk.apply_coin(psi, alpha), walk.apply_oracle(psi, beta, marked),
                walk.step(psi, alpha, beta, marked)):
        assert abs(out.norm() - 1) < 1e-12


def test_grover_step_matches_dense_textbook():
    spec = BipartiteSpec(3, 2)
    N = spec.num_arcs
    S = np.zeros((N, N))
    C = np.zeros((N, N))
    Q = np.eye(N)
    for i, (u, v) in enumerate(arcs(spec)):
        S[arc_index(spec, v, u), i] = 1
        d = 2 if u < 3 else 3
        for w in (range(3, 5) if u < 3 else range(3)):
            C[arc_index(spec, u, w), i] = 2 / d
        C[i, i] -= 1
        if u == 0:
            Q[i, i] = -1
    psi = random_state(spec, 4)
    dense = S @ C @ Q @ psi.amplitudes
    assert np.abs(walk.step(psi, math.pi, math.pi, 0).amplitudes - dense).max() < 1e-14


def test_step_matches_reduced_step():
    spec = BipartiteSpec(5, 3)
    basis = stage1_basis(spec, 0)
    psi = lift(np.array([0.3, 0.5j, -0.4, 0.2]) / np.linalg.norm([0.3, 0.5, 0.4, 0.2]), basis)
    full = walk.step(psi, 1.1, -0.7, 0)
    red = lift(reduced_step_matrix(basis, 1.1, -0.7, Stage.STAGE1) @ project(psi, basis), basis)
    assert np.abs(full.amplitudes - red.amplitudes).max() < 1e-10


def test_long_run_drift():
    spec = BipartiteSpec(4, 5)
    rng = np.random.default_rng(7)
    x = random_state(spec).amplitudes[None, :]
    for a, b in rng.uniform(-math.pi, math.pi, size=(1000, 2)):
        x = walk.step_array(spec, x, a, b, 2)
    assert abs(np.linalg.norm(x) - 1) < 1e-9


def test_stage1_reaches_target():
    spec = BipartiteSpec(25, 10)
    h = min_steps(0.01, 25, Parity.ODD)
    psi = walk.evolve(walk.initial_state(spec, 0), stage1_schedule(h, 0.01), 0)
    assert walk.fidelity(walk.opposite_side_state(spec, 0), psi) >= 0.99


def test_free_angle_leaves_F1_alone():
    spec = BipartiteSpec(6, 4)
    target = walk.opposite_side_state(spec, 0)
    a = walk.evolve(walk.initial_state(spec, 0), stage1_schedule(9, 0.05), 0)
    b = walk.evolve(walk.initial_state(spec, 0), stage1_schedule(9, 0.05, 0.8), 0)
    assert np.abs(a.amplitudes - b.amplitudes).max() > 1e-3
    assert abs(walk.fidelity(target, a) - walk.fidelity(target, b)) < 1e-9


def test_fidelity_basics():
    spec = BipartiteSpec(3, 3)
    psi = random_state(spec)
    assert walk.fidelity(psi, psi) == pytest.approx(1)
    assert walk.fidelity(psi, psi.with_amplitudes(np.exp(0.7j) * psi.amplitudes)) == pytest.approx(1)
    assert walk.fidelity(walk.initial_state(spec, 0), walk.initial_state(spec, 1)) == 0


def test_state_validation():
    spec = BipartiteSpec(2, 2)
    with pytest.raises(SpecMismatch):
        StateVector(spec, np.ones(7) / math.sqrt(7))
    with pytest.raises(ValueError):
        StateVector(spec, np.ones(8))
    with pytest.raises(OutOfRange):
        walk.initial_state(spec, 4)
    with pytest.raises(SpecMismatch):
        walk.fidelity(walk.initial_state(spec, 0), walk.initial_state(BipartiteSpec(2, 3), 0))


def test_state_is_immutable():
    s = walk.initial_state(BipartiteSpec(2, 2), 0)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2


def test_dump_load_round_trip():
    spec = BipartiteSpec(3, 2)
    psi = random_state(spec, 3)
    buf = io.StringIO()
    walk.dump_state(psi, buf)
    buf.seek(0)
    back = walk.load_state(spec, buf)
    assert np.array_equal(back.amplitudes, psi.amplitudes)
