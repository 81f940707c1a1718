"""Property suites run by ``qst verify``.

Each suite returns a :class:`SuiteResult` carrying its worst residual so a
failing run shows how far off it was, not just that it failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import subspace as ss
from . import walk
from .graph import BipartiteSpec, arcs
from .schedule import (AngleSchedule, Pairing, Parity, Stage, chebyshev, gamma,
                       lemma_phase_deltas, min_steps, predicted_stage_fidelity, quasi_chebyshev,
                       stage1_schedule, stage2_diff_schedule, stage2_same_schedule)
from .sweep import SweepSpec, run_sweep
from .transfer import (Backend, Case, TransferConfig, fidelity_lower_bound, run_transfer,
                       stage1_overlap_diagnostics)

OP_TOL = 1e-12
DRIFT_TOL = 1e-9
CLOSED_FORM_TOL = 1e-9
BACKEND_TOL = 1e-10


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    max_residual: float
    detail: str = ""


def _random_states(rng, spec: BipartiteSpec, count: int) -> np.ndarray:
    x = rng.normal(size=(count, spec.num_arcs)) + 1j * rng.normal(size=(count, spec.num_arcs))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def suite_unitarity(samples: int = 100, seed: int = 1) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m, n in [(1, 1), (2, 3), (4, 3), (6, 5)]:
        spec = BipartiteSpec(m, n)
        xs = _random_states(rng, spec, samples)
        ys = _random_states(rng, spec, samples)
        marked = int(rng.integers(m + n))
        for x, y in zip(xs, ys):
            a, b = rng.uniform(-2 * math.pi, 2 * math.pi, size=2)
            worst = max(worst, np.abs(walk.shift_array(spec, walk.shift_array(spec, x)) - x).max())
            qq = walk.oracle_array(spec, walk.oracle_array(spec, x, b, marked), -b, marked)
            worst = max(worst, np.abs(qq - x).max())
            cx, cy = walk.coin_array(spec, x, a), walk.coin_array(spec, y, a)
            worst = max(worst, abs(np.vdot(cx, cy) - np.vdot(x, y)), abs(np.linalg.norm(cx) - 1.0))
    spec = BipartiteSpec(5, 4)
    x = _random_states(rng, spec, 1)[0]
    angles = rng.uniform(-math.pi, math.pi, size=(1000, 2))
    out = walk.evolve_array(spec, x, [tuple(a) for a in angles], 2)
    drift = abs(np.linalg.norm(out) - 1.0)
    ok = worst < OP_TOL and drift < DRIFT_TOL
    return SuiteResult("unitarity", ok, float(max(worst, drift)),
                       f"op residual {worst:.2e}, 1000-step drift {drift:.2e}")


def suite_grover_specialisation() -> SuiteResult:
    spec = BipartiteSpec(4, 3)
    eye = np.eye(spec.num_arcs, dtype=complex)
    coin = walk.coin_array(spec, eye, math.pi).T
    oracle = walk.oracle_array(spec, eye, math.pi, 5).T
    expected_coin = np.zeros_like(coin)
    for u in range(spec.num_vertices):
        idx = [i for i, (a, _) in enumerate(_arc_list(spec)) if a == u]
        d = len(idx)
        expected_coin[np.ix_(idx, idx)] = 2.0 / d - np.eye(d)
    expected_oracle = np.diag([(-1.0 if a == 5 else 1.0) for a, _ in _arc_list(spec)]).astype(complex)
    worst = max(np.abs(coin - expected_coin).max(), np.abs(oracle - expected_oracle).max())
    return SuiteResult("grover_specialisation", worst < OP_TOL, float(worst))


def _arc_list(spec):
    return list(arcs(spec))


def _all_bases(spec: BipartiteSpec):
    m, n = spec.m, spec.n
    out = []
    if m >= 2:
        out.append(ss.stage1_basis(spec, 0))
        out.append(ss.stage2_same_basis(spec, 1))
    if n >= 2:
        out.append(ss.stage2_diff_basis(spec, m))
    if m >= 3:
        out.append(ss.combined_same_basis(spec, 0, 1))
    if m >= 2 and n >= 2:
        out.append(ss.combined_diff_basis(spec, 0, m))
    return out


def suite_bases(max_size: int = 5) -> SuiteResult:
    worst = 0.0
    count = 0
    for m in range(2, max_size + 1):
        for n in range(1, max_size + 1):
            for basis in _all_bases(BipartiteSpec(m, n)):
                worst = max(worst, basis.gram_residual(), ss.compressed_operators(basis).leakage)
                count += 1
    return SuiteResult("bases_orthonormal_invariant", worst < BACKEND_TOL, worst, f"{count} bases")


def suite_reduced_matrices(seed: int = 2) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m, n in [(2, 2), (3, 5), (7, 4)]:
        spec = BipartiteSpec(m, n)
        for basis in [ss.stage1_basis(spec, 0), ss.stage2_same_basis(spec, 1), ss.stage2_diff_basis(spec, m)]:
            ops = ss.compressed_operators(basis)
            marked = basis.marked_for(Stage.STAGE1)
            for _ in range(10):
                a, b = rng.uniform(-math.pi, math.pi, size=2)
                coin = (1 - np.exp(-1j * a)) * ops.block_projector - np.eye(4)
                oracle = np.eye(4) + (np.exp(1j * b) - 1) * ops.marked_projectors[marked]
                worst = max(worst,
                            np.abs(ss.reduced_operator("shift", basis) - ops.shift).max(),
                            np.abs(ss.reduced_operator("coin", basis, a) - coin).max(),
                            np.abs(ss.reduced_operator("oracle", basis, b) - oracle).max())
    return SuiteResult("reduced_matrices", worst < OP_TOL, float(worst))


def suite_decompositions(draws: int = 100, seed: int = 3) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        a, b = rng.uniform(-2 * math.pi, 2 * math.pi, size=2)
        omega = ss.omega_for(int(rng.integers(2, 200)))
        rep = ss.verify_decompositions(a, b, omega, samples=1, rng=rng)
        worst = max(worst, rep.max_residual)
    return SuiteResult("decomposition_identities", worst < OP_TOL, worst, f"{draws} draws")


def suite_quasi_chebyshev() -> SuiteResult:
    worst = 0.0
    for h in (3, 5, 7, 9):
        for eps in (1.0, 0.25, 0.04):
            g = gamma(h, eps)
            worst = max(worst, abs(chebyshev(h, 1 / g) - 1 / math.sqrt(eps)))
            deltas = lemma_phase_deltas(h, eps)
            for x in np.linspace(0.0, 1.0, 20):
                ratio = chebyshev(h, x / g) / chebyshev(h, 1 / g)
                worst = max(worst, abs(abs(quasi_chebyshev(x, deltas)) - abs(ratio)))
    return SuiteResult("quasi_chebyshev_oracle", worst < CLOSED_FORM_TOL, worst)


def stage1_fidelity(m: int, n: int, schedule: AngleSchedule) -> float:
    spec = BipartiteSpec(m, n)
    psi = walk.evolve(walk.initial_state(spec, 0), schedule, 0)
    return walk.fidelity(walk.opposite_side_state(spec, 0), psi)


def stage2_fidelity(m: int, n: int, receiver: int, schedule: AngleSchedule) -> float:
    spec = BipartiteSpec(m, n)
    psi = walk.evolve(walk.opposite_side_state(spec, 0), schedule, receiver)
    return walk.fidelity(walk.target_state(spec, receiver), psi)


def suite_stage1(schedule_fn: Callable[[int, float], AngleSchedule] = stage1_schedule) -> SuiteResult:
    worst = 0.0
    ok = True
    for eps in (0.25, 0.04, 0.01):
        for m in (3, 10, 100):
            h = min_steps(eps, m, Parity.ODD)
            F1 = stage1_fidelity(m, 4, schedule_fn(h, eps))
            err = abs(F1 - predicted_stage_fidelity(h, eps, m, Stage.STAGE1))
            worst = max(worst, err)
            ok &= F1 >= 1 - eps and err <= CLOSED_FORM_TOL
    return SuiteResult("stage1_closed_form", ok, worst)


def suite_stage2() -> SuiteResult:
    worst = 0.0
    ok = True
    box_fails = 0
    for eps in (0.25, 0.04, 0.01):
        for d in (3, 10, 100):
            h = min_steps(eps, d, Parity.ODD)
            F2 = stage2_fidelity(d, 4, 1, stage2_same_schedule(h, eps))
            err = abs(F2 - predicted_stage_fidelity(h, eps, d, Stage.STAGE2_SAME))
            worst = max(worst, err)
            ok &= F2 >= 1 - eps and err <= CLOSED_FORM_TOL

            h = min_steps(eps, d, Parity.EVEN)
            F2 = stage2_fidelity(4, d, 4, stage2_diff_schedule(h, eps, Pairing.THEOREM_PROOF))
            err = abs(F2 - predicted_stage_fidelity(h, eps, d, Stage.STAGE2_DIFF))
            worst = max(worst, err)
            ok &= F2 >= 1 - eps and err <= CLOSED_FORM_TOL
            if stage2_fidelity(4, d, 4, stage2_diff_schedule(h, eps, Pairing.ALGORITHM_BOX)) < 1 - eps:
                box_fails += 1
    return SuiteResult("stage2_closed_form", ok, worst,
                       f"theorem pairing validated; box pairing below 1-eps2 in {box_fails}/9 cases")


def suite_backend_equivalence(max_size: int = 5, eps: float = 0.04) -> SuiteResult:
    worst = 0.0
    for m in range(2, max_size + 1):
        for n in range(2, max_size + 1):
            for receiver in (1, m):
                rep = run_transfer(TransferConfig(m, n, 0, receiver, eps, eps, Backend.BOTH))
                worst = max(worst, rep.backend_disagreement)
    return SuiteResult("backend_equivalence", worst <= BACKEND_TOL, worst, f"2 <= m,n <= {max_size}")


def suite_bounds(m_hi: int = 12, n_hi: int = 12, eps: float = 0.01, workers: int = 1) -> SuiteResult:
    worst_margin = math.inf
    ok = True
    notes = []
    for case, m_lo, n_lo in ((Case.SAME, 3, 1), (Case.DIFF, 2, 2)):
        rows = run_sweep(SweepSpec((m_lo, m_hi), (n_lo, n_hi), eps, eps, case), workers)
        bound = fidelity_lower_bound(case, eps, eps)
        fs = [F for _, _, F in rows]
        worst_margin = min(worst_margin, min(fs) - bound)
        ok &= all(F > bound - 1e-12 for F in fs) and max(fs) >= 0.98
        notes.append(f"{case.value}: min F {min(fs):.4f} > {bound:.4f}, max F {max(fs):.4f}")
    return SuiteResult("fidelity_bounds", ok, max(0.0, -worst_margin), "; ".join(notes))


def suite_diagnostics() -> SuiteResult:
    worst = 0.0
    ok = True
    for eps in (0.25, 0.01):
        for m in range(3, 21):
            h = min_steps(eps, m, Parity.ODD)
            _, t2 = stage1_overlap_diagnostics(BipartiteSpec(m, 3), eps, h)
            t2sq = abs(t2) ** 2
            ok &= t2sq <= 2 * eps + 1e-9
            b = quasi_chebyshev(math.sqrt(1 - 1 / m), lemma_phase_deltas(h, eps))
            worst = max(worst, abs(t2sq - m / (m - 1) * abs(b) ** 2))
    ok &= worst <= CLOSED_FORM_TOL
    return SuiteResult("t2_diagnostic", ok, worst)


def run_verification(level: str = "fast", workers: int = 1) -> list[SuiteResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    full = level == "full"
    return [
        suite_unitarity(100 if full else 25),
        suite_grover_specialisation(),
        suite_bases(8 if full else 5),
        suite_reduced_matrices(),
        suite_decompositions(100),
        suite_quasi_chebyshev(),
        suite_stage1(),
        suite_stage2(),
        suite_backend_equivalence(8 if full else 5),
        suite_bounds(40, 40, workers=workers) if full else suite_bounds(),
        suite_diagnostics(),
    ]


def format_table(results: list[SuiteResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'suite':<{width}}  status  max_residual  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.max_residual:<12.3e}  {r.detail}")
    return "\n".join(lines)
