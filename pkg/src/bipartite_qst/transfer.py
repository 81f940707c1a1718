"""Two-stage state transfer on K_{m,n}: orchestration, fidelities and bounds.

Stage 1 marks the sender and drives the walker from the sender's arcs to the
uniform superposition over the opposite partition's arcs.  Stage 2 marks the
receiver and drives that superposition onto the receiver's arcs.  The state
is carried between stages without renormalisation.

Step counts use the size of the sender's partition for stage 1 (and for
stage 2 when both ends share a partition) and the receiver's partition size
for stage 2 otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import subspace as ss
from . import walk
from .errors import BadParity, DegenerateSize, InvalidConfig, InvalidEpsilon, OutOfRange
from .graph import BipartiteSpec
from .schedule import (AngleSchedule, Pairing, Parity, min_steps, stage1_schedule,
                       stage2_diff_schedule, stage2_same_schedule)

BOUND_SLACK = 1e-12
BACKEND_TOL = 1e-10

CSV_HEADER = "case,m,n,sender,receiver,eps1,eps2,h1,h2,F1,F2,F,bound,pass,backend_disagreement"


class Case(str, enum.Enum):
    SAME = "same"
    DIFF = "diff"


class Backend(str, enum.Enum):
    FULL = "full"
    SUBSPACE = "subspace"
    BOTH = "both"


def _check_eps(name: str, eps: float) -> float:
    eps = float(eps)
    if not (0.0 < eps <= 1.0):
        raise InvalidEpsilon(f"{name} must lie in (0, 1], got {eps!r}")
    return eps


@dataclass(frozen=True)
class TransferConfig:
    m: int
    n: int
    sender: int
    receiver: int
    eps1: float
    eps2: float
    backend: Backend = Backend.FULL
    pairing: Pairing = Pairing.THEOREM_PROOF
    free_angle_default: float = 0.0
    h1_override: int | None = None
    h2_override: int | None = None

    def __post_init__(self):
        spec = BipartiteSpec(self.m, self.n)
        spec.check_vertex(self.sender)
        spec.check_vertex(self.receiver)
        if self.sender == self.receiver:
            raise InvalidConfig("sender and receiver must be different vertices")
        object.__setattr__(self, "eps1", _check_eps("eps1", self.eps1))
        object.__setattr__(self, "eps2", _check_eps("eps2", self.eps2))
        object.__setattr__(self, "backend", Backend(self.backend))
        object.__setattr__(self, "pairing", Pairing(self.pairing))
        if not math.isfinite(self.free_angle_default):
            raise InvalidConfig("free angle must be finite")
        same = spec.same_side(self.sender, self.receiver)
        for name, val, odd in (("h1", self.h1_override, True), ("h2", self.h2_override, same)):
            if val is None:
                continue
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise OutOfRange(f"{name} override must be a positive integer, got {val!r}")
            if (val % 2 == 1) != odd:
                raise BadParity(f"{name} override must be {'odd' if odd else 'even'}, got {val}")

    @property
    def spec(self) -> BipartiteSpec:
        return BipartiteSpec(self.m, self.n)

    @property
    def sender_side(self) -> int:
        return self.m if self.spec.is_left(self.sender) else self.n

    @property
    def receiver_side(self) -> int:
        return self.m if self.spec.is_left(self.receiver) else self.n


@dataclass(frozen=True)
class FidelityReport:
    case: Case
    m: int
    n: int
    sender: int
    receiver: int
    eps1: float
    eps2: float
    h1: int
    h2: int
    F1: float
    F2: float
    F: float
    bound: float
    bound_satisfied: bool
    t2_norm_sq: float
    backend_disagreement: float = math.nan

    def csv_row(self) -> str:
        def g(x):
            return f"{x:.17g}"

        return ",".join([
            self.case.value, str(self.m), str(self.n), str(self.sender), str(self.receiver),
            g(self.eps1), g(self.eps2), str(self.h1), str(self.h2),
            g(self.F1), g(self.F2), g(self.F), g(self.bound),
            "true" if self.bound_satisfied else "false", g(self.backend_disagreement),
        ])


def classify_case(config: TransferConfig) -> Case:
    if config.sender == config.receiver:
        raise InvalidConfig("sender and receiver must be different vertices")
    return Case.SAME if config.spec.same_side(config.sender, config.receiver) else Case.DIFF


def fidelity_lower_bound(case: Case | str, eps1: float, eps2: float) -> float:
    eps1 = _check_eps("eps1", eps1)
    eps2 = _check_eps("eps2", eps2)
    cross = math.sqrt(eps1 * eps2)
    if Case(case) is Case.SAME:
        return 1.0 - 2.0 * eps1 - eps2 - 2.0 * math.sqrt(2.0) * cross
    c = 2.0 + 2.0 * math.sqrt(2.0)
    return 1.0 - c * eps1 - eps2 - c * cross


def bound_satisfied(F: float, bound: float) -> bool:
    return F > bound - BOUND_SLACK


def stage1_overlap_diagnostics(spec: BipartiteSpec, eps1: float, h1: int, sender: int = 0,
                               free_angle_default: float = 0.0) -> tuple[complex, complex]:
    """Coefficients (t1, t2) with psi_h1 = t1 |Psi> + t2 |O -> s>, up to global phase.

    |Psi> is the stage-1 target and |O -> s> the normalised arcs entering the
    sender.  Found by a two-column least-squares fit in the full space.
    """
    if (spec.m if spec.is_left(sender) else spec.n) < 2:
        raise DegenerateSize("the sender's partition needs at least 2 vertices")
    sched = stage1_schedule(h1, eps1, free_angle_default)
    psi = walk.evolve(walk.initial_state(spec, sender), sched, sender).amplitudes
    into_s = ss.stage1_basis(spec, sender).vectors[1]
    big_psi = walk.opposite_side_state(spec, sender).amplitudes
    cols = np.stack([big_psi, into_s], axis=1)
    (t1, t2), *_ = np.linalg.lstsq(cols, psi, rcond=None)
    return complex(t1), complex(t2)


@dataclass(frozen=True)
class _Plan:
    case: Case
    h1: int
    h2: int
    stage1: AngleSchedule
    stage2: AngleSchedule


def _plan(config: TransferConfig) -> _Plan:
    case = classify_case(config)
    fa = config.free_angle_default
    h1 = config.h1_override or min_steps(config.eps1, config.sender_side, Parity.ODD)
    if case is Case.SAME:
        h2 = config.h2_override or min_steps(config.eps2, config.sender_side, Parity.ODD)
        s2 = stage2_same_schedule(h2, config.eps2, fa)
    else:
        h2 = config.h2_override or min_steps(config.eps2, config.receiver_side, Parity.EVEN)
        s2 = stage2_diff_schedule(h2, config.eps2, config.pairing, fa)
    return _Plan(case, h1, h2, stage1_schedule(h1, config.eps1, fa), s2)


def _full_fidelities(config: TransferConfig, plan: _Plan) -> tuple[float, float, float]:
    spec, s, r = config.spec, config.sender, config.receiver
    psi0 = walk.initial_state(spec, s)
    target = walk.target_state(spec, r)
    mid = walk.opposite_side_state(spec, s)
    psi1 = walk.evolve(psi0, plan.stage1, s)
    F1 = walk.fidelity(mid, psi1)
    F2 = walk.fidelity(target, walk.evolve(mid, plan.stage2, r))
    F = walk.fidelity(target, walk.evolve(psi1, plan.stage2, r))
    return F1, F2, F


def _overlap_sq(a: np.ndarray, b: np.ndarray) -> float:
    return abs(np.vdot(a, b)) ** 2


def _subspace_fidelities(config: TransferConfig, plan: _Plan) -> tuple[float, float, float]:
    spec, s, r = config.spec, config.sender, config.receiver
    psi0 = walk.initial_state(spec, s)
    target = walk.target_state(spec, r)
    mid = walk.opposite_side_state(spec, s)

    b1 = ss.stage1_basis(spec, s)
    c1 = ss.reduced_evolve(ss.project(psi0, b1), plan.stage1, b1)
    F1 = _overlap_sq(ss.project(mid, b1), c1)

    b2 = ss.stage2_same_basis(spec, r) if plan.case is Case.SAME else ss.stage2_diff_basis(spec, r)
    c2 = ss.reduced_evolve(ss.project(mid, b2), plan.stage2, b2)
    F2 = _overlap_sq(ss.project(target, b2), c2)

    return F1, F2, _subspace_end_to_end(config, plan)


def _subspace_end_to_end(config: TransferConfig, plan: _Plan) -> float:
    spec, s, r = config.spec, config.sender, config.receiver
    psi0 = walk.initial_state(spec, s)
    target = walk.target_state(spec, r)
    if plan.case is Case.SAME and config.sender_side < 3:
        # the six-vector basis degenerates; carry the whole run in full space
        return walk.fidelity(target, walk.evolve(walk.evolve(psi0, plan.stage1, s), plan.stage2, r))
    bc = (ss.combined_same_basis(spec, s, r) if plan.case is Case.SAME
          else ss.combined_diff_basis(spec, s, r))
    c = ss.reduced_evolve(ss.project(psi0, bc), plan.stage1, bc)
    c = ss.reduced_evolve(c, plan.stage2, bc)
    return _overlap_sq(ss.project(target, bc), c)


def _check_subspace_sizes(config: TransferConfig, case: Case):
    if config.sender_side < 2 or (case is Case.DIFF and config.receiver_side < 2):
        raise DegenerateSize("subspace backend needs both relevant partitions of size >= 2")


def _run(config: TransferConfig, expect: Case) -> FidelityReport:
    plan = _plan(config)
    if plan.case is not expect:
        raise InvalidConfig(f"configuration is a {plan.case.value}-partition transfer")
    backend = config.backend
    if backend is not Backend.FULL:
        _check_subspace_sizes(config, plan.case)
    disagreement = math.nan
    if backend is Backend.FULL:
        F1, F2, F = _full_fidelities(config, plan)
    elif backend is Backend.SUBSPACE:
        F1, F2, F = _subspace_fidelities(config, plan)
    else:
        F1, F2, F = _full_fidelities(config, plan)
        sub = _subspace_fidelities(config, plan)
        disagreement = max(abs(a - b) for a, b in zip((F1, F2, F), sub))
    if config.sender_side >= 2:
        _, t2 = stage1_overlap_diagnostics(config.spec, config.eps1, plan.h1, config.sender,
                                           config.free_angle_default)
        t2_sq = abs(t2) ** 2
    else:
        t2_sq = math.nan
    bound = fidelity_lower_bound(plan.case, config.eps1, config.eps2)
    return FidelityReport(plan.case, config.m, config.n, config.sender, config.receiver,
                          config.eps1, config.eps2, plan.h1, plan.h2, F1, F2, F, bound,
                          bound_satisfied(F, bound), t2_sq, disagreement)


def run_same_partition(config: TransferConfig) -> FidelityReport:
    return _run(config, Case.SAME)


def run_diff_partition(config: TransferConfig) -> FidelityReport:
    return _run(config, Case.DIFF)


def run_transfer(config: TransferConfig) -> FidelityReport:
    if classify_case(config) is Case.SAME:
        return run_same_partition(config)
    return run_diff_partition(config)


def _full_end_to_end(config: TransferConfig, plan: _Plan) -> float:
    spec = config.spec
    psi = walk.evolve(walk.initial_state(spec, config.sender), plan.stage1, config.sender)
    psi = walk.evolve(psi, plan.stage2, config.receiver)
    return walk.fidelity(walk.target_state(spec, config.receiver), psi)


def end_to_end_fidelity(config: TransferConfig) -> float:
    """Only F, skipping the stage-wise and diagnostic runs (used by sweeps).

    With ``Backend.BOTH`` the full-space value is returned after checking the
    subspace value agrees within ``BACKEND_TOL``.
    """
    plan = _plan(config)
    if config.backend is Backend.FULL:
        return _full_end_to_end(config, plan)
    _check_subspace_sizes(config, plan.case)
    sub = _subspace_end_to_end(config, plan)
    if config.backend is Backend.SUBSPACE:
        return sub
    full = _full_end_to_end(config, plan)
    if abs(full - sub) > BACKEND_TOL:
        raise ss.NotInvariant(f"backends disagree by {abs(full - sub):.3g} at m={config.m}, n={config.n}")
    return full
