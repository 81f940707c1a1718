"""Invariant subspaces of the walk and a reduced-dimension evolution backend.

Every basis vector is a uniform superposition over a set of arcs, so the
walk restricted to the span is exact.  The 4-dimensional stage bases are
built around the marked ("pivot") vertex p, with P its partition and O the
opposite one::

    e1 = p -> O        e2 = O -> p
    e3 = O -> P\\{p}    e4 = P\\{p} -> O

In these coordinates the shift, oracle and coin take the closed forms used
by :func:`reduced_operator` with cos(omega) = 1 - 2/|P|.  The 6- and 8-dim
bases that carry both stages at once are evolved through operators
compressed numerically from the full space (``B^dagger Op B``).
"""

from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import walk
from .errors import DegenerateSize, DimensionMismatch, QSTError, UnsupportedBasis
from .graph import BipartiteSpec
from .schedule import AngleSchedule, Stage

LEAKAGE_TOL = 1e-10


class NotInvariant(QSTError):
    """A basis failed the closure check under the walk operators."""


class BasisKind(str, enum.Enum):
    STAGE1 = "stage1"
    STAGE2_SAME = "stage2_same"
    STAGE2_DIFF = "stage2_diff"
    COMBINED_SAME = "combined_same"
    COMBINED_DIFF = "combined_diff"

    @property
    def is_stage(self) -> bool:
        return self in (BasisKind.STAGE1, BasisKind.STAGE2_SAME, BasisKind.STAGE2_DIFF)


class ReducedOp(str, enum.Enum):
    SHIFT = "shift"
    COIN = "coin"
    ORACLE = "oracle"


@dataclass(frozen=True, eq=False)
class ReducedBasis:
    """Orthonormal rows ``vectors`` (shape d x 2mn) spanning an invariant subspace.

    ``pivot_side`` is the size of the marked vertex's partition for 4-dim
    bases (it fixes omega); it is unused for the combined bases.
    """

    kind: BasisKind
    spec: BipartiteSpec
    vectors: np.ndarray
    sender: int | None = None
    receiver: int | None = None
    pivot_side: int | None = None
    _compressed: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def gram_residual(self) -> float:
        g = self.vectors.conj() @ self.vectors.T
        return float(np.abs(g - np.eye(self.dim)).max())

    def marked_for(self, stage: Stage) -> int:
        """Vertex carrying the oracle while evolving under ``stage``."""
        if self.kind.is_stage:
            return self.sender if self.kind is BasisKind.STAGE1 else self.receiver
        return self.sender if Stage(stage) is Stage.STAGE1 else self.receiver


@functools.lru_cache(maxsize=64)
def _arc_endpoints(spec: BipartiteSpec) -> tuple[np.ndarray, np.ndarray]:
    m, n = spec.m, spec.n
    src = np.concatenate([np.repeat(np.arange(m), n), np.repeat(np.arange(m, m + n), m)])
    dst = np.concatenate([np.tile(np.arange(m, m + n), m), np.tile(np.arange(m), n)])
    return src, dst


def _uniform(spec: BipartiteSpec, sources, targets) -> np.ndarray:
    src, dst = _arc_endpoints(spec)
    mask = np.isin(src, list(sources)) & np.isin(dst, list(targets))
    count = int(mask.sum())
    if count == 0:
        raise DegenerateSize("empty arc set in basis construction")
    return mask.astype(complex) / math.sqrt(count)


def _sides(spec: BipartiteSpec, u: int) -> tuple[set[int], set[int]]:
    left, right = set(range(spec.m)), set(range(spec.m, spec.m + spec.n))
    return (left, right) if spec.is_left(u) else (right, left)


def _pivot_basis(spec: BipartiteSpec, pivot: int, kind: BasisKind, **ids) -> ReducedBasis:
    own, other = _sides(spec, pivot)
    if len(own) < 2:
        raise DegenerateSize(f"the partition of vertex {pivot} needs at least 2 vertices")
    rest = own - {pivot}
    vecs = np.array([
        _uniform(spec, {pivot}, other),
        _uniform(spec, other, {pivot}),
        _uniform(spec, other, rest),
        _uniform(spec, rest, other),
    ])
    return ReducedBasis(kind, spec, vecs, pivot_side=len(own), **ids)


def stage1_basis(spec: BipartiteSpec, sender: int) -> ReducedBasis:
    return _pivot_basis(spec, sender, BasisKind.STAGE1, sender=sender)


def stage2_same_basis(spec: BipartiteSpec, receiver: int) -> ReducedBasis:
    return _pivot_basis(spec, receiver, BasisKind.STAGE2_SAME, receiver=receiver)


def stage2_diff_basis(spec: BipartiteSpec, receiver: int) -> ReducedBasis:
    return _pivot_basis(spec, receiver, BasisKind.STAGE2_DIFF, receiver=receiver)


def combined_same_basis(spec: BipartiteSpec, sender: int, receiver: int) -> ReducedBasis:
    """Six vectors: s->O, O->s, r->O, O->r, P\\{s,r}->O, O->P\\{s,r}."""
    if sender == receiver or not spec.same_side(sender, receiver):
        raise DimensionMismatch("combined_same_basis needs distinct vertices in one partition")
    own, other = _sides(spec, sender)
    if len(own) < 3:
        raise DegenerateSize("same-partition combined basis needs a partition of size >= 3")
    rest = own - {sender, receiver}
    vecs = np.array([
        _uniform(spec, {sender}, other),
        _uniform(spec, other, {sender}),
        _uniform(spec, {receiver}, other),
        _uniform(spec, other, {receiver}),
        _uniform(spec, rest, other),
        _uniform(spec, other, rest),
    ])
    return ReducedBasis(BasisKind.COMBINED_SAME, spec, vecs, sender=sender, receiver=receiver)


def combined_diff_basis(spec: BipartiteSpec, sender: int, receiver: int) -> ReducedBasis:
    """Eight vectors: sr, rs, s->O\\r, O\\r->s, P\\s->r, r->P\\s, P\\s->O\\r, O\\r->P\\s."""
    if spec.same_side(sender, receiver):
        raise DimensionMismatch("combined_diff_basis needs vertices in opposite partitions")
    own, other = _sides(spec, sender)
    if len(own) < 2 or len(other) < 2:
        raise DegenerateSize("different-partition combined basis needs both partitions of size >= 2")
    s, r = {sender}, {receiver}
    own_rest, other_rest = own - s, other - r
    vecs = np.array([
        _uniform(spec, s, r),
        _uniform(spec, r, s),
        _uniform(spec, s, other_rest),
        _uniform(spec, other_rest, s),
        _uniform(spec, own_rest, r),
        _uniform(spec, r, own_rest),
        _uniform(spec, own_rest, other_rest),
        _uniform(spec, other_rest, own_rest),
    ])
    return ReducedBasis(BasisKind.COMBINED_DIFF, spec, vecs, sender=sender, receiver=receiver)


def project(state: walk.StateVector, basis: ReducedBasis) -> np.ndarray:
    if state.spec != basis.spec:
        raise DimensionMismatch("state and basis belong to different graphs")
    return basis.vectors.conj() @ state.amplitudes


def lift(coords, basis: ReducedBasis) -> walk.StateVector:
    coords = np.asarray(coords, dtype=complex)
    if coords.shape != (basis.dim,):
        raise DimensionMismatch(f"expected {basis.dim} coordinates, got shape {coords.shape}")
    return walk.StateVector(basis.spec, basis.vectors.T @ coords)


def leakage(state: walk.StateVector, basis: ReducedBasis) -> float:
    """Squared norm of the part of ``state`` outside the span."""
    c = project(state, basis)
    return max(0.0, 1.0 - float(np.vdot(c, c).real))


# closed-form 4x4 matrices

def omega_for(d: int) -> float:
    """Angle with cos(omega) = 1 - 2/d and sin(omega) = 2 sqrt(d-1)/d."""
    return math.atan2(2.0 * math.sqrt(d - 1) / d, 1.0 - 2.0 / d)


SHIFT_4 = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def oracle_4(beta: float) -> np.ndarray:
    return np.diag([cmath.exp(1j * beta), 1, 1, 1]).astype(complex)


def coin_4(alpha: float, omega: float) -> np.ndarray:
    f = 1 - cmath.exp(-1j * alpha)
    c, s = math.cos(omega), math.sin(omega)
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = out[3, 3] = -cmath.exp(-1j * alpha)
    out[1, 1] = f * (1 - c) / 2 - 1
    out[2, 2] = f * (1 + c) / 2 - 1
    out[1, 2] = out[2, 1] = f * s / 2
    return out


def rotation_R(theta: float) -> np.ndarray:
    """-diag(e^{-i t/2}, e^{i t/2}, e^{-i t/2}, e^{-i t/2})."""
    a, b = cmath.exp(-0.5j * theta), cmath.exp(0.5j * theta)
    return -np.diag([a, b, a, a])


def mixer_A(theta: float, omega: float) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    c, s = math.cos(omega / 2), math.sin(omega / 2)
    out[1, 1] = out[2, 2] = c
    out[1, 2] = -1j * cmath.exp(1j * theta) * s
    out[2, 1] = -1j * cmath.exp(-1j * theta) * s
    return out


def reduced_operator(op: ReducedOp | str, basis: ReducedBasis, angle: float = 0.0) -> np.ndarray:
    """Closed-form 4x4 shift, coin(angle) or oracle(angle) on a stage basis."""
    op = ReducedOp(op)
    if not basis.kind.is_stage:
        raise UnsupportedBasis(f"no closed form for {basis.kind.value}; use compressed_operators")
    if op is ReducedOp.SHIFT:
        return SHIFT_4.copy()
    if op is ReducedOp.ORACLE:
        return oracle_4(angle)
    return coin_4(angle, omega_for(basis.pivot_side))


@dataclass(frozen=True)
class CompressedOperators:
    """B^dagger Op B for the angle-independent pieces of one step.

    C(alpha) = (1 - e^{-i alpha}) P - I and Q(beta) = I + (e^{i beta} - 1) M_x.
    """

    shift: np.ndarray
    block_projector: np.ndarray
    marked_projectors: dict[int, np.ndarray]
    leakage: float


def _compress(basis: ReducedBasis, fn) -> tuple[np.ndarray, float]:
    v = basis.vectors
    image = fn(v)
    small = v.conj() @ image.T
    residual = image - (v.T @ small).T
    return small, float(np.abs(residual).max())


def compressed_operators(basis: ReducedBasis) -> CompressedOperators:
    cached = basis._compressed.get("ops")
    if cached is not None:
        return cached
    spec = basis.spec
    shift, l1 = _compress(basis, lambda x: walk.shift_array(spec, x))
    proj, l2 = _compress(basis, lambda x: walk.block_mean_projector_array(spec, x))
    marks = {}
    worst = max(l1, l2)
    for vtx in {basis.sender, basis.receiver} - {None}:
        mk, lk = _compress(basis, lambda x, vtx=vtx: walk.marked_projector_array(spec, x, vtx))
        marks[vtx] = mk
        worst = max(worst, lk)
    if worst > LEAKAGE_TOL:
        raise NotInvariant(f"{basis.kind.value} basis leaks {worst:.3g} under the walk operators")
    ops = CompressedOperators(shift, proj, marks, worst)
    basis._compressed["ops"] = ops
    return ops


def reduced_step_matrix(basis: ReducedBasis, alpha: float, beta: float, stage: Stage) -> np.ndarray:
    """Matrix of S C(alpha) Q(beta) in the basis coordinates."""
    if basis.kind.is_stage:
        return SHIFT_4 @ coin_4(alpha, omega_for(basis.pivot_side)) @ oracle_4(beta)
    ops = compressed_operators(basis)
    eye = np.eye(basis.dim, dtype=complex)
    coin = (1 - cmath.exp(-1j * alpha)) * ops.block_projector - eye
    oracle = eye + (cmath.exp(1j * beta) - 1) * ops.marked_projectors[basis.marked_for(stage)]
    return ops.shift @ coin @ oracle


def reduced_evolve(coords, schedule: AngleSchedule, basis: ReducedBasis) -> np.ndarray:
    coords = np.asarray(coords, dtype=complex)
    if coords.shape != (basis.dim,):
        raise DimensionMismatch(f"expected {basis.dim} coordinates, got shape {coords.shape}")
    for alpha, beta in schedule.steps():
        coords = reduced_step_matrix(basis, alpha, beta, schedule.stage) @ coords
    return coords


@dataclass(frozen=True)
class DecompositionReport:
    coin_residual: float
    oracle_residual: float
    braiding_residual: float
    shift_rotation_residual: float
    tol: float = 1e-12

    @property
    def max_residual(self) -> float:
        return max(self.coin_residual, self.oracle_residual,
                   self.braiding_residual, self.shift_rotation_residual)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def _random_word(rng: np.random.Generator, omega: float, max_len: int) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    for _ in range(rng.integers(1, max_len + 1)):
        theta = rng.uniform(-2 * math.pi, 2 * math.pi)
        out = out @ (mixer_A(theta, omega) if rng.random() < 0.5 else rotation_R(theta))
    return out


def verify_decompositions(alpha: float, beta: float, omega: float, *, samples: int = 100,
                          max_word: int = 4, rng: np.random.Generator | None = None) -> DecompositionReport:
    """Max residuals of the coin/oracle factorisations and the shift braiding.

    Checks C(a) = e^{-ia/2} A(pi/2) R(a) A(-pi/2), Q(b) = -e^{ib/2} S R(b) S,
    A(t + u) = R(u) A(t) R(-u), and S B1 S B2 S = B2 S B1 over ``samples``
    random words B1, B2 in {A(t), R(t)}.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    coin = coin_4(alpha, omega)
    fact = cmath.exp(-0.5j * alpha) * mixer_A(math.pi / 2, omega) @ rotation_R(alpha) @ mixer_A(-math.pi / 2, omega)
    coin_res = float(np.abs(coin - fact).max())
    oracle_res = float(np.abs(oracle_4(beta) + cmath.exp(0.5j * beta) * SHIFT_4 @ rotation_R(beta) @ SHIFT_4).max())
    braid_res = 0.0
    rot_res = 0.0
    for _ in range(samples):
        b1 = _random_word(rng, omega, max_word)
        b2 = _random_word(rng, omega, max_word)
        lhs = SHIFT_4 @ b1 @ SHIFT_4 @ b2 @ SHIFT_4
        braid_res = max(braid_res, float(np.abs(lhs - b2 @ SHIFT_4 @ b1).max()))
        t, u = rng.uniform(-math.pi, math.pi, size=2)
        conj = rotation_R(u) @ mixer_A(t, omega) @ rotation_R(-u)
        rot_res = max(rot_res, float(np.abs(mixer_A(t + u, omega) - conj).max()))
    return DecompositionReport(coin_res, oracle_res, braid_res, rot_res)
