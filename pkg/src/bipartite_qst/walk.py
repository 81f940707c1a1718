"""Full arc-space simulator for the generalized Grover walk on K_{m,n}.

One step is U(alpha, beta) = S C(alpha) Q(beta): the oracle multiplies the
arcs leaving the marked vertex by e^{i beta}, the coin maps every source
block psi_u to (1 - e^{-i alpha}) <Psi_u|psi_u> Psi_u - psi_u, and the
flip-flop shift swaps (u, v) with (v, u).

With the left-block-first arc layout, the amplitudes of a state are an
``m x n`` array of left-sourced arcs followed by an ``n x m`` array of
right-sourced arcs, so the shift is a pair of transposes and the coin is a
row-mean update.  Nothing of size (2mn)^2 is ever built.

The ``*_array`` functions act on raw arrays whose last axis has length 2mn
and do not check normalisation; the :class:`StateVector` API wraps them.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .errors import OutOfRange, SpecMismatch
from .graph import BipartiteSpec, arc_index, arc_pair, degree
from .schedule import AngleSchedule

NORM_TOL = 1e-8


def _blocks(spec: BipartiteSpec, x: np.ndarray):
    m, n = spec.m, spec.n
    lead = x.shape[:-1]
    return x[..., : m * n].reshape(lead + (m, n)), x[..., m * n:].reshape(lead + (n, m))


def _join(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    lead = left.shape[:-2]
    return np.concatenate([left.reshape(lead + (-1,)), right.reshape(lead + (-1,))], axis=-1)


def shift_array(spec: BipartiteSpec, x: np.ndarray) -> np.ndarray:
    left, right = _blocks(spec, x)
    return _join(np.swapaxes(right, -1, -2), np.swapaxes(left, -1, -2))


def block_mean_projector_array(spec: BipartiteSpec, x: np.ndarray) -> np.ndarray:
    """Sum over vertices of |Psi_u><Psi_u| applied to x."""
    left, right = _blocks(spec, x)
    left = np.broadcast_to(left.mean(axis=-1, keepdims=True), left.shape)
    right = np.broadcast_to(right.mean(axis=-1, keepdims=True), right.shape)
    return _join(left, right)


def marked_projector_array(spec: BipartiteSpec, x: np.ndarray, marked: int) -> np.ndarray:
    """Projector onto the arcs leaving ``marked``."""
    spec.check_vertex(marked)
    out = np.zeros_like(x)
    left, right = _blocks(spec, x)
    oleft, oright = _blocks(spec, out)
    if marked < spec.m:
        oleft[..., marked, :] = left[..., marked, :]
    else:
        oright[..., marked - spec.m, :] = right[..., marked - spec.m, :]
    return out


def coin_array(spec: BipartiteSpec, x: np.ndarray, alpha: float) -> np.ndarray:
    return (1 - cmath.exp(-1j * alpha)) * block_mean_projector_array(spec, x) - x


def oracle_array(spec: BipartiteSpec, x: np.ndarray, beta: float, marked: int) -> np.ndarray:
    return x + (cmath.exp(1j * beta) - 1) * marked_projector_array(spec, x, marked)


def step_array(spec: BipartiteSpec, x: np.ndarray, alpha: float, beta: float, marked: int) -> np.ndarray:
    return shift_array(spec, coin_array(spec, oracle_array(spec, x, beta, marked), alpha))


def evolve_array(spec: BipartiteSpec, x: np.ndarray, steps: Iterable[tuple[float, float]],
                 marked: int) -> np.ndarray:
    spec.check_vertex(marked)
    m = spec.m
    left, right = (b.copy() for b in _blocks(spec, np.asarray(x, dtype=complex)))
    for alpha, beta in steps:
        # oracle, then coin, then shift
        if marked < m:
            left[..., marked, :] *= cmath.exp(1j * beta)
        else:
            right[..., marked - m, :] *= cmath.exp(1j * beta)
        c = 1 - cmath.exp(-1j * alpha)
        left = c * left.mean(axis=-1, keepdims=True) - left
        right = c * right.mean(axis=-1, keepdims=True) - right
        left, right = np.swapaxes(right, -1, -2).copy(), np.swapaxes(left, -1, -2).copy()
    return _join(left, right)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm amplitudes over the 2mn directed arcs of ``spec``."""

    spec: BipartiteSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (self.spec.num_arcs,):
            raise SpecMismatch(f"expected {self.spec.num_arcs} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (norm={norm:.3g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, spec: BipartiteSpec, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(spec, amps / np.linalg.norm(amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        _same_spec(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def with_amplitudes(self, amplitudes: np.ndarray) -> "StateVector":
        return StateVector(self.spec, amplitudes)


def _same_spec(a: StateVector, b: StateVector):
    if a.spec != b.spec:
        raise SpecMismatch(f"{a.spec} vs {b.spec}")


def vertex_state(spec: BipartiteSpec, u: int) -> StateVector:
    """Uniform superposition of the arcs leaving ``u``."""
    spec.check_vertex(u)
    amps = np.zeros(spec.num_arcs, dtype=complex)
    left, right = _blocks(spec, amps)
    if u < spec.m:
        left[u, :] = 1.0
    else:
        right[u - spec.m, :] = 1.0
    return StateVector(spec, amps / np.sqrt(degree(spec, u)))


def initial_state(spec: BipartiteSpec, sender: int) -> StateVector:
    return vertex_state(spec, sender)


def target_state(spec: BipartiteSpec, receiver: int) -> StateVector:
    return vertex_state(spec, receiver)


def opposite_side_state(spec: BipartiteSpec, u: int) -> StateVector:
    """Uniform superposition over every arc leaving the partition opposite ``u``.

    This is the intermediate state the first stage aims for.
    """
    amps = np.zeros(spec.num_arcs, dtype=complex)
    left, right = _blocks(spec, amps)
    if spec.is_left(u):
        right[:] = 1.0
    else:
        left[:] = 1.0
    return StateVector(spec, amps / np.sqrt(spec.m * spec.n))


def apply_shift(state: StateVector) -> StateVector:
    return state.with_amplitudes(shift_array(state.spec, state.amplitudes))


def apply_coin(state: StateVector, alpha: float) -> StateVector:
    return state.with_amplitudes(coin_array(state.spec, state.amplitudes, alpha))


def apply_oracle(state: StateVector, beta: float, marked: int) -> StateVector:
    return state.with_amplitudes(oracle_array(state.spec, state.amplitudes, beta, marked))


def step(state: StateVector, alpha: float, beta: float, marked: int) -> StateVector:
    """One walk step: oracle, then coin, then shift."""
    return state.with_amplitudes(step_array(state.spec, state.amplitudes, alpha, beta, marked))


def evolve(state: StateVector, schedule: AngleSchedule, marked: int) -> StateVector:
    return state.with_amplitudes(evolve_array(state.spec, state.amplitudes, schedule.steps(), marked))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2."""
    return abs(a.inner(b)) ** 2


def dump_state(state: StateVector, fh: IO[str]) -> None:
    """Write one ``u,v,re,im`` line per arc, reals at 17 significant digits."""
    for i, amp in enumerate(state.amplitudes):
        u, v = arc_pair(state.spec, i)
        fh.write(f"{u},{v},{amp.real:.17g},{amp.imag:.17g}\n")


def load_state(spec: BipartiteSpec, fh: IO[str]) -> StateVector:
    amps = np.zeros(spec.num_arcs, dtype=complex)
    seen = set()
    for line in fh:
        line = line.strip()
        if not line:
            continue
        u, v, re, im = line.split(",")
        idx = arc_index(spec, int(u), int(v))
        if idx in seen:
            raise OutOfRange(f"arc ({u},{v}) listed twice")
        seen.add(idx)
        amps[idx] = complex(float(re), float(im))
    return StateVector(spec, amps)
