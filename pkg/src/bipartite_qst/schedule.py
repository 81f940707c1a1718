"""Chebyshev-derived angle schedules for the two walk stages.

Angles are stored 0-based: ``alphas[k - 1]`` is the coin angle applied at
step ``k`` (1-based, as in the usual statement of the algorithm).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadParity, InvalidEpsilon, OutOfRange


class Stage(str, enum.Enum):
    STAGE1 = "stage1"
    STAGE2_SAME = "stage2_same"
    STAGE2_DIFF = "stage2_diff"


class Parity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


class Pairing(str, enum.Enum):
    """Which index pairing ties the stage-2 oracle angles to the coin angles
    when sender and receiver sit in different partitions.

    ``ALGORITHM_BOX`` uses beta'_{h+2-k} = -alpha'_k, ``THEOREM_PROOF`` uses
    beta'_{h+1-k} = -alpha'_k.
    """

    ALGORITHM_BOX = "box"
    THEOREM_PROOF = "theorem"


@dataclass(frozen=True)
class AngleSchedule:
    h: int
    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    stage: Stage
    epsilon: float
    free_angle_default: float = 0.0
    pairing: Pairing | None = None
    # step indices (1-based) whose angle was fixed by the formula
    constrained_alphas: frozenset[int] = field(default_factory=frozenset)
    constrained_betas: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if isinstance(self.h, bool) or not isinstance(self.h, int) or self.h < 1:
            raise OutOfRange(f"step count must be a positive integer, got {self.h!r}")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.alphas) != self.h or len(self.betas) != self.h:
            raise OutOfRange("alphas and betas must both have length h")
        if not all(math.isfinite(a) for a in self.alphas + self.betas):
            raise OutOfRange("schedule angles must be finite")
        want_even = self.stage is Stage.STAGE2_DIFF
        if (self.h % 2 == 0) != want_even:
            raise BadParity(f"{self.stage.value} needs {'even' if want_even else 'odd'} h, got {self.h}")

    def __len__(self):
        return self.h

    def steps(self):
        """Iterate over ``(alpha_t, beta_t)`` in application order."""
        return zip(self.alphas, self.betas)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 < eps <= 1.0):
        raise InvalidEpsilon(f"epsilon must lie in (0, 1], got {eps!r}")
    return eps


def _check_order(h: int) -> int:
    if isinstance(h, bool) or not isinstance(h, (int, np.integer)) or h < 1:
        raise OutOfRange(f"order must be a positive integer, got {h!r}")
    return int(h)


def arccot(y: float) -> float:
    """Inverse cotangent with range (0, pi); arccot(0) = pi/2, arccot(+-inf) = 0, pi."""
    return math.pi / 2 - math.atan(y)


def chebyshev(order: int, x: float) -> float:
    """T_order(x), Chebyshev polynomial of the first kind.

    Inside [-1, 1] the three-term recurrence is used (bounded, and exact on
    low orders); outside, cosh(order * arccosh|x|) with the parity sign.
    """
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)) or order < 0:
        raise OutOfRange(f"order must be a non-negative integer, got {order!r}")
    x = float(x)
    if abs(x) > 1.0:
        sign = -1.0 if (x < 0 and order % 2) else 1.0
        return sign * math.cosh(order * math.acosh(abs(x)))
    if order == 0:
        return 1.0
    prev, cur = 1.0, x
    for _ in range(order - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def gamma(h: int, epsilon: float) -> float:
    """Width parameter with T_h(1/gamma) = 1/sqrt(epsilon); lies in (0, 1]."""
    h = _check_order(h)
    eps = _check_eps(epsilon)
    return 1.0 / math.cosh(math.acosh(1.0 / math.sqrt(eps)) / h)


def min_steps(epsilon: float, d: int, parity: Parity | str) -> int:
    """Smallest h of the requested parity with h >= ln(2/sqrt(eps)) * sqrt(d).

    Floors at 3 for odd and 2 for even step counts.
    """
    eps = _check_eps(epsilon)
    d = _check_order(d)
    parity = Parity(parity)
    bound = math.log(2.0 / math.sqrt(eps)) * math.sqrt(d)
    h = max(math.ceil(bound), 3 if parity is Parity.ODD else 2)
    if (h % 2 == 1) != (parity is Parity.ODD):
        h += 1
    return h


def _require_parity(h: int, odd: bool, floor: int) -> int:
    if isinstance(h, bool) or not isinstance(h, (int, np.integer)):
        raise OutOfRange(f"step count must be an integer, got {h!r}")
    h = int(h)
    if (h % 2 == 1) != odd:
        raise BadParity(f"h must be {'odd' if odd else 'even'}, got {h}")
    if h < floor:
        raise OutOfRange(f"h must be at least {floor}, got {h}")
    return h


def _fixed_point_angle(k_num: int, order: int, sqrt_one_minus_g2: float) -> float:
    """2 * arccot(tan(k_num * pi / order) * sqrt(1 - gamma^2))."""
    return 2.0 * arccot(math.tan(k_num * math.pi / order) * sqrt_one_minus_g2)


def stage1_schedule(h1: int, eps1: float, free_angle_default: float = 0.0) -> AngleSchedule:
    """Stage-1 schedule (sender marked).

    For k = 3, 5, ..., h1: beta_k = -alpha_{h1+2-k} = -2 arccot(tan((k-1)pi/h1) sqrt(1-gamma^2)).
    """
    h1 = _require_parity(h1, odd=True, floor=3)
    eps1 = _check_eps(eps1)
    sg = math.sqrt(max(0.0, 1.0 - gamma(h1, eps1) ** 2))
    alphas = [free_angle_default] * h1
    betas = [free_angle_default] * h1
    ca, cb = set(), set()
    for k in range(3, h1 + 1, 2):
        v = _fixed_point_angle(k - 1, h1, sg)
        betas[k - 1] = -v
        alphas[h1 + 1 - k] = v  # alpha_{h1+2-k}
        cb.add(k)
        ca.add(h1 + 2 - k)
    return AngleSchedule(h1, tuple(alphas), tuple(betas), Stage.STAGE1, eps1,
                         free_angle_default, None, frozenset(ca), frozenset(cb))


def stage2_same_schedule(h2: int, eps2: float, free_angle_default: float = 0.0) -> AngleSchedule:
    """Stage-2 schedule (receiver marked, same partition as the sender).

    For k = 3, 5, ..., h2: alpha'_k = -beta'_{h2+2-k} = 2 arccot(tan((k-1)pi/h2) sqrt(1-gamma^2)).
    """
    h2 = _require_parity(h2, odd=True, floor=3)
    eps2 = _check_eps(eps2)
    sg = math.sqrt(max(0.0, 1.0 - gamma(h2, eps2) ** 2))
    alphas = [free_angle_default] * h2
    betas = [free_angle_default] * h2
    ca, cb = set(), set()
    for k in range(3, h2 + 1, 2):
        v = _fixed_point_angle(k - 1, h2, sg)
        alphas[k - 1] = v
        betas[h2 + 1 - k] = -v
        ca.add(k)
        cb.add(h2 + 2 - k)
    return AngleSchedule(h2, tuple(alphas), tuple(betas), Stage.STAGE2_SAME, eps2,
                         free_angle_default, None, frozenset(ca), frozenset(cb))


def stage2_diff_schedule(h2: int, eps2: float, pairing: Pairing | str = Pairing.THEOREM_PROOF,
                         free_angle_default: float = 0.0) -> AngleSchedule:
    """Stage-2 schedule (receiver marked, opposite partition to the sender).

    For k = 2, 4, ..., h2: alpha'_k = 2 arccot(tan(k pi/(h2+1)) sqrt(1-gamma^2)),
    gamma taken at order h2+1.  The oracle angle -alpha'_k goes to index
    h2+1-k (``THEOREM_PROOF``, odd indices) or h2+2-k (``ALGORITHM_BOX``,
    even indices).
    """
    h2 = _require_parity(h2, odd=False, floor=2)
    eps2 = _check_eps(eps2)
    pairing = Pairing(pairing)
    order = h2 + 1
    sg = math.sqrt(max(0.0, 1.0 - gamma(order, eps2) ** 2))
    shift = 1 if pairing is Pairing.THEOREM_PROOF else 2
    alphas = [free_angle_default] * h2
    betas = [free_angle_default] * h2
    ca, cb = set(), set()
    for k in range(2, h2 + 1, 2):
        v = _fixed_point_angle(k, order, sg)
        alphas[k - 1] = v
        j = h2 + shift - k
        betas[j - 1] = -v
        ca.add(k)
        cb.add(j)
    return AngleSchedule(h2, tuple(alphas), tuple(betas), Stage.STAGE2_DIFF, eps2,
                         free_angle_default, pairing, frozenset(ca), frozenset(cb))


def lemma_phase_deltas(h: int, epsilon: float) -> list[float]:
    """Phase differences (-1)^k pi - 2 arccot(tan(k pi/h) sqrt(1-gamma^2)), k = 1..h-1."""
    h = _check_order(h)
    sg = math.sqrt(max(0.0, 1.0 - gamma(h, epsilon) ** 2))
    return [(-1) ** k * math.pi - _fixed_point_angle(k, h, sg) for k in range(1, h)]


def quasi_chebyshev(x: float, phase_deltas: Sequence[float]) -> complex:
    """Run a_k = x (1 + e^{-i d}) a_{k-1} - e^{-i d} a_{k-2} from a_0 = 1, a_1 = x.

    ``phase_deltas[k - 2]`` is the phase difference used at step k, so a list
    of length h - 1 returns a_h.  All-zero deltas reproduce T_h(x).
    """
    prev, cur = complex(1.0), complex(x)
    for d in phase_deltas:
        w = complex(math.cos(d), -math.sin(d))
        prev, cur = cur, x * (1 + w) * cur - w * prev
    return cur


def predicted_stage_fidelity(h: int, eps: float, d: int, stage: Stage | str) -> float:
    """Closed-form stage fidelity 1 - eps * T_L(sqrt(1 - 1/d) / gamma_L)^2.

    L = h for stage 1 and same-partition stage 2 (d = m), L = h + 1 for the
    different-partition stage 2 (d = n).
    """
    stage = Stage(stage)
    eps = _check_eps(eps)
    d = _check_order(d)
    order = _check_order(h) + (1 if stage is Stage.STAGE2_DIFF else 0)
    x = math.sqrt(1.0 - 1.0 / d) / gamma(order, eps)
    return 1.0 - eps * chebyshev(order, x) ** 2
