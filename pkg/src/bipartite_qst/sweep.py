"""(m, n) grid sweeps of the end-to-end fidelity.

Sender and receiver are fixed canonically: 0 and 1 for the same-partition
case, 0 and m for the different-partition case.  Rows come back in m-major
order whatever the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import InvalidConfig
from .schedule import Pairing
from .transfer import Backend, Case, TransferConfig, end_to_end_fidelity


@dataclass(frozen=True)
class SweepSpec:
    m_range: tuple[int, int]
    n_range: tuple[int, int]
    eps1: float
    eps2: float
    case: Case
    backend: Backend = Backend.SUBSPACE
    pairing: Pairing = Pairing.THEOREM_PROOF
    free_angle_default: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "case", Case(self.case))
        object.__setattr__(self, "backend", Backend(self.backend))
        object.__setattr__(self, "pairing", Pairing(self.pairing))
        for name, (lo, hi) in (("m", self.m_range), ("n", self.n_range)):
            if lo > hi:
                raise InvalidConfig(f"empty {name} range {lo}..{hi}")
            if lo < 1:
                raise InvalidConfig(f"{name} range must start at 1 or above")
        subspace = self.backend is not Backend.FULL
        if self.case is Case.SAME and self.m_range[0] < 2:
            raise InvalidConfig("same-partition sweeps need m >= 2")
        if self.case is Case.DIFF and subspace and min(self.m_range[0], self.n_range[0]) < 2:
            raise InvalidConfig("different-partition subspace sweeps need m, n >= 2")

    def points(self) -> list[tuple[int, int]]:
        return [(m, n)
                for m in range(self.m_range[0], self.m_range[1] + 1)
                for n in range(self.n_range[0], self.n_range[1] + 1)]

    def config(self, m: int, n: int) -> TransferConfig:
        receiver = 1 if self.case is Case.SAME else m
        return TransferConfig(m, n, 0, receiver, self.eps1, self.eps2, self.backend,
                              self.pairing, self.free_angle_default)


def _point(args) -> tuple[int, int, float]:
    spec, m, n = args
    return m, n, end_to_end_fidelity(spec.config(m, n))


def worker_count(env: dict | None = None) -> int:
    """Worker cap from ``QST_THREADS`` (default: CPU count)."""
    env = os.environ if env is None else env
    cpus = os.cpu_count() or 1
    raw = env.get("QST_THREADS")
    if raw is None or raw.strip() == "":
        return cpus
    try:
        val = int(raw)
    except ValueError:
        raise InvalidConfig(f"QST_THREADS must be an integer, got {raw!r}") from None
    if val < 1:
        raise InvalidConfig("QST_THREADS must be at least 1")
    return val


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[tuple[int, int, float]]:
    jobs = [(spec, m, n) for m, n in spec.points()]
    if workers <= 1 or len(jobs) < 2:
        rows = [_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return sorted(rows, key=lambda r: (r[0], r[1]))


def format_grid(rows) -> str:
    lines = ["m,n,F"]
    lines += [f"{m},{n},{F:.17g}" for m, n, F in rows]
    return "\n".join(lines) + "\n"
