"""Complete bipartite graph K_{m,n} and the indexing of its directed arcs.

Vertices are labelled left block first: ``0..m-1`` on the left and
``m..m+n-1`` on the right.  Arcs are grouped by source vertex and ordered by
ascending neighbour id, so the left-sourced arcs form an ``m x n`` block
followed by the right-sourced ``n x m`` block::

    index(u, v) = u * n + (v - m)              u left
    index(v, u) = m * n + (v - m) * m + u      v right
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import NonAdjacent, OutOfRange


@dataclass(frozen=True)
class BipartiteSpec:
    m: int
    n: int

    def __post_init__(self):
        for name in ("m", "n"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise OutOfRange(f"{name} must be a positive integer, got {val!r}")

    @property
    def num_vertices(self) -> int:
        return self.m + self.n

    @property
    def num_arcs(self) -> int:
        return 2 * self.m * self.n

    def check_vertex(self, u: int) -> int:
        if isinstance(u, bool) or not isinstance(u, int) or not 0 <= u < self.m + self.n:
            raise OutOfRange(f"vertex {u!r} outside 0..{self.m + self.n - 1}")
        return u

    def is_left(self, u: int) -> bool:
        return self.check_vertex(u) < self.m

    def same_side(self, u: int, v: int) -> bool:
        return self.is_left(u) == self.is_left(v)


def degree(spec: BipartiteSpec, u: int) -> int:
    return spec.n if spec.is_left(u) else spec.m


def neighbors(spec: BipartiteSpec, u: int) -> list[int]:
    if spec.is_left(u):
        return list(range(spec.m, spec.m + spec.n))
    return list(range(spec.m))


def arc_index(spec: BipartiteSpec, u: int, v: int) -> int:
    try:
        spec.check_vertex(u)
        spec.check_vertex(v)
    except OutOfRange as exc:
        raise NonAdjacent(str(exc)) from None
    if spec.same_side(u, v):
        raise NonAdjacent(f"vertices {u} and {v} lie in the same partition")
    m, n = spec.m, spec.n
    if u < m:
        return u * n + (v - m)
    return m * n + (u - m) * m + v


def arc_pair(spec: BipartiteSpec, index: int) -> tuple[int, int]:
    """Inverse of :func:`arc_index`."""
    m, n = spec.m, spec.n
    if isinstance(index, bool) or not isinstance(index, int) or not 0 <= index < 2 * m * n:
        raise OutOfRange(f"arc index {index!r} outside 0..{2 * m * n - 1}")
    if index < m * n:
        u, j = divmod(index, n)
        return u, m + j
    j, u = divmod(index - m * n, m)
    return m + j, u


def arcs(spec: BipartiteSpec) -> Iterator[tuple[int, int]]:
    """All directed arcs in index order."""
    for i in range(spec.num_arcs):
        yield arc_pair(spec, i)
