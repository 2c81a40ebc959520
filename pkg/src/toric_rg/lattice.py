"""Geometry of the level-k square torus and its renormalised sublattices.

Coordinates follow screen convention: ``x`` grows to the right and ``y``
grows downward, so a cell's top-left corner is its anchor. Edges are
``H(x, y)`` joining ``(x, y)-(x+1, y)`` and ``V(x, y)`` joining
``(x, y)-(x, y+1)``; the edge vector stores all H edges row-major, then all
V edges row-major.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from . import _backend
from .errors import NonCycleInput, NotInSublattice


@dataclass(frozen=True)
class TorusLevel:
    """Torus ``T_k`` with side ``m = 2**k`` and ``n = 2 m**2`` edges."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"level k must be an integer >= 1, got {self.k!r}")

    @property
    def m(self) -> int:
        return 1 << self.k

    @property
    def n(self) -> int:
        return 2 * self.m * self.m

    @property
    def d(self) -> int:
        """Minimum distance of the code (equal to m)."""
        return self.m

    def spacing(self, i: int) -> int:
        """Lattice spacing ``2**(k-i)`` of the stage-i sublattice."""
        if not 0 <= i <= self.k:
            raise ValueError(f"stage {i} outside [0, {self.k}]")
        return 1 << (self.k - i)


class VertexCoord(NamedTuple):
    x: int
    y: int


class EdgeId(NamedTuple):
    orientation: str  # "H" or "V"
    x: int
    y: int

    def __str__(self):
        return f"{self.orientation} {self.x} {self.y}"


class HomologyClass(NamedTuple):
    windH: int
    windV: int

    @property
    def trivial(self) -> bool:
        return self.windH == 0 and self.windV == 0


def edge_index(level: TorusLevel, edge: EdgeId) -> int:
    o, x, y = edge
    m = level.m
    if not (0 <= x < m and 0 <= y < m):
        raise ValueError(f"edge {edge} out of range for m={m}")
    if o == "H":
        return y * m + x
    if o == "V":
        return m * m + y * m + x
    raise ValueError(f"orientation must be 'H' or 'V', got {o!r}")


def edge_from_index(level: TorusLevel, index: int) -> EdgeId:
    m = level.m
    index = int(index)
    if not 0 <= index < level.n:
        raise ValueError(f"edge index {index} out of range")
    if index < m * m:
        return EdgeId("H", index % m, index // m)
    index -= m * m
    return EdgeId("V", index % m, index // m)


def edge_endpoints(level: TorusLevel, index: int) -> tuple[int, int]:
    """Vertex ids (``y*m + x``) of both ends of an edge."""
    m = level.m
    mm = m * m
    if index < mm:
        x, y = index % m, index // m
        return index, y * m + (x + 1) % m
    f = index - mm
    x, y = f % m, f // m
    return f, ((y + 1) % m) * m + x


def vertex_id(level: TorusLevel, v) -> int:
    x, y = v
    return (y % level.m) * level.m + (x % level.m)


def vertex_from_id(level: TorusLevel, vid: int) -> VertexCoord:
    return VertexCoord(int(vid) % level.m, int(vid) // level.m)


class EdgeSet:
    """Immutable dense bit vector over the unit edges of a torus."""

    __slots__ = ("level", "bits")

    def __init__(self, level: TorusLevel, bits):
        bits = np.array(bits, dtype=np.uint8, copy=True).reshape(-1)
        if bits.shape[0] != level.n:
            raise ValueError(f"expected {level.n} bits, got {bits.shape[0]}")
        if bits.size and bits.max() > 1:
            raise ValueError("bits must be 0/1")
        bits.flags.writeable = False
        self.level = level
        self.bits = bits

    @classmethod
    def empty(cls, level: TorusLevel) -> "EdgeSet":
        return cls(level, np.zeros(level.n, dtype=np.uint8))

    @classmethod
    def from_indices(cls, level: TorusLevel, indices: Iterable[int]) -> "EdgeSet":
        """Build from edge indices; repeated indices cancel mod 2."""
        idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= level.n):
            raise ValueError("edge index out of range")
        bits = (np.bincount(idx, minlength=level.n) & 1).astype(np.uint8)
        return cls(level, bits)

    @classmethod
    def from_edges(cls, level: TorusLevel, edges: Iterable) -> "EdgeSet":
        return cls.from_indices(level, (edge_index(level, EdgeId(*e)) for e in edges))

    @property
    def weight(self) -> int:
        return int(self.bits.sum(dtype=np.int64))

    def __len__(self):
        return self.weight

    def __bool__(self):
        return bool(self.bits.any())

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def edges(self) -> list[EdgeId]:
        return [edge_from_index(self.level, i) for i in self.indices()]

    def __contains__(self, edge) -> bool:
        return bool(self.bits[edge_index(self.level, EdgeId(*edge))])

    def __xor__(self, other: "EdgeSet") -> "EdgeSet":
        if other.level != self.level:
            raise ValueError("edge sets live on different tori")
        return EdgeSet(self.level, self.bits ^ other.bits)

    __add__ = __xor__

    def __eq__(self, other):
        if not isinstance(other, EdgeSet):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.level.k, self.bits.tobytes()))

    def __repr__(self):
        shown = ", ".join(str(e) for e in self.edges()[:8])
        more = ", ..." if self.weight > 8 else ""
        return f"EdgeSet(k={self.level.k}, weight={self.weight}, [{shown}{more}])"


class SyndromeSet:
    """Set of syndrome vertices on a torus."""

    __slots__ = ("level", "vertices")

    def __init__(self, level: TorusLevel, vertices: Iterable = ()):
        m = level.m
        vs = frozenset(VertexCoord(int(x), int(y)) for x, y in vertices)
        for v in vs:
            if not (0 <= v.x < m and 0 <= v.y < m):
                raise ValueError(f"vertex {tuple(v)} out of range for m={m}")
        self.level = level
        self.vertices = vs

    @classmethod
    def from_array(cls, level: TorusLevel, arr) -> "SyndromeSet":
        m = level.m
        return cls(level, ((i % m, i // m) for i in np.flatnonzero(arr).tolist()))

    @classmethod
    def from_ids(cls, level: TorusLevel, ids: Iterable[int]) -> "SyndromeSet":
        m = level.m
        return cls(level, ((i % m, i // m) for i in ids))

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.level.m ** 2, dtype=np.uint8)
        for i in self.ids():
            arr[i] = 1
        return arr

    def ids(self) -> set[int]:
        m = self.level.m
        return {v.y * m + v.x for v in self.vertices}

    def sorted(self) -> list[VertexCoord]:
        return sorted(self.vertices, key=lambda v: (v.y, v.x))

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, v):
        return VertexCoord(*v) in self.vertices

    def __xor__(self, other: "SyndromeSet") -> "SyndromeSet":
        return SyndromeSet(self.level, self.vertices ^ other.vertices)

    def __eq__(self, other):
        if not isinstance(other, SyndromeSet):
            return NotImplemented
        return self.level == other.level and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.level.k, self.vertices))

    def __repr__(self):
        return f"SyndromeSet(k={self.level.k}, {[tuple(v) for v in self.sorted()]})"


def syndrome(e: EdgeSet) -> SyndromeSet:
    """Vertices incident to an odd number of edges of ``e``."""
    arr = _backend.kernels.syndrome(e.bits, e.level.m)
    return SyndromeSet.from_array(e.level, arr)


def homology_class(c: EdgeSet) -> HomologyClass:
    """Winding parities of a cycle across the cuts x = m-1|0 and y = m-1|0."""
    if _backend.kernels.syndrome(c.bits, c.level.m).any():
        raise NonCycleInput("homology_class needs an edge set with empty syndrome")
    return HomologyClass(*_backend.kernels.homology(c.bits, c.level.m))


def in_sublattice(level: TorusLevel, v, i: int) -> bool:
    """True iff both coordinates of ``v`` are multiples of ``2**(k-i)``."""
    g = level.spacing(i)
    x, y = v
    return x % g == 0 and y % g == 0


def torus_distance(level: TorusLevel, a, b, i: int) -> int:
    """Graph distance between ``a`` and ``b`` in the stage-i torus ``T_i``."""
    if not in_sublattice(level, a, i) or not in_sublattice(level, b, i):
        raise NotInSublattice(f"{tuple(a)} or {tuple(b)} not in V_{i}")
    m = level.m
    dx = abs(a[0] - b[0]) % m
    dy = abs(a[1] - b[1]) % m
    return (min(dx, m - dx) + min(dy, m - dy)) // level.spacing(i)


def cell_side_indices(level: TorusLevel, anchor, side: str, g: int) -> list[int]:
    """Edge indices of a straight side of the g-by-g cell anchored at ``anchor``."""
    m = level.m
    x0, y0 = anchor
    if side == "t":
        return [(y0 % m) * m + (x0 + j) % m for j in range(g)]
    if side == "b":
        return [((y0 + g) % m) * m + (x0 + j) % m for j in range(g)]
    if side == "l":
        return [m * m + ((y0 + j) % m) * m + x0 % m for j in range(g)]
    if side == "r":
        return [m * m + ((y0 + j) % m) * m + (x0 + g) % m for j in range(g)]
    raise ValueError(f"side must be one of t, b, l, r; got {side!r}")


def lift_cell_side(level: TorusLevel, anchor, side: str, g: int) -> EdgeSet:
    return EdgeSet.from_indices(level, cell_side_indices(level, anchor, side, g))


def faces(level: TorusLevel) -> Iterator[EdgeSet]:
    """All m**2 unit faces, in row-major order of their anchors."""
    m = level.m
    for y in range(m):
        for x in range(m):
            yield EdgeSet.from_indices(
                level,
                [
                    y * m + x,
                    ((y + 1) % m) * m + x,
                    m * m + y * m + x,
                    m * m + y * m + (x + 1) % m,
                ],
            )


def full_row(level: TorusLevel, y: int = 0) -> EdgeSet:
    m = level.m
    return EdgeSet.from_indices(level, (y * m + x for x in range(m)))


def full_column(level: TorusLevel, x: int = 0) -> EdgeSet:
    m = level.m
    return EdgeSet.from_indices(level, (m * m + y * m + x for y in range(m)))
