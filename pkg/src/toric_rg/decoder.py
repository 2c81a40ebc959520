"""Hard-decision renormalisation decoder.

Each stage ``i`` (from ``k`` down to 1) views the torus as blocks of side
``2g`` with ``g = 2**(k-i)``, each block split into cells A (top-left),
B (top-right), C (bottom-left) and D (bottom-right). Three steps run in order:

1. D cells pair diagonal corners (alpha-delta via l+b, beta-gamma via b+r).
2. C cells pair alpha-gamma via l and beta-delta via r; B cells pair
   alpha-beta via t and gamma-delta via b.
3. A cells shift beta via t, gamma via l and delta via l+b onto alpha.

All rules in a step read the syndrome as it stood when the step began, and
their edge flips accumulate mod 2, so the block visiting order never matters.
After the stage the syndrome lies on the coarser sublattice ``V_{i-1}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from . import _backend, _purepy
from .errors import ContractViolation, InvalidSyndrome
from .lattice import (
    EdgeSet,
    SyndromeSet,
    TorusLevel,
    VertexCoord,
    in_sublattice,
)

STEPS = {"step1": 1, "step2": 2}


@dataclass(frozen=True)
class Cell:
    name: str
    anchor: VertexCoord
    g: int
    m: int

    def _v(self, dx, dy):
        return VertexCoord((self.anchor.x + dx) % self.m, (self.anchor.y + dy) % self.m)

    @property
    def alpha(self):
        return self._v(0, 0)

    @property
    def beta(self):
        return self._v(self.g, 0)

    @property
    def gamma(self):
        return self._v(0, self.g)

    @property
    def delta(self):
        return self._v(self.g, self.g)

    def corners(self):
        return (self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class Block:
    """A 2g-by-2g block of stage ``i`` and its four g-by-g cells."""

    stage: int
    bx: int
    by: int
    g: int
    m: int

    @property
    def anchor(self) -> VertexCoord:
        return VertexCoord(2 * self.g * self.bx, 2 * self.g * self.by)

    def cell(self, name: str) -> Cell:
        ox, oy = {"A": (0, 0), "B": (1, 0), "C": (0, 1), "D": (1, 1)}[name]
        a = self.anchor
        return Cell(name, VertexCoord((a.x + ox * self.g) % self.m, (a.y + oy * self.g) % self.m), self.g, self.m)


def blocks(level: TorusLevel, i: int) -> Iterator[Block]:
    """Blocks of stage ``i`` in row-major order of (by, bx)."""
    g = level.spacing(i)
    nb = level.m // (2 * g)
    for by in range(nb):
        for bx in range(nb):
            yield Block(i, bx, by, g, level.m)


@dataclass(frozen=True)
class StageRecord:
    stage: int
    e_hat: EdgeSet
    syndrome_after: SyndromeSet


@dataclass
class DecodeTrace:
    """Per-stage record of a decoding run, finest stage first."""

    level: TorusLevel
    syndrome_in: SyndromeSet
    records: list[StageRecord] = field(default_factory=list)

    @property
    def e_hat(self) -> EdgeSet:
        bits = np.zeros(self.level.n, dtype=np.uint8)
        for r in self.records:
            bits ^= r.e_hat.bits
        return EdgeSet(self.level, bits)

    def stage_map(self) -> dict[int, StageRecord]:
        return {r.stage: r for r in self.records}


def _skip_flags(skip) -> tuple[bool, bool]:
    skip = set(skip or ())
    unknown = skip - set(STEPS)
    if unknown:
        raise ValueError(f"can only skip {sorted(STEPS)}, got {sorted(unknown)}")
    return "step1" in skip, "step2" in skip


def _check_syndrome(s: SyndromeSet, i: int):
    if len(s) % 2:
        raise InvalidSyndrome(f"syndrome has odd cardinality {len(s)}")
    for v in s.vertices:
        if not in_sublattice(s.level, v, i):
            raise InvalidSyndrome(f"syndrome vertex {tuple(v)} not in V_{i}")


def reduce_stage(s: SyndromeSet, i: int, skip=()) -> tuple[EdgeSet, SyndromeSet]:
    """One reduction stage: returns ``(e_hat_i, s_{i-1})``."""
    level = s.level
    _check_syndrome(s, i)
    skip1, skip2 = _skip_flags(skip)
    ebits = np.zeros(level.n, dtype=np.uint8)
    nxt = _backend.kernels.reduce_stage(s.to_array(), level.m, level.spacing(i), ebits, skip1, skip2)
    return EdgeSet(level, ebits), SyndromeSet.from_array(level, nxt)


def decode(s: SyndromeSet, skip=()) -> EdgeSet:
    """Correction ``e_hat`` with ``syndrome(e_hat) == s``."""
    level = s.level
    _check_syndrome(s, level.k)
    skip1, skip2 = _skip_flags(skip)
    ebits = _backend.kernels.decode(s.to_array(), level.m, level.k, skip1, skip2)
    return EdgeSet(level, ebits)


def decode_with_trace(s: SyndromeSet, skip=(), check: bool = True) -> DecodeTrace:
    """Decode while recording ``(i, e_hat_i, s_{i-1})`` for every executed stage.

    With ``check`` set, each stage output is verified to lie in ``V_{i-1}``
    and the final syndrome to be empty.
    """
    level = s.level
    _check_syndrome(s, level.k)
    skip1, skip2 = _skip_flags(skip)
    trace = DecodeTrace(level, s)
    arr = s.to_array()
    i = level.k
    while arr.any() and i > 0:
        ebits = np.zeros(level.n, dtype=np.uint8)
        arr = _backend.kernels.reduce_stage(arr, level.m, level.spacing(i), ebits, skip1, skip2)
        after = SyndromeSet.from_array(level, arr)
        if check:
            for v in after.vertices:
                if not in_sublattice(level, v, i - 1):
                    raise ContractViolation(f"stage {i} left {tuple(v)} outside V_{i - 1}")
        trace.records.append(StageRecord(i, EdgeSet(level, ebits), after))
        i -= 1
    if check and arr.any():
        raise ContractViolation("final syndrome s_0 is not empty")
    return trace


def stage_events(s: SyndromeSet, i: int, skip=(), block_order: Callable | None = None, check: bool = False):
    """Fired rules of one stage, via the reference engine.

    ``block_order`` receives the row-major list of candidate ``(by, bx)``
    blocks for a step and returns them in the order to visit.
    """
    level = s.level
    _check_syndrome(s, i)
    skip1, skip2 = _skip_flags(skip)
    return _purepy.stage_events(
        s.ids(), level.m, level.spacing(i), skip=_purepy._skip(skip1, skip2), order=block_order, check=check
    )


def decode_reference(s: SyndromeSet, skip=(), block_order: Callable | None = None, check: bool = True) -> EdgeSet:
    """Decode with the pure-Python engine, optionally in a custom block order.

    ``check`` asserts that no snapshot vertex is used by two rules in a
    step; it is only meaningful for the full (non-ablated) decoder.
    """
    level = s.level
    _check_syndrome(s, level.k)
    skip1, skip2 = _skip_flags(skip)
    ebits = np.zeros(level.n, dtype=np.uint8)
    stages = _purepy.decode_events(
        s.ids(), level.m, level.k, skip=_purepy._skip(skip1, skip2), order=block_order, check=check
    )
    for i, events, _ in stages:
        _purepy.apply_events(ebits, level.m, level.spacing(i), events)
    if stages and stages[-1][2]:
        raise ContractViolation("final syndrome s_0 is not empty")
    return EdgeSet(level, ebits)


def shuffled_order(rng: random.Random) -> Callable[[Sequence], list]:
    """Block-order hook that visits blocks in a random permutation."""

    def order(visit):
        visit = list(visit)
        rng.shuffle(visit)
        return visit

    return order
