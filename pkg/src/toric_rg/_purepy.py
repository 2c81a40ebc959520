"""Pure-Python decoding kernels.

This module is the fallback used when the compiled ``_kernels`` extension is
unavailable, and it is also the reference engine for everything that needs
more than the decoder's output bits: per-rule events (for partition
tracking), custom block orders, conflict checking and sparse decoding of
low-weight errors on very large tori.

Vertices are plain ints ``y * m + x``; edges are ints with horizontal edges
``H(x, y) = y * m + x`` first and vertical edges ``V(x, y) = m*m + y * m + x``
after them. A cell side is the triple ``(orientation, x0, y0)``; its length
``g`` is implied by the stage.

Rules only ever fire in blocks that contain a syndrome vertex, so instead of
scanning every block the engine maps each snapshot vertex to the (unique)
cell of the relevant type having it as a corner. The set of fired rules is
the same as a full scan.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ContractViolation


class Event(NamedTuple):
    """One fired rule of the reduction procedure."""

    step: int
    cell: str
    kind: str  # "pair" or "shift"
    waypoints: tuple  # vertex ids; consecutive waypoints are joined by a side
    sides: tuple  # ((orientation, x0, y0), ...), len(waypoints) - 1 entries

    @property
    def u(self) -> int:
        return self.waypoints[0]

    @property
    def v(self) -> int:
        return self.waypoints[-1]


# Cell offsets (in units of g) of the four cells inside a block.
_CELL_OFFSET = {"A": (0, 0), "B": (1, 0), "C": (0, 1), "D": (1, 1)}


def _corners(m, g, x0, y0):
    x1 = (x0 + g) % m
    y1 = (y0 + g) % m
    return (y0 * m + x0, y0 * m + x1, y1 * m + x0, y1 * m + x1)


def _sides(m, g, x0, y0):
    x1 = (x0 + g) % m
    y1 = (y0 + g) % m
    return {"t": ("H", x0, y0), "b": ("H", x0, y1), "l": ("V", x0, y0), "r": ("V", x1, y0)}


def _cell_block(m, g, v, cell):
    """Block (by, bx) whose ``cell`` has vertex ``v`` as a corner."""
    nb = m // (2 * g)
    ox, oy = _CELL_OFFSET[cell]
    X = (v % m) // g
    Y = (v // m) // g
    return ((Y - oy) // 2) % nb, ((X - ox) // 2) % nb


def _fire_D(m, g, x0, y0, snap, out):
    a, b, c, d = _corners(m, g, x0, y0)
    s = _sides(m, g, x0, y0)
    if a in snap and d in snap:
        out.append(Event(1, "D", "pair", (a, c, d), (s["l"], s["b"])))
    if b in snap and c in snap:
        out.append(Event(1, "D", "pair", (b, d, c), (s["r"], s["b"])))


def _fire_C(m, g, x0, y0, snap, out):
    a, b, c, d = _corners(m, g, x0, y0)
    s = _sides(m, g, x0, y0)
    if a in snap and c in snap:
        out.append(Event(2, "C", "pair", (a, c), (s["l"],)))
    if b in snap and d in snap:
        out.append(Event(2, "C", "pair", (b, d), (s["r"],)))


def _fire_B(m, g, x0, y0, snap, out):
    a, b, c, d = _corners(m, g, x0, y0)
    s = _sides(m, g, x0, y0)
    if a in snap and b in snap:
        out.append(Event(2, "B", "pair", (a, b), (s["t"],)))
    if c in snap and d in snap:
        out.append(Event(2, "B", "pair", (c, d), (s["b"],)))


def _fire_A(m, g, x0, y0, snap, out):
    a, b, c, d = _corners(m, g, x0, y0)
    s = _sides(m, g, x0, y0)
    if b in snap:
        out.append(Event(3, "A", "shift", (b, a), (s["t"],)))
    if c in snap:
        out.append(Event(3, "A", "shift", (c, a), (s["l"],)))
    if d in snap:
        out.append(Event(3, "A", "shift", (d, c, a), (s["b"], s["l"])))


def stage_events(S, m, g, skip=(), order=None, check=False):
    """Run one reduction stage on the syndrome vertex set ``S``.

    Returns ``(events, S_next)``. Within a step every rule reads the snapshot
    taken at the start of that step; the working syndrome is updated only
    between steps by toggling the endpoints of each fired rule.

    ``order`` may be a callable mapping the sorted list of candidate blocks to
    the order they are visited in. ``check`` enables the no-conflict
    assertion (each snapshot vertex in at most one fired rule per step).
    """
    cur = set(S)
    events = []
    for step, cells in ((1, ("D",)), (2, ("C", "B")), (3, ("A",))):
        if step in skip:
            continue
        snap = frozenset(cur)
        if not snap:
            break
        blocks = set()
        for v in snap:
            if step == 3 and (v % m) % (2 * g) == 0 and (v // m) % (2 * g) == 0:
                continue
            for cell in cells:
                blocks.add(_cell_block(m, g, v, cell))
        visit = sorted(blocks)
        if order is not None:
            visit = order(visit)
        fired = []
        for by, bx in visit:
            X0 = 2 * g * bx
            Y0 = 2 * g * by
            for cell in cells:
                ox, oy = _CELL_OFFSET[cell]
                x0 = (X0 + ox * g) % m
                y0 = (Y0 + oy * g) % m
                if cell == "D":
                    _fire_D(m, g, x0, y0, snap, fired)
                elif cell == "C":
                    _fire_C(m, g, x0, y0, snap, fired)
                elif cell == "B":
                    _fire_B(m, g, x0, y0, snap, fired)
                else:
                    _fire_A(m, g, x0, y0, snap, fired)
        if check:
            used = set()
            for ev in fired:
                for w in (ev.u, ev.v) if ev.kind == "pair" else (ev.u,):
                    if w in used:
                        raise ContractViolation(
                            f"vertex {w} used by two rules in step {step} (g={g})"
                        )
                    used.add(w)
        for ev in fired:
            cur ^= {ev.u}
            cur ^= {ev.v}
        events.extend(fired)
    return events, cur


def decode_events(S, m, k, skip=(), order=None, check=False):
    """Full decode on a vertex set; returns a list of ``(stage, events, S_after)``."""
    out = []
    cur = set(S)
    i = k
    while cur and i > 0:
        g = 1 << (k - i)
        events, cur = stage_events(cur, m, g, skip=skip, order=order, check=check)
        out.append((i, events, cur))
        i -= 1
    return out


def side_edge_slice(m, side, g):
    """Index slice of the ``g`` unit edges of ``side`` in the edge vector."""
    o, x0, y0 = side
    if o == "H":
        base = y0 * m + x0
        return slice(base, base + g)
    base = m * m + y0 * m + x0
    return slice(base, base + g * m, m)


def side_edges(m, side, g):
    return range(*side_edge_slice(m, side, g).indices(2 * m * m))


def apply_events(ebits, m, g, events):
    for ev in events:
        for side in ev.sides:
            ebits[side_edge_slice(m, side, g)] ^= 1


# ---------------------------------------------------------------------------
# Dense interface shared with the compiled extension.


def syndrome(bits, m):
    """Odd-degree vertex indicator (uint8, length m*m) of an edge vector."""
    bits = np.asarray(bits, dtype=np.uint8)
    H = bits[: m * m].reshape(m, m)
    V = bits[m * m :].reshape(m, m)
    s = H ^ np.roll(H, 1, axis=1) ^ V ^ np.roll(V, 1, axis=0)
    return s.reshape(-1).astype(np.uint8)


def reduce_stage(synd, m, g, ebits, skip1=False, skip2=False):
    """Dense reduction stage; flips into ``ebits`` in place, returns new syndrome."""
    skip = _skip(skip1, skip2)
    S = set(np.flatnonzero(synd).tolist())
    events, S_next = stage_events(S, m, g, skip=skip)
    apply_events(ebits, m, g, events)
    out = np.zeros(m * m, dtype=np.uint8)
    if S_next:
        out[list(S_next)] = 1
    return out


def decode(synd, m, k, skip1=False, skip2=False):
    """Dense full decode; returns the correction as a uint8 edge vector."""
    skip = _skip(skip1, skip2)
    ebits = np.zeros(2 * m * m, dtype=np.uint8)
    S = set(np.flatnonzero(synd).tolist())
    for i, events, _ in decode_events(S, m, k, skip=skip):
        apply_events(ebits, m, 1 << (k - i), events)
    return ebits


def homology(bits, m):
    """Winding parities (windH, windV) of an edge vector."""
    windH = int(bits[m - 1 : m * m : m].sum() & 1)
    windV = int(bits[m * m + (m - 1) * m : 2 * m * m].sum() & 1)
    return windH, windV


def trial_fails(bits, m, k):
    """Decode the syndrome of ``bits`` and report a nontrivial residual."""
    bits = np.asarray(bits, dtype=np.uint8)
    ebits = decode(syndrome(bits, m), m, k)
    return homology(bits ^ ebits, m) != (0, 0)


def _skip(skip1, skip2):
    return tuple(s for s, on in ((1, skip1), (2, skip2)) if on)


# ---------------------------------------------------------------------------
# Sparse residual class for low-weight errors; never materialises n bits.


def sparse_syndrome(m, edges):
    S = set()
    mm = m * m
    for e in edges:
        if e < mm:
            x, y = e % m, e // m
            ends = (e, y * m + (x + 1) % m)
        else:
            f = e - mm
            x, y = f % m, f // m
            ends = (f, ((y + 1) % m) * m + x)
        S ^= {ends[0]}
        S ^= {ends[1]}
    return S


def residual_class(m, k, edges, skip=()):
    """Homology class of ``e + decode(syndrome(e))`` for a sparse error ``e``.

    The winding parities are linear, so they are summed over the error edges
    and the decoder's cell sides without building the residual edge set.
    """
    mm = m * m
    wh = wv = 0
    for e in edges:
        if e < mm:
            wh ^= (e % m) == m - 1
        else:
            wv ^= (e - mm) // m == m - 1
    S = sparse_syndrome(m, edges)
    for i, events, _ in decode_events(S, m, k, skip=skip):
        g = 1 << (k - i)
        for ev in events:
            for o, x0, y0 in ev.sides:
                if o == "H":
                    wh ^= x0 + g == m
                else:
                    wv ^= y0 + g == m
    return int(wh), int(wv)
