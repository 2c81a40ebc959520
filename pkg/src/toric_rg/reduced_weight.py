"""Path/cycle partitions of intermediate errors and their reduced weight.

An error is split into edge-disjoint trails: open ones (paths) joining
syndrome vertices and closed ones (cycles). Each reduction stage adds the
decoder's sides to the error; the partition is carried along by splicing
the fired rules into existing trails and cancelling doubled edges. The
reduced weight charges a path the stage-i distance between its endpoints
and a cycle the length of the shortest cycle in its homology class on
``T_i``. ``wt_r + P`` (P = number of paths) should grow by at least 6/5
per stage going backwards from the coarsest stage.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _purepy
from .decoder import DecodeTrace, decode_with_trace
from .errors import ContractViolation, TraceMismatch
from .lattice import (
    EdgeSet,
    HomologyClass,
    TorusLevel,
    edge_endpoints,
    syndrome,
    vertex_from_id,
)
from .montecarlo import sample_bitflip

GROWTH = Fraction(6, 5)


@dataclass(frozen=True)
class Trail:
    """A walk given by its vertex ids and the edge ids between them."""

    verts: tuple
    edges: tuple

    @property
    def closed(self) -> bool:
        return self.verts[0] == self.verts[-1]

    @property
    def ends(self) -> tuple[int, int]:
        return self.verts[0], self.verts[-1]

    def reversed(self) -> "Trail":
        return Trail(self.verts[::-1], self.edges[::-1])

    def __add__(self, other: "Trail") -> "Trail":
        if self.verts[-1] != other.verts[0]:
            raise ContractViolation("trails do not meet")
        return Trail(self.verts + other.verts[1:], self.edges + other.edges)

    def oriented_to_end_at(self, v: int) -> "Trail":
        return self if self.verts[-1] == v else self.reversed()

    def rotated(self, p: int) -> "Trail":
        """Closed trail restarted at ``verts[p]``."""
        return Trail(self.verts[p:] + self.verts[1 : p + 1], self.edges[p:] + self.edges[:p])


def _point(v: int) -> Trail:
    return Trail((v,), ())


@dataclass(frozen=True)
class PathPartition:
    """Edge-disjoint paths and cycles covering an error at stage ``stage``."""

    level: TorusLevel
    stage: int
    paths: tuple  # of Trail, open
    cycles: tuple  # of Trail, closed

    @property
    def P(self) -> int:
        return len(self.paths)

    def edge_set(self) -> EdgeSet:
        idx = [e for t in self.paths + self.cycles for e in t.edges]
        return EdgeSet.from_indices(self.level, idx)

    def endpoints(self) -> list[tuple[int, int]]:
        return [t.ends for t in self.paths]

    def cycle_classes(self) -> list[HomologyClass]:
        return [_trail_class(self.level, t) for t in self.cycles]

    def syndrome_ids(self) -> set[int]:
        out: set[int] = set()
        for a, b in self.endpoints():
            out ^= {a}
            out ^= {b}
        return out

    def validate(self, e: EdgeSet | None = None) -> None:
        """Raise ContractViolation unless this is a sound partition (of ``e``)."""
        seen: set[int] = set()
        for t in self.paths + self.cycles:
            if not t.edges:
                raise ContractViolation("empty trail in partition")
            for j, ed in enumerate(t.edges):
                if ed in seen:
                    raise ContractViolation(f"edge {ed} used twice")
                seen.add(ed)
                if set(edge_endpoints(self.level, ed)) != {t.verts[j], t.verts[j + 1]}:
                    raise ContractViolation(f"edge {ed} does not join consecutive trail vertices")
        for t in self.paths:
            if t.closed:
                raise ContractViolation("closed trail listed as a path")
        for t in self.cycles:
            if not t.closed:
                raise ContractViolation("open trail listed as a cycle")
        g = self.level.spacing(self.stage)
        m = self.level.m
        for a, b in self.endpoints():
            for v in (a, b):
                if (v % m) % g or (v // m) % g:
                    raise ContractViolation(f"path endpoint {tuple(vertex_from_id(self.level, v))} not in V_{self.stage}")
        if e is not None:
            if self.edge_set() != e:
                raise ContractViolation("partition does not cover the error exactly")
            if self.syndrome_ids() != syndrome(e).ids():
                raise ContractViolation("path endpoints do not match the syndrome")


def _trail_class(level: TorusLevel, t: Trail) -> HomologyClass:
    m = level.m
    mm = m * m
    wh = wv = 0
    for e in t.edges:
        if e < mm:
            wh ^= (e % m) == m - 1
        else:
            wv ^= (e - mm) // m == m - 1
    return HomologyClass(int(wh), int(wv))


@dataclass(frozen=True)
class ReducedWeight:
    wt_r: int
    P: int

    @property
    def combined(self) -> int:
        return self.wt_r + self.P


def _distance(m: int, g: int, a: int, b: int) -> int:
    dx = abs(a % m - b % m)
    dy = abs(a // m - b // m)
    return (min(dx, m - dx) + min(dy, m - dy)) // g


def reduced_weight(pp: PathPartition) -> ReducedWeight:
    """Endpoint distances on ``T_i`` plus ``2**i`` per winding direction of each cycle."""
    level, i = pp.level, pp.stage
    g = level.spacing(i)
    wt = sum(_distance(level.m, g, a, b) for a, b in pp.endpoints())
    for c in pp.cycle_classes():
        wt += (1 << i) * (c.windH + c.windV)
    return ReducedWeight(wt, pp.P)


# ---------------------------------------------------------------------------
# Canonical partition


def canonical_partition(e: EdgeSet, stage: int | None = None) -> PathPartition:
    """Greedy trail decomposition.

    Paths: from the least odd-degree vertex, repeatedly take the least unused
    incident edge until another odd-degree vertex is reached. Then cycles:
    from the tail of the least unused edge, walk the same way until the start
    is reached again.
    """
    level = e.level
    if stage is None:
        stage = level.k
    inc: dict[int, list[int]] = {}
    for ed in e.indices().tolist():
        a, b = edge_endpoints(level, ed)
        inc.setdefault(a, []).append(ed)
        inc.setdefault(b, []).append(ed)
    unused = set(e.indices().tolist())
    deg = {v: len(es) for v, es in inc.items()}

    def other(ed, v):
        a, b = edge_endpoints(level, ed)
        return b if a == v else a

    def step(v):
        for ed in inc[v]:
            if ed in unused:
                return ed
        raise ContractViolation(f"walk stuck at vertex {v}")

    def take(ed):
        unused.discard(ed)
        for w in edge_endpoints(level, ed):
            deg[w] -= 1

    paths = []
    while True:
        odd = [v for v, d in deg.items() if d % 2]
        if not odd:
            break
        start = min(odd)
        targets = set(odd) - {start}
        verts, edges = [start], []
        v = start
        while True:
            ed = step(v)
            take(ed)
            v = other(ed, v)
            verts.append(v)
            edges.append(ed)
            if v in targets:
                break
        paths.append(Trail(tuple(verts), tuple(edges)))

    cycles = []
    while unused:
        ed = min(unused)
        start = edge_endpoints(level, ed)[0]
        take(ed)
        v = other(ed, start)
        verts, edges = [start, v], [ed]
        while v != start:
            ed = step(v)
            take(ed)
            v = other(ed, v)
            verts.append(v)
            edges.append(ed)
        cycles.append(Trail(tuple(verts), tuple(edges)))
    return PathPartition(level, stage, tuple(paths), tuple(cycles))


# ---------------------------------------------------------------------------
# Induced partition


def _side_walk(m: int, g: int, side, start: int) -> Trail:
    o, x0, y0 = side
    if o == "H":
        verts = tuple(y0 * m + (x0 + j) % m for j in range(g + 1))
        edges = tuple(y0 * m + x0 + j for j in range(g))
    else:
        verts = tuple(((y0 + j) % m) * m + x0 for j in range(g + 1))
        edges = tuple(m * m + (y0 + j) * m + x0 for j in range(g))
    t = Trail(verts, edges)
    if verts[0] == start:
        return t
    if verts[-1] == start:
        return t.reversed()
    raise ContractViolation("side does not touch the waypoint")


def event_walk(m: int, g: int, ev) -> Trail:
    """Unit-edge walk of a fired rule from its source ``u`` to its target ``v``."""
    walk = _point(ev.waypoints[0])
    for w, side in zip(ev.waypoints, ev.sides):
        walk = walk + _side_walk(m, g, side, w)
    return walk


class _Splicer:
    """Mutable list of trails with mod-2 edge cancellation."""

    def __init__(self, trails):
        self.trails = [t for t in trails if t.edges]

    def open_at(self, v, exclude=None):
        for j, t in enumerate(self.trails):
            if j != exclude and not t.closed and v in t.ends:
                return j
        return None

    def replace(self, drop, new):
        """Remove trails at indices ``drop``; insert ``new`` at the first dropped position."""
        drop = sorted(set(drop))
        pos = drop[0]
        for j in reversed(drop):
            del self.trails[j]
        self.trails[pos:pos] = [t for t in new if t.edges]

    def splice(self, ev, walk: Trail):
        u, v = walk.verts[0], walk.verts[-1]
        ju = self.open_at(u)
        if ju is None:
            raise ContractViolation(f"no path ends at rule source {u}")
        pu = self.trails[ju].oriented_to_end_at(u)
        joined = pu + walk
        drop = [ju]
        if not joined.closed:
            jv = self.open_at(v, exclude=ju)
            if jv is None and ev.kind == "pair":
                raise ContractViolation(f"no path ends at rule target {v}")
            if jv is not None:
                joined = joined + self.trails[jv].oriented_to_end_at(v).reversed()
                drop.append(jv)
        self.replace(drop, [joined])
        self.cancel()

    def _first_duplicate(self):
        where: dict[int, list[tuple[int, int]]] = {}
        for j, t in enumerate(self.trails):
            for p, ed in enumerate(t.edges):
                where.setdefault(ed, []).append((j, p))
        dups = [ed for ed, occ in where.items() if len(occ) > 1]
        if not dups:
            return None
        ed = min(dups)
        return where[ed][0], where[ed][1]

    def cancel(self):
        while True:
            dup = self._first_duplicate()
            if dup is None:
                return
            (j1, p1), (j2, p2) = dup
            if j1 == j2:
                t = self.trails[j1]
                if t.closed:
                    t = t.rotated(p1)
                    p2 -= p1
                    if p2 < 0:
                        p2 += len(t.edges)
                    p1 = 0
                a = Trail(t.verts[: p1 + 1], t.edges[:p1])
                b = Trail(t.verts[p1 + 1 : p2 + 1], t.edges[p1 + 1 : p2])
                c = Trail(t.verts[p2 + 1 :], t.edges[p2 + 1 :])
                if t.verts[p1] == t.verts[p2 + 1]:
                    new = [a + c, b]  # traversed in opposite directions
                else:
                    new = [a + b.reversed() + c]
                self.replace([j1], new)
            else:
                t1, t2 = self.trails[j1], self.trails[j2]
                if t1.closed and not t2.closed:
                    t1, t2, p1, p2 = t2, t1, p2, p1
                a1, b1, x1 = _cut(t1, p1)
                a2, b2, x2 = _cut(t2, p2)
                if t2.closed:
                    # b2 is the rest of the loop; splice it in where the edge was
                    loop = b2.reversed() if x1 == x2 else b2
                    new = [a1 + loop + b1]
                elif x1 == x2:
                    new = [a1 + a2.reversed(), b1.reversed() + b2]
                else:
                    new = [a1 + b2, a2 + b1]
                self.replace([j1, j2], new)


def _cut(t: Trail, p: int):
    """Split ``t`` at its ``p``-th edge; returns (part ending at tail, part starting at head, tail)."""
    x = t.verts[p]
    if t.closed:
        r = t.rotated(p)
        return _point(x), Trail(r.verts[1:], r.edges[1:]), x
    return Trail(t.verts[: p + 1], t.edges[:p]), Trail(t.verts[p + 1 :], t.edges[p + 1 :]), x


def induced_partition(pp: PathPartition, e_hat: EdgeSet | None = None, events=None) -> PathPartition:
    """Carry ``pp`` (stage i+1) through one decoder stage to stage i.

    The stage's fired rules are recomputed from the partition's syndrome;
    their sides must XOR to ``e_hat`` (TraceMismatch otherwise). Rules are
    spliced in firing order: a pair joins the least-indexed paths ending at
    its two vertices (closing a cycle when that is one path), a shift
    extends the path ending at its source and fuses it with a path already
    ending at the target. Doubled edges are removed by cutting both trails at
    the least such edge and regluing the four pieces consistently.
    """
    level = pp.level
    s = pp.stage
    if s < 1:
        raise ValueError("no stage below 0")
    m = level.m
    g = level.spacing(s)
    if events is None:
        synd = pp.syndrome_ids()
        for v in synd:
            if (v % m) % g or (v // m) % g:
                raise TraceMismatch(f"partition endpoint {v} is not in V_{s}")
        events, _ = _purepy.stage_events(synd, m, g)
    if e_hat is not None:
        bits = np.zeros(level.n, dtype=np.uint8)
        _purepy.apply_events(bits, m, g, events)
        if not np.array_equal(bits, e_hat.bits):
            raise TraceMismatch(f"decoder output of stage {s} does not match the partition's syndrome")
    sp = _Splicer(pp.paths + pp.cycles)
    for ev in events:
        sp.splice(ev, event_walk(m, g, ev))
    paths = tuple(t for t in sp.trails if not t.closed)
    cycles = tuple(t for t in sp.trails if t.closed)
    return PathPartition(level, s - 1, paths, cycles)


# ---------------------------------------------------------------------------
# Growth check


@dataclass(frozen=True)
class StageWeight:
    stage: int
    wt_r: int
    P: int
    hamming: int
    ratio_to_next: Fraction | None  # combined(stage) / combined(stage - 1)
    flagged: bool
    nontrivial_cycles: int = 0

    @property
    def combined(self) -> int:
        return self.wt_r + self.P


@dataclass
class Lemma4Report:
    k: int
    stages: list[StageWeight]
    partitions: list[PathPartition]

    @property
    def flagged(self) -> list[int]:
        return [s.stage for s in self.stages if s.flagged]

    @property
    def min_ratio(self) -> Fraction | None:
        rs = [s.ratio_to_next for s in self.stages if s.ratio_to_next is not None and s.stage - 1 >= 1]
        return min(rs) if rs else None

    def diagnose(self) -> list[str]:
        """One line per flagged stage describing what happened there."""
        out = []
        for j, st in enumerate(self.stages):
            if not st.flagged:
                continue
            nxt = self.stages[j + 1]
            if nxt.nontrivial_cycles > st.nontrivial_cycles:
                kind = "paths closed into a non-trivial cycle"
            else:
                kind = "other"
            out.append(
                f"stage {st.stage}->{nxt.stage}: combined {st.combined}->{nxt.combined} "
                f"(P {st.P}->{nxt.P}, non-trivial cycles {st.nontrivial_cycles}->{nxt.nontrivial_cycles}); {kind}"
            )
        return out

    def to_csv(self) -> str:
        return stage_csv(self.stages)


STAGE_HEADER = ["stage", "wt_r", "P", "combined", "ratio_to_next"]


def _fmt_ratio(r: Fraction | None) -> str:
    return "" if r is None else f"{float(r):.6f}"


def stage_csv(stages, extra_cols=()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(extra_cols) + STAGE_HEADER)
    for s in stages:
        w.writerow([s.stage, s.wt_r, s.P, s.combined, _fmt_ratio(s.ratio_to_next)])
    return buf.getvalue()


def partition_chain(e: EdgeSet, trace: DecodeTrace | None = None, validate: bool = True) -> list[PathPartition]:
    """Partitions of e_k, e_{k-1}, ..., e_0 (stages with no rules pass through)."""
    level = e.level
    if trace is None:
        trace = decode_with_trace(syndrome(e))
    if trace.syndrome_in != syndrome(e):
        raise TraceMismatch("trace was not produced from this error's syndrome")
    recs = trace.stage_map()
    pp = canonical_partition(e)
    cur = e
    if validate:
        pp.validate(cur)
    chain = [pp]
    for s in range(level.k, 0, -1):
        rec = recs.get(s)
        e_hat = rec.e_hat if rec is not None else EdgeSet.empty(level)
        pp = induced_partition(pp, e_hat)
        cur = cur ^ e_hat
        if validate:
            pp.validate(cur)
        chain.append(pp)
    return chain


def check_lemma4(trace: DecodeTrace | None, e: EdgeSet, validate: bool = True) -> Lemma4Report:
    """Per-stage ``wt_r + P`` along the partition chain of ``e``.

    A stage i+1 (with i >= 1) is flagged when ``combined(i) > 0`` and
    ``combined(i+1) < 6/5 * combined(i)``. The last transition, into stage
    0, is reported but never flagged.
    """
    chain = partition_chain(e, trace, validate)
    weights = [reduced_weight(pp) for pp in chain]
    stages = []
    for j, (pp, rw) in enumerate(zip(chain, weights)):
        ratio = None
        flagged = False
        if j + 1 < len(chain):
            nxt = weights[j + 1].combined
            if nxt > 0:
                ratio = Fraction(rw.combined, nxt)
                flagged = pp.stage - 1 >= 1 and ratio < GROWTH
        nontrivial = sum(not c.trivial for c in pp.cycle_classes())
        stages.append(StageWeight(pp.stage, rw.wt_r, rw.P, pp.edge_set().weight, ratio, flagged, nontrivial))
    return Lemma4Report(e.level.k, stages, chain)


def lemma4_sample(k: int, p: float, seed) -> Lemma4Report:
    """Growth check on one bit-flip sample drawn from ``seed``."""
    e = sample_bitflip(TorusLevel(k), p, seed)
    return check_lemma4(None, e)


__all__ = [
    "GROWTH",
    "Lemma4Report",
    "PathPartition",
    "ReducedWeight",
    "StageWeight",
    "Trail",
    "canonical_partition",
    "check_lemma4",
    "event_walk",
    "induced_partition",
    "lemma4_sample",
    "partition_chain",
    "reduced_weight",
    "stage_csv",
]
