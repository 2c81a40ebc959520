"""Worst-case analysis of the decoder.

Contents: the fractal row pattern that the decoder inflates into a
non-trivial cycle, a 1-D decoder restricted to the top row, exhaustive
radius searches in one and two dimensions, ablated decoders, and a bound
verification sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import numpy as np

from . import _purepy
from .decoder import decode
from .errors import ContractViolation, InvalidSyndrome, SearchBudgetExceeded
from .lattice import EdgeSet, SyndromeSet, TorusLevel, homology_class, syndrome

DEFAULT_BUDGET = 5_000_000


def u_seq(k: int) -> int:
    """Weight of the fractal wrongly decoded pattern: 1, 2, 3, then doubling every two levels."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k <= 3:
        return k
    return 2 * u_seq(k - 2)


def v_seq(k: int) -> Fraction:
    """Lower-bound sequence (6/5)**(k-1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(6, 5) ** (k - 1)


def largest_weight_below(x: Fraction) -> int:
    """Largest integer strictly less than ``x`` (i.e. ceil(x) - 1)."""
    return math.ceil(x) - 1


@dataclass(frozen=True)
class BoundSequences:
    k_max: int

    @property
    def u(self) -> list[int]:
        return [u_seq(k) for k in range(1, self.k_max + 1)]

    @property
    def v(self) -> list[Fraction]:
        return [v_seq(k) for k in range(1, self.k_max + 1)]


# ---------------------------------------------------------------------------
# Fractal pattern


def fractal_paths(k: int) -> list[tuple[int, int]]:
    """Row paths ``(first_edge, length)`` of the level-k fractal pattern.

    Level 1 is the first row edge, level 2 the first two. Afterwards a path
    of length 2 starting at ``a`` becomes one of length 3 starting at
    ``2a+1``, and a path of length 3 becomes two of length 2 starting at
    ``2a+1`` and ``2a+4``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return [(0, 1)]
    paths = [(0, 2)]
    for _ in range(3, k + 1):
        nxt = []
        for a, length in paths:
            if length == 2:
                nxt.append((2 * a + 1, 3))
            else:
                nxt.extend([(2 * a + 1, 2), (2 * a + 4, 2)])
        paths = nxt
    return paths


def fractal_error(k: int, validate: bool = True) -> EdgeSet:
    """Row-supported pattern of weight ``u_seq(k)`` that decodes to a full row."""
    level = TorusLevel(k)
    xs = [x for a, length in fractal_paths(k) for x in range(a, a + length)]
    e = EdgeSet.from_indices(level, xs)
    if validate:
        if e.weight != u_seq(k):
            raise ContractViolation(f"fractal weight {e.weight} != u_{k} = {u_seq(k)}")
        cls = _purepy.residual_class(level.m, k, xs)
        if cls != (1, 0):
            raise ContractViolation(f"fractal pattern at k={k} has residual class {cls}, expected (1, 0)")
    return e


def verify_fractal(k: int) -> dict:
    """Decode the fractal pattern with the dense decoder and describe the outcome."""
    e = fractal_error(k)
    level = e.level
    residual = e ^ decode(syndrome(e))
    cls = homology_class(residual)
    row = EdgeSet.from_indices(level, range(level.m))
    return {
        "k": k,
        "weight": e.weight,
        "u_k": u_seq(k),
        "paths": len(fractal_paths(k)),
        "residual_class": tuple(cls),
        "residual_is_row": residual == row,
        "failed": not cls.trivial,
    }


# ---------------------------------------------------------------------------
# 1-D decoder on the top row (y = 0)


def _rot_left(x: int, s: int, m: int, full: int) -> int:
    s %= m
    return ((x << s) | (x >> (m - s))) & full


def _odd_mask(m: int, g: int) -> int:
    mask = 0
    for j in range(g, m, 2 * g):
        mask |= 1 << j
    return mask


def decode_1d_mask(vertices: int, k: int) -> int:
    """Row decoder on bitmasks: vertex j is bit j, edge j is bit j (joins j and j+1).

    Per stage: pair odd-position vertices with their right neighbour via the
    connecting side, then shift any remaining odd-position vertex left.
    """
    m = 1 << k
    full = (1 << m) - 1
    S = vertices
    ebits = 0
    for i in range(k, 0, -1):
        if not S:
            break
        g = 1 << (k - i)
        run = (1 << g) - 1
        odd = _odd_mask(m, g)
        P = S & odd & _rot_left(S, m - g, m, full)
        ebits ^= P * run
        S ^= P ^ _rot_left(P, g, m, full)
        R = S & odd
        ebits ^= (R >> g) * run
        S ^= R ^ (R >> g)
    return ebits


def row_syndrome_mask(edges: int, m: int) -> int:
    full = (1 << m) - 1
    return (edges ^ _rot_left(edges, 1, m, full)) & full


def fails_1d(edges: int, k: int) -> bool:
    m = 1 << k
    full = (1 << m) - 1
    residual = edges ^ decode_1d_mask(row_syndrome_mask(edges, m), k)
    return residual == full


def decode_1d(s: Iterable[int], k: int) -> EdgeSet:
    """Decode a syndrome supported on row 0, given as x coordinates."""
    level = TorusLevel(k)
    xs = [int(x) for x in s]
    if len(set(xs)) != len(xs):
        raise InvalidSyndrome("repeated syndrome vertex")
    if len(xs) % 2:
        raise InvalidSyndrome(f"syndrome has odd cardinality {len(xs)}")
    mask = 0
    for x in xs:
        if not 0 <= x < level.m:
            raise InvalidSyndrome(f"row vertex {x} out of range")
        mask |= 1 << x
    ebits = decode_1d_mask(mask, k)
    return EdgeSet.from_indices(level, [x for x in range(level.m) if ebits >> x & 1])


# ---------------------------------------------------------------------------
# Radius searches


@dataclass
class RadiusReport:
    k: int
    mode: str  # "1d" or "2d"
    omega: int | None
    witness: EdgeSet | None
    w_max: int
    lower_bound: int
    patterns_checked: int
    exhaustive: bool = True
    failures_by_weight: dict[int, int] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.exhaustive and self.omega is not None


def _search(k, mode, N, w_max, fails, to_edgeset, budget, stop_at_witness):
    checked = 0
    witness = None
    omega = None
    lower = -1
    by_weight: dict[int, int] = {}
    for w in range(w_max + 1):
        if checked + math.comb(N, w) > budget:
            report = RadiusReport(k, mode, omega, witness, w_max, max(lower, 0), checked, True, by_weight)
            raise SearchBudgetExceeded(
                f"{mode} search at k={k}: weight {w} would exceed budget of {budget} patterns", report
            )
        nfail = 0
        for combo in combinations(range(N), w):
            checked += 1
            if fails(combo):
                nfail += 1
                if witness is None:
                    witness = to_edgeset(combo)
                    omega = w - 1
                if stop_at_witness:
                    break
        by_weight[w] = nfail
        if witness is None:
            lower = w
        elif stop_at_witness:
            break
    return RadiusReport(k, mode, omega, witness, w_max, max(lower, 0), checked, True, by_weight)


def radius_1d(k: int, w_max: int | None = None, budget: int = DEFAULT_BUDGET, stop_at_witness: bool = True) -> RadiusReport:
    """Smallest wrongly decoded row pattern, by enumeration in weight order.

    Every row pattern of weight below the witness weight is decoded; the
    witness is the lexicographically first failing pattern of that weight.
    """
    level = TorusLevel(k)
    m = level.m
    if w_max is None:
        w_max = u_seq(k)

    def fails(combo):
        mask = 0
        for x in combo:
            mask |= 1 << x
        return fails_1d(mask, k)

    return _search(k, "1d", m, w_max, fails, lambda c: EdgeSet.from_indices(level, c), budget, stop_at_witness)


def radius_2d(k: int, w_max: int, budget: int = DEFAULT_BUDGET, stop_at_witness: bool = True) -> RadiusReport:
    """Exhaustive search over all edge patterns of weight <= ``w_max``.

    Reports the exact radius if a failing pattern appears within ``w_max``,
    otherwise the certified lower bound ``omega >= w_max``. Weights are
    enumerated in increasing order; if the next weight would overrun
    ``budget`` the search stops with SearchBudgetExceeded carrying what was
    certified so far.
    """
    level = TorusLevel(k)
    m = level.m

    def fails(combo):
        return _purepy.residual_class(m, k, combo) != (0, 0)

    return _search(k, "2d", level.n, w_max, fails, lambda c: EdgeSet.from_indices(level, c), budget, stop_at_witness)


# ---------------------------------------------------------------------------
# Ablations


def ablation_decode(s: SyndromeSet, skip: Iterable[str]) -> EdgeSet:
    """The decoder with reduction ``step1`` and/or ``step2`` disabled."""
    return decode(s, skip=tuple(skip))


def ablation_fails(level: TorusLevel, edges, skip: Iterable[str]) -> bool:
    steps = tuple(int(s[-1]) for s in skip)
    return _purepy.residual_class(level.m, level.k, list(edges), skip=steps) != (0, 0)


def find_ablation_witness(k: int, skip: Iterable[str], weight: int, budget: int = DEFAULT_BUDGET) -> EdgeSet | None:
    """First pattern (lexicographic) of the given weight that the ablated decoder
    gets wrong while the full decoder corrects it."""
    level = TorusLevel(k)
    skip = tuple(skip)
    if math.comb(level.n, weight) > budget:
        raise SearchBudgetExceeded(f"ablation search at k={k}, weight {weight} exceeds budget {budget}")
    for combo in combinations(range(level.n), weight):
        if ablation_fails(level, combo, skip) and _purepy.residual_class(level.m, k, combo) == (0, 0):
            return EdgeSet.from_indices(level, combo)
    return None


# ---------------------------------------------------------------------------
# Bound verification


@dataclass
class BoundRow:
    k: int
    u_k: int
    v_k: Fraction
    witness_weight: int
    certified_lower: int
    certified_upper: int
    target_lower: int
    lower_method: str
    exhaustive_patterns: int
    samples: int
    sampled_failures: int
    counterexamples: list = field(default_factory=list)

    @property
    def falsified(self) -> bool:
        return bool(self.counterexamples)


BOUND_HEADER = [
    "k", "u_k", "v_k", "witness_weight", "certified_lower", "certified_upper",
    "target_lower", "lower_method", "exhaustive_patterns", "samples", "sampled_failures",
]


def verify_bounds(
    k_range: Iterable[int],
    samples: int = 100_000,
    seed: int = 0,
    exhaustive_budget: int = 200_000,
) -> list[BoundRow]:
    """Check ``v_k - 1 <= omega_k <= u_k - 1`` for each k.

    The upper bound comes from the fractal witness. For the lower bound,
    every pattern of weight below ``v_k`` is enumerated while the count stays
    within ``exhaustive_budget``; heavier weights below ``v_k`` are only
    sampled (``samples`` random patterns, not a certificate). Any wrongly
    decoded pattern of weight below ``v_k`` is returned as a counterexample.
    """
    rows = []
    for k in k_range:
        if not 1 <= k <= 12:
            raise ValueError(f"k={k} outside the supported range [1, 12]")
        level = TorusLevel(k)
        m, n = level.m, level.n
        u, v = u_seq(k), v_seq(k)
        witness = fractal_error(k)
        top = largest_weight_below(v)
        counterexamples = []

        certified = 0
        used = 0
        for w in range(1, top + 1):
            cost = math.comb(n, w)
            if used + cost > exhaustive_budget:
                break
            used += cost
            for combo in combinations(range(n), w):
                if _purepy.residual_class(m, k, combo) != (0, 0):
                    counterexamples.append(combo)
            if counterexamples:
                break
            certified = w

        sampled = fails = 0
        if not counterexamples and certified < top:
            rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(k,)))
            weights = list(range(certified + 1, top + 1))
            for j in range(samples):
                w = weights[j % len(weights)]
                combo = sorted(rng.choice(n, size=w, replace=False).tolist())
                sampled += 1
                if _purepy.residual_class(m, k, combo) != (0, 0):
                    fails += 1
                    counterexamples.append(tuple(combo))
        method = "exhaustive" if certified == top else "exhaustive+sampled"
        rows.append(
            BoundRow(
                k, u, v, witness.weight, certified, witness.weight - 1, top, method,
                used, sampled, fails, counterexamples,
            )
        )
    return rows
