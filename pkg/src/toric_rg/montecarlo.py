"""Bit-flip channel sampling and the Monte Carlo threshold experiment."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from . import _backend
from .decoder import decode
from .lattice import EdgeSet, TorusLevel, homology_class, syndrome

CSV_HEADER = ["k", "p", "trials", "failures", "rate", "ci_low", "ci_high", "seed"]


@dataclass(frozen=True)
class TrialConfig:
    k: int
    p: float
    trials: int
    master_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        TorusLevel(self.k)


@dataclass(frozen=True)
class TrialResult:
    k: int
    p: float
    trials: int
    failures: int
    rate: float
    ci_low: float
    ci_high: float
    seed: int


def trial_seed(master_seed: int, k: int, p_index: int, trial_index: int) -> np.random.SeedSequence:
    """Counter-based stream for one trial; independent of scheduling."""
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(k), int(p_index), int(trial_index)))


def _sample_bits(n: int, p: float, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return (rng.random(n) < p).astype(np.uint8)


def sample_bitflip(level: TorusLevel, p: float, seed) -> EdgeSet:
    """Flip each edge independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return EdgeSet(level, _sample_bits(level.n, p, seed))


def run_trial(level: TorusLevel, p: float, seed) -> bool:
    """True when the decoder leaves a homologically nontrivial residual."""
    e = sample_bitflip(level, p, seed)
    return not homology_class(e ^ decode(syndrome(e))).trivial


def wilson_interval(failures: int, trials: int) -> tuple[float, float]:
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _count_failures(args) -> int:
    k, p, p_index, master_seed, start, stop = args
    m = 1 << k
    n = 2 * m * m
    kern = _backend.kernels
    fails = 0
    for t in range(start, stop):
        bits = _sample_bits(n, p, trial_seed(master_seed, k, p_index, t))
        fails += bool(kern.trial_fails(bits, m, k))
    return fails


def _p_indices(grid) -> list[int]:
    seen: dict[float, int] = {}
    return [seen.setdefault(float(p), len(seen)) for _, p, _ in grid]


def run_experiment(grid, master_seed: int = 0, threads: int = 1, chunk: int = 500) -> list[TrialResult]:
    """Estimate the failure rate at every ``(k, p, trials)`` grid point.

    The p-index used in seed derivation is the position of ``p`` among the
    distinct p values of the grid in first-appearance order. Results do not
    depend on ``threads``: only failure counts are aggregated.
    """
    grid = [(int(k), float(p), int(t)) for k, p, t in grid]
    if not grid:
        raise ValueError("empty grid")
    for k, p, t in grid:
        TrialConfig(k, p, t, master_seed)
    p_idx = _p_indices(grid)
    jobs = []
    for row, ((k, p, trials), pi) in enumerate(zip(grid, p_idx)):
        for start in range(0, trials, chunk):
            jobs.append((row, (k, p, pi, master_seed, start, min(start + chunk, trials))))
    counts = [0] * len(grid)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for (row, _), f in zip(jobs, pool.map(_count_failures, [a for _, a in jobs])):
                counts[row] += f
    else:
        for row, a in jobs:
            counts[row] += _count_failures(a)
    results = []
    for (k, p, trials), fails in zip(grid, counts):
        lo, hi = wilson_interval(fails, trials)
        results.append(TrialResult(k, p, trials, fails, fails / trials, lo, hi, int(master_seed)))
    return results


def results_to_csv(results, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in results:
        w.writerow([r.k, f"{r.p:.6g}", r.trials, r.failures, f"{r.rate:.6f}", f"{r.ci_low:.6f}", f"{r.ci_high:.6f}", r.seed])
    return buf.getvalue()


def results_from_csv(text: str) -> list[TrialResult]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        out.append(
            TrialResult(
                int(row["k"]), float(row["p"]), int(row["trials"]), int(row["failures"]),
                float(row["rate"]), float(row["ci_low"]), float(row["ci_high"]), int(row["seed"]),
            )
        )
    return out


def crossing_estimates(results) -> dict[tuple[int, int], list[float]]:
    """Where the failure curves of successive sizes cross, by linear interpolation.

    Returns ``{(k, k_next): [p, ...]}`` with every sign change of
    ``rate(k_next) - rate(k)`` along the common p grid.
    """
    by_k: dict[int, dict[float, float]] = {}
    for r in results:
        by_k.setdefault(r.k, {})[r.p] = r.rate
    ks = sorted(by_k)
    out = {}
    for k0, k1 in zip(ks, ks[1:]):
        ps = sorted(set(by_k[k0]) & set(by_k[k1]))
        diffs = [by_k[k1][p] - by_k[k0][p] for p in ps]
        found = []
        for (pa, da), (pb, db) in zip(zip(ps, diffs), zip(ps[1:], diffs[1:])):
            if da == 0:
                found.append(pa)
            elif da * db < 0:
                found.append(pa + (pb - pa) * da / (da - db))
        if diffs and diffs[-1] == 0:
            found.append(ps[-1])
        out[(k0, k1)] = found
    return out
