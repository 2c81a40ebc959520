"""Command-line entry point ``toric-rg``.

Exit status: 0 on success, 1 when a verification finds a falsification,
2 for usage errors, 3 when a search exceeds its budget (partial report is
still printed), 4 for unreadable or malformed input.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import click

from . import __version__, _backend
from .adversarial import (
    BOUND_HEADER,
    DEFAULT_BUDGET,
    find_ablation_witness,
    fractal_error,
    fractal_paths,
    radius_1d,
    radius_2d,
    u_seq,
    verify_bounds,
    verify_fractal,
)
from .decoder import decode, decode_with_trace
from .errors import ParseError, SearchBudgetExceeded
from .io import RunManifest, dumps_report, dumps_trace, format_edge_list, read_edge_list
from .lattice import TorusLevel, homology_class, syndrome
from .montecarlo import crossing_estimates, results_to_csv, run_experiment, trial_seed
from .reduced_weight import STAGE_HEADER, lemma4_sample

DEFAULT_SEED = 20240601

EXIT_FALSIFIED = 1
EXIT_BUDGET = 3
EXIT_INPUT = 4


def parse_k_list(text: str) -> list[int]:
    """``4,5,6`` or an inclusive range ``1:12``."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ":" in part:
                a, b = part.split(":")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise click.BadParameter(f"cannot parse k list {text!r}") from None
    if not out or any(k < 1 for k in out):
        raise click.BadParameter("k values must be integers >= 1")
    return out


def parse_p_grid(text: str) -> list[float]:
    """``start:end:step`` (both ends inclusive, 1e-12 tolerance) or a comma list."""
    try:
        if ":" in text:
            start, end, step = (float(x) for x in text.split(":"))
            if end < start:
                raise click.BadParameter("p range end is below its start")
            if step <= 0:
                count = 1 if abs(end - start) <= 1e-12 else 0
                if not count:
                    raise click.BadParameter("p range step must be positive")
            else:
                count = math.floor((end - start) / step + 1e-12) + 1
            ps = [round(start + j * step, 12) for j in range(count)]
        else:
            ps = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"cannot parse p grid {text!r}") from None
    if not ps or any(not 0.0 <= p <= 1.0 for p in ps):
        raise click.BadParameter("p values must lie in [0, 1]")
    return ps


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(__version__)
def main():
    """Renormalisation decoder for the toric code."""


@main.command("decode")
@click.option("--k", "k", type=click.IntRange(1, 14), required=True, help="Torus level (side 2**k).")
@click.argument("error_file", type=click.Path(dir_okay=False))
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write the per-stage trace here.")
def cmd_decode(k, error_file, trace_path):
    """Decode the syndrome of the error in ERROR_FILE and report the outcome."""
    level = TorusLevel(k)
    try:
        e = read_edge_list(error_file, level)
    except ParseError as exc:
        click.echo(f"error: {error_file}: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    s = syndrome(e)
    if trace_path:
        trace = decode_with_trace(s)
        e_hat = trace.e_hat
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write(dumps_trace(trace))
    else:
        e_hat = decode(s)
    cls = homology_class(e ^ e_hat)
    click.echo(f"k: {k}")
    click.echo(f"error weight: {e.weight}")
    click.echo(f"syndrome size: {len(s)}")
    click.echo(f"correction weight: {e_hat.weight}")
    click.echo(f"residual class: ({cls.windH},{cls.windV})")
    click.echo(f"verdict: {'SUCCESS' if cls.trivial else 'FAIL'}")


@main.command("simulate")
@click.option("--k", "k_text", default="4,5,6", show_default=True, help="Levels, e.g. 4,5,6.")
@click.option("--p", "p_text", default="0.035:0.055:0.005", show_default=True, help="start:end:step or a comma list.")
@click.option("--trials", type=click.IntRange(min=1), default=2000, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="CSV path (default: stdout).")
def cmd_simulate(k_text, p_text, trials, seed, threads, out):
    """Monte Carlo failure rates on the bit-flip channel."""
    ks = parse_k_list(k_text)
    ps = parse_p_grid(p_text)
    grid = [(k, p, trials) for k in ks for p in ps]
    results = run_experiment(grid, master_seed=seed, threads=threads)
    argv = ["toric-rg", "simulate", "--k", ",".join(map(str, ks)), "--p", ",".join(f"{p:.12g}" for p in ps),
            "--trials", str(trials), "--seed", str(seed)]
    manifest = RunManifest.create(argv, seed, {"k": ks, "p": ps, "trials": trials})
    text = results_to_csv(results, comments=manifest.lines())
    _emit(text, out)
    if out:
        for r in results:
            click.echo(f"k={r.k} p={r.p:.6g} rate={r.rate:.4f} [{r.ci_low:.4f}, {r.ci_high:.4f}]")
    for (k0, k1), cross in crossing_estimates(results).items():
        shown = ", ".join(f"{c:.4f}" for c in cross) or "none"
        click.echo(f"# crossing k={k0}/k={k1}: {shown}", err=True)


@main.command("fractal")
@click.option("--k", "k", type=click.IntRange(1, 12), required=True)
@click.option("--verify", is_flag=True, help="Decode with the full decoder and confirm the failure.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the pattern as an edge list.")
def cmd_fractal(k, verify, out):
    """Row pattern of weight u_k that the decoder turns into a logical error."""
    e = fractal_error(k)
    paths = fractal_paths(k)
    click.echo(f"k: {k}")
    click.echo(f"weight: {e.weight} (u_k = {u_seq(k)})")
    click.echo(f"paths: {len(paths)} of lengths {[n for _, n in paths]}")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(format_edge_list(e, header=f"fractal pattern, k={k}, weight {e.weight}"))
    if verify:
        rep = verify_fractal(k)
        cls = rep["residual_class"]
        click.echo(f"residual class: ({cls[0]},{cls[1]})")
        click.echo(f"residual is a full row: {rep['residual_is_row']}")
        ok = rep["failed"] and tuple(cls) == (1, 0) and rep["weight"] == rep["u_k"]
        click.echo(f"verdict: {'FAIL confirmed' if ok else 'NOT CONFIRMED'}")
        if not ok:
            sys.exit(EXIT_FALSIFIED)


def _print_radius(rep, out, partial=False):
    click.echo(f"k: {rep.k}  mode: {rep.mode}")
    click.echo(f"patterns checked: {rep.patterns_checked}")
    if rep.omega is not None:
        click.echo(f"omega: {rep.omega}")
        click.echo(f"witness weight: {rep.witness.weight}")
        click.echo("witness: " + "; ".join(str(x) for x in rep.witness.edges()))
    else:
        reach = rep.lower_bound if partial else rep.w_max
        click.echo(f"omega >= {rep.lower_bound} (every pattern up to weight {reach} decoded correctly)")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(dumps_report(rep))


@main.command("radius")
@click.option("--mode", type=click.Choice(["1d", "2d"]), required=True)
@click.option("--k", "k", type=click.IntRange(1, 12), required=True)
@click.option("--w-max", type=click.IntRange(min=0), help="Largest weight to enumerate (1d default: u_k).")
@click.option("--budget", type=click.IntRange(min=1), default=DEFAULT_BUDGET, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report (JSON) here.")
def cmd_radius(mode, k, w_max, budget, out):
    """Exhaustive search for the smallest wrongly decoded pattern."""
    try:
        if mode == "1d":
            rep = radius_1d(k, w_max=w_max, budget=budget)
        else:
            if w_max is None:
                raise click.UsageError("--w-max is required for --mode 2d")
            rep = radius_2d(k, w_max, budget=budget)
    except SearchBudgetExceeded as exc:
        click.echo(f"search budget exceeded: {exc}", err=True)
        if exc.report is not None:
            _print_radius(exc.report, out, partial=True)
        sys.exit(EXIT_BUDGET)
    _print_radius(rep, out)


@main.command("ablation")
@click.option("--k", "k", type=click.IntRange(1, 8), required=True)
@click.option("--skip", type=click.Choice(["step1", "step2"]), required=True, help="Reduction step to disable.")
@click.option("--weight", type=click.IntRange(min=1), required=True)
@click.option("--budget", type=click.IntRange(min=1), default=DEFAULT_BUDGET, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write the witness as an edge list.")
def cmd_ablation(k, skip, weight, budget, out):
    """Find a pattern that the decoder with one step removed gets wrong."""
    try:
        w = find_ablation_witness(k, (skip,), weight, budget=budget)
    except SearchBudgetExceeded as exc:
        click.echo(f"search budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    if w is None:
        click.echo(f"no weight-{weight} pattern defeats the decoder without {skip} at k={k}")
        return
    cls = homology_class(w ^ decode(syndrome(w)))
    click.echo("witness: " + "; ".join(str(x) for x in w.edges()))
    click.echo(f"full decoder on witness: {'SUCCESS' if cls.trivial else 'FAIL'}")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(format_edge_list(w, header=f"defeats decoder without {skip}, k={k}"))


def _lemma4_rows(args):
    k, p, seed, j = args
    rep = lemma4_sample(k, p, trial_seed(seed, k, 0, j))
    rows = [[j, s.stage, s.wt_r, s.P, s.combined, "" if s.ratio_to_next is None else f"{float(s.ratio_to_next):.6f}"]
            for s in rep.stages]
    return rows, rep.flagged, rep.min_ratio, rep.diagnose()


@main.command("lemma4")
@click.option("--k", "k", type=click.IntRange(2, 10), required=True)
@click.option("--samples", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--p", "p", type=click.FloatRange(0.0, 1.0), default=0.04, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Per-stage CSV path (default: stdout).")
def cmd_lemma4(k, samples, p, seed, threads, out):
    """Track wt_r + P through decoding of random errors and flag slow growth."""
    jobs = [(k, p, seed, j) for j in range(samples)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_lemma4_rows, jobs, chunksize=max(1, samples // (4 * threads))))
    else:
        results = [_lemma4_rows(a) for a in jobs]
    argv = ["toric-rg", "lemma4", "--k", str(k), "--samples", str(samples), "--p", f"{p:.12g}", "--seed", str(seed)]
    manifest = RunManifest.create(argv, seed, {"k": k, "p": p, "samples": samples})
    buf = _io.StringIO()
    for line in manifest.lines():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample"] + STAGE_HEADER)
    flagged = 0
    ratios = []
    notes = []
    for j, (rows, flags, mr, diag) in enumerate(results):
        w.writerows(rows)
        flagged += len(flags)
        if mr is not None:
            ratios.append(mr)
        notes.extend(f"sample {j}: {d}" for d in diag)
    _emit(buf.getvalue(), out)
    click.echo(f"flagged stages: {flagged}", err=True)
    if ratios:
        click.echo(f"min ratio: {float(min(ratios)):.6f}", err=True)
    for n in notes:
        click.echo(f"  {n}", err=True)
    if flagged:
        sys.exit(EXIT_FALSIFIED)


@main.command("verify-bounds")
@click.option("--k", "k_text", default="1:12", show_default=True, help="Levels, e.g. 1:12 or 3,5.")
@click.option("--samples", type=click.IntRange(min=0), default=100_000, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--budget", type=click.IntRange(min=0), default=200_000, show_default=True,
              help="Exhaustive enumeration budget per k.")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV path (default: stdout).")
def cmd_verify_bounds(k_text, samples, seed, budget, out):
    """Check v_k - 1 <= omega_k <= u_k - 1 for each k."""
    ks = parse_k_list(k_text)
    if any(k > 12 for k in ks):
        raise click.BadParameter("k must lie in [1, 12]", param_hint="--k")
    rows = verify_bounds(ks, samples=samples, seed=seed, exhaustive_budget=budget)
    argv = ["toric-rg", "verify-bounds", "--k", ",".join(map(str, ks)), "--samples", str(samples),
            "--seed", str(seed), "--budget", str(budget)]
    manifest = RunManifest.create(argv, seed, {"k": ks, "samples": samples, "budget": budget})
    buf = _io.StringIO()
    for line in manifest.lines():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BOUND_HEADER)
    for r in rows:
        w.writerow([r.k, r.u_k, f"{float(r.v_k):.6f}", r.witness_weight, r.certified_lower, r.certified_upper,
                    r.target_lower, r.lower_method, r.exhaustive_patterns, r.samples, r.sampled_failures])
    _emit(buf.getvalue(), out)
    bad = [r for r in rows if r.falsified]
    for r in bad:
        click.echo(f"falsification at k={r.k}: {json.dumps([list(c) for c in r.counterexamples[:5]])}", err=True)
    click.echo(f"backend: {_backend.NAME}; falsifications: {len(bad)}", err=True)
    if bad:
        sys.exit(EXIT_FALSIFIED)


if __name__ == "__main__":  # pragma: no cover
    main()
