"""File formats: edge lists, decode traces, radius reports and run manifests."""

from __future__ import annotations

import datetime as _dt
import json
import shlex
from dataclasses import dataclass, field

from . import __version__
from .adversarial import RadiusReport
from .decoder import DecodeTrace, StageRecord
from .errors import ParseError
from .lattice import EdgeId, EdgeSet, SyndromeSet, TorusLevel, edge_index

# ---------------------------------------------------------------------------
# Edge lists


def parse_edge_list(text: str, level: TorusLevel) -> EdgeSet:
    """Parse ``H x y`` / ``V x y`` lines. Blank lines and ``#`` comments are skipped.

    A repeated edge cancels, matching mod-2 addition.
    """
    idx = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("H", "V"):
            raise ParseError(f"expected 'H x y' or 'V x y', got {raw.strip()!r}", lineno)
        try:
            x, y = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"coordinates must be integers: {raw.strip()!r}", lineno) from None
        if not (0 <= x < level.m and 0 <= y < level.m):
            raise ParseError(f"coordinate out of range [0, {level.m}) for k={level.k}: {raw.strip()!r}", lineno)
        idx.append(edge_index(level, EdgeId(parts[0], x, y)))
    return EdgeSet.from_indices(level, idx)


def format_edge_list(e: EdgeSet, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.extend(str(edge) for edge in e.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path, level: TorusLevel) -> EdgeSet:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), level)


def write_edge_list(path, e: EdgeSet, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(e, header))


# ---------------------------------------------------------------------------
# Traces


def trace_to_dict(trace: DecodeTrace) -> dict:
    return {
        "k": trace.level.k,
        "syndrome_in": [list(v) for v in trace.syndrome_in.sorted()],
        "stages": [
            {
                "stage": r.stage,
                "flipped_edges": [str(e) for e in r.e_hat.edges()],
                "syndrome_after": [list(v) for v in r.syndrome_after.sorted()],
            }
            for r in trace.records
        ],
    }


def trace_from_dict(d: dict) -> DecodeTrace:
    level = TorusLevel(int(d["k"]))

    def edges(strings):
        return EdgeSet.from_edges(level, ((s.split()[0], int(s.split()[1]), int(s.split()[2])) for s in strings))

    trace = DecodeTrace(level, SyndromeSet(level, d["syndrome_in"]))
    for r in d["stages"]:
        trace.records.append(StageRecord(int(r["stage"]), edges(r["flipped_edges"]), SyndromeSet(level, r["syndrome_after"])))
    return trace


def dumps_trace(trace: DecodeTrace) -> str:
    return json.dumps(trace_to_dict(trace), indent=1, sort_keys=True) + "\n"


def loads_trace(text: str) -> DecodeTrace:
    try:
        return trace_from_dict(json.loads(text))
    except (json.JSONDecodeError, KeyError, IndexError, ValueError) as exc:
        raise ParseError(f"malformed trace: {exc}") from exc


def traces_equal(a: DecodeTrace, b: DecodeTrace) -> bool:
    return a.level == b.level and a.syndrome_in == b.syndrome_in and a.records == b.records


# ---------------------------------------------------------------------------
# Radius reports


def report_to_dict(r: RadiusReport) -> dict:
    return {
        "k": r.k,
        "mode": r.mode,
        "omega": r.omega,
        "w_max": r.w_max,
        "lower_bound": r.lower_bound,
        "patterns_checked": r.patterns_checked,
        "exhaustive": r.exhaustive,
        "failures_by_weight": {str(w): n for w, n in sorted(r.failures_by_weight.items())},
        "witness": None if r.witness is None else format_edge_list(r.witness),
    }


def report_from_dict(d: dict) -> RadiusReport:
    level = TorusLevel(int(d["k"]))
    witness = None if d["witness"] is None else parse_edge_list(d["witness"], level)
    return RadiusReport(
        k=int(d["k"]),
        mode=d["mode"],
        omega=d["omega"],
        witness=witness,
        w_max=int(d["w_max"]),
        lower_bound=int(d["lower_bound"]),
        patterns_checked=int(d["patterns_checked"]),
        exhaustive=bool(d["exhaustive"]),
        failures_by_weight={int(w): int(n) for w, n in d["failures_by_weight"].items()},
    )


def dumps_report(r: RadiusReport) -> str:
    return json.dumps(report_to_dict(r), indent=1, sort_keys=True) + "\n"


def loads_report(text: str) -> RadiusReport:
    try:
        return report_from_dict(json.loads(text))
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ParseError(f"malformed report: {exc}") from exc


# ---------------------------------------------------------------------------
# Manifest


@dataclass
class RunManifest:
    """Provenance attached to every result file as ``# key: value`` lines."""

    command: str
    seed: int | None
    grid: dict = field(default_factory=dict)
    version: str = __version__
    timestamp: str = ""

    @classmethod
    def create(cls, argv, seed=None, grid=None) -> "RunManifest":
        """``argv`` should hold only options that affect results (not threads or paths)."""
        now = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()
        return cls(shlex.join(argv), seed, dict(grid or {}), __version__, now)

    def lines(self) -> list[str]:
        return [
            f"command: {self.command}",
            f"seed: {self.seed}",
            f"version: {self.version}",
            f"grid: {json.dumps(self.grid, sort_keys=True)}",
            f"timestamp: {self.timestamp}",
        ]

    def header(self) -> str:
        return "".join(f"# {ln}\n" for ln in self.lines())

    @classmethod
    def parse(cls, text: str) -> "RunManifest":
        fields = {}
        for line in text.splitlines():
            if not line.startswith("# "):
                continue
            key, _, value = line[2:].partition(": ")
            fields[key] = value
        try:
            seed = None if fields["seed"] == "None" else int(fields["seed"])
            return cls(fields["command"], seed, json.loads(fields["grid"]), fields["version"], fields["timestamp"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"malformed manifest: {exc}") from exc


def strip_timestamp(text: str) -> str:
    """Drop the manifest timestamp line, for byte comparisons of reruns."""
    return "".join(ln for ln in text.splitlines(keepends=True) if not ln.startswith("# timestamp:"))
