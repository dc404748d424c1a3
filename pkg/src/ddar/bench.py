"""Benchmark harness: run a directory of problems, report outcomes.

Each problem gets a fresh solver on a worker of its own; failures are
recorded per problem and never abort the sweep.  The deterministic part of
the report (outcomes, counters) is kept separate from wall-clock timings so
that identical inputs give byte-identical result sections.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .engine import SolverConfig
from .errors import DdarError
from .parser import parse_problem
from .solver import solve_problem

PHASES = ("diagram", "match", "saturate")


@dataclass
class BenchRow:
    name: str
    outcome: str  # proven | saturated | timeout | inconsistent | error
    stats: dict = field(default_factory=dict)
    phases: dict = field(default_factory=dict)
    wall_time: float = 0.0
    error: str = ""


@dataclass
class BenchReport:
    rows: list[BenchRow]
    config: dict
    manifest_diff: dict = field(default_factory=dict)

    def aggregate(self) -> dict:
        counts: dict[str, int] = {}
        for row in self.rows:
            counts[row.outcome] = counts.get(row.outcome, 0) + 1
        phase_totals = {p: sum(row.phases.get(p, 0.0) for row in self.rows) for p in PHASES}
        return {
            "problems": len(self.rows),
            "outcomes": counts,
            "solved": counts.get("proven", 0),
            "total_time": sum(row.wall_time for row in self.rows),
            "phase_totals": phase_totals,
        }

    def results_json(self) -> str:
        """Deterministic section only: no wall-clock data."""
        obj = {
            "config": self.config,
            "results": [
                {"name": r.name, "outcome": r.outcome, "stats": r.stats, "error": r.error}
                for r in self.rows
            ],
            "manifest_diff": self.manifest_diff,
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    def to_json(self) -> str:
        agg = self.aggregate()
        obj = {
            "config": self.config,
            "results": [
                {"name": r.name, "outcome": r.outcome, "stats": r.stats, "error": r.error}
                for r in self.rows
            ],
            "manifest_diff": self.manifest_diff,
            "meta": {
                "aggregate": agg,
                "timings": {
                    r.name: {"wall_time": r.wall_time, "phases": r.phases} for r in self.rows
                },
            },
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    def to_text(self) -> str:
        agg = self.aggregate()
        width = max([len(r.name) for r in self.rows] + [8])
        lines = [
            f"{'problem'.ljust(width)}  {'outcome'.ljust(12)}  {'time':>8}  "
            f"{'diagram':>8}  {'match':>8}  {'saturate':>8}  firings  row-ops"
        ]
        for r in self.rows:
            lines.append(
                f"{r.name.ljust(width)}  {r.outcome.ljust(12)}  {r.wall_time:8.3f}  "
                f"{r.phases.get('diagram', 0.0):8.3f}  {r.phases.get('match', 0.0):8.3f}  "
                f"{r.phases.get('saturate', 0.0):8.3f}  "
                f"{r.stats.get('rule_firings', 0):7d}  {r.stats.get('ar_row_ops', 0):7d}"
            )
            if r.error:
                lines.append(f"{''.ljust(width)}  error: {r.error}")
        lines.append("")
        lines.append(
            f"solved {agg['solved']}/{agg['problems']}  "
            f"total {agg['total_time']:.3f}s  "
            f"phases: diagram {agg['phase_totals']['diagram']:.3f}s, "
            f"match {agg['phase_totals']['match']:.3f}s, "
            f"saturate {agg['phase_totals']['saturate']:.3f}s"
        )
        if self.manifest_diff:
            lines.append(f"manifest mismatches: {json.dumps(self.manifest_diff, sort_keys=True)}")
        return "\n".join(lines) + "\n"


def _config_dict(config: SolverConfig) -> dict:
    return {
        "seed": config.seed,
        "timeout": config.timeout,
        "law_of_sines": config.law_of_sines,
        "resume_queries": config.resume_queries,
        "catalog_path": config.catalog_path,
        "tol_check": config.tol_check,
    }


def bench_one(path: str, config: SolverConfig) -> BenchRow:
    name = Path(path).stem
    try:
        problem = parse_problem(Path(path).read_text(encoding="utf-8"), name=name)
        report = solve_problem(problem, config)
        row = BenchRow(
            name=name,
            outcome=report.outcome,
            stats=report.result.stats.as_dict() if report.result else {},
            phases=dict(report.phases),
            wall_time=sum(report.phases.values()),
        )
        if report.result and report.result.diagnostic:
            row.error = report.result.diagnostic
        return row
    except DdarError as exc:
        return BenchRow(name=name, outcome="error", error=str(exc))


def _bench_worker(args: tuple[str, dict]) -> dict:
    path, cfg = args
    row = bench_one(path, SolverConfig(**cfg))
    return asdict(row)


def run_bench(
    directory: str,
    config: SolverConfig,
    jobs: int | None = None,
    manifest_path: str | None = None,
) -> BenchReport:
    paths = sorted(str(p) for p in Path(directory).glob("*.prob"))
    cfg = _config_dict(config)
    jobs = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)
    if jobs == 1 or len(paths) <= 1:
        rows = [bench_one(p, config) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, max(len(paths), 1))) as pool:
            rows = [BenchRow(**d) for d in pool.map(_bench_worker, [(p, cfg) for p in paths])]
    report = BenchReport(rows=rows, config=cfg)
    if manifest_path:
        with open(manifest_path, encoding="utf-8") as fh:
            expected = json.load(fh)
        diff = {}
        by_name = {r.name: r.outcome for r in report.rows}
        for name, want in sorted(expected.items()):
            got = by_name.get(name, "missing")
            if got != want:
                diff[name] = {"expected": want, "got": got}
        for name in sorted(set(by_name) - set(expected)):
            diff[name] = {"expected": "absent", "got": by_name[name]}
        report.manifest_diff = diff
    return report
