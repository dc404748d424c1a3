"""Command-line front end.

Exit codes for ``solve``: 0 goal proven, 1 saturated, 2 timeout, 3 input
error, 4 internal algebraic fault (a reproduction bundle is written).
``check`` exits 0 when the proof verifies, 1 otherwise.  ``bench`` exits 1
when a manifest comparison fails, else 0.

Every flag has an environment default with the ``DDAR_`` prefix
(DDAR_SEED, DDAR_TIMEOUT, DDAR_LAW_OF_SINES, DDAR_CATALOG, DDAR_JOBS).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import run_bench
from .engine import (
    OUTCOME_INCONSISTENT,
    OUTCOME_PROVEN,
    OUTCOME_SATURATED,
    OUTCOME_TIMEOUT,
    SolverConfig,
)
from .errors import DdarError
from .parser import parse_problem
from .proofio import proof_from_json, proof_to_json, proof_to_text
from .rules import load_catalog
from .solver import solve_problem, write_inconsistency_bundle
from .verify import verify_proof

EXIT_PROVEN = 0
EXIT_SATURATED = 1
EXIT_TIMEOUT = 2
EXIT_INPUT = 3
EXIT_FAULT = 4


def _env(name: str, default):
    raw = os.environ.get(f"DDAR_{name}")
    if raw is None:
        return default
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int) and not isinstance(default, bool):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def _add_solver_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=_env("SEED", 0), help="diagram sampling seed")
    sub.add_argument("--timeout", type=float, default=_env("TIMEOUT", 10.0), help="budget in seconds")
    sub.add_argument(
        "--law-of-sines",
        action="store_true",
        default=_env("LAW_OF_SINES", False),
        help="enable sine variables in the ratio table (off by default)",
    )
    sub.add_argument("--catalog", default=_env("CATALOG", None), help="rule catalog file")
    sub.add_argument("--out", default=None, help="write output here instead of stdout")
    sub.add_argument("--json", action="store_true", help="JSON output")
    sub.add_argument(
        "--dump-diagram", action="store_true", help="emit diagram coordinates as JSON on stderr"
    )


def _config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        seed=args.seed,
        timeout=args.timeout,
        law_of_sines=args.law_of_sines,
        catalog_path=args.catalog,
        output_format="json" if args.json else "text",
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_solve(args: argparse.Namespace) -> int:
    config = _config(args)
    try:
        problem = parse_problem(Path(args.problem).read_text(encoding="utf-8"), name=Path(args.problem).stem)
    except OSError as exc:
        print(f"error: cannot read problem: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DdarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = solve_problem(problem, config)
    except DdarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.dump_diagram:
        print(report.coords.to_json(), file=sys.stderr)

    if report.outcome == OUTCOME_PROVEN:
        if args.json:
            _emit(proof_to_json(report.proof, problem) + "\n", args.out)
        else:
            _emit(proof_to_text(report.proof, problem), args.out)
        return EXIT_PROVEN
    if report.outcome == OUTCOME_SATURATED:
        print("saturated: goal not reachable with the current catalog", file=sys.stderr)
        return EXIT_SATURATED
    if report.outcome == OUTCOME_TIMEOUT:
        print("timeout: budget exhausted", file=sys.stderr)
        return EXIT_TIMEOUT
    if report.outcome == OUTCOME_INCONSISTENT:
        bundle = f"ddar-inconsistency-{problem.name or 'problem'}-seed{config.seed}.json"
        write_inconsistency_bundle(bundle, problem, config, report.result)
        print(
            f"internal fault: {report.result.diagnostic}; reproduction bundle in {bundle}",
            file=sys.stderr,
        )
        return EXIT_FAULT
    print(f"error: unknown outcome {report.outcome!r}", file=sys.stderr)
    return EXIT_FAULT


def _cmd_bench(args: argparse.Namespace) -> int:
    config = _config(args)
    try:
        report = run_bench(args.corpus, config, jobs=args.jobs, manifest_path=args.manifest)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report.to_json() + "\n" if args.json else report.to_text(), args.out)
    return 1 if report.manifest_diff else 0


def _cmd_check(args: argparse.Namespace) -> int:
    try:
        problem = parse_problem(Path(args.problem).read_text(encoding="utf-8"), name=Path(args.problem).stem)
        proof = proof_from_json(Path(args.proof).read_text(encoding="utf-8"), problem)
        catalog = load_catalog(args.catalog)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DdarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    result = verify_proof(proof, problem, catalog)
    if result:
        print("proof verified")
        return 0
    print(f"proof rejected: {result.reason}", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddar", description=__doc__.strip().splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    solve = subs.add_parser("solve", help="solve one problem file")
    solve.add_argument("problem", help="problem file")
    _add_solver_flags(solve)
    solve.set_defaults(func=_cmd_solve)

    bench = subs.add_parser("bench", help="run a corpus directory")
    bench.add_argument("corpus", help="directory of .prob files")
    _add_solver_flags(bench)
    bench.add_argument("--jobs", type=int, default=_env("JOBS", 0), help="worker processes (0 = cores)")
    bench.add_argument("--manifest", default=None, help="expected-outcome manifest to compare")
    bench.set_defaults(func=_cmd_bench)

    check = subs.add_parser("check", help="verify a proof against its problem")
    check.add_argument("proof", help="proof JSON file")
    check.add_argument("problem", help="problem file")
    check.add_argument("--catalog", default=_env("CATALOG", None), help="rule catalog file")
    check.set_defaults(func=_cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
