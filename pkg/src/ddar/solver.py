"""End-to-end solve pipeline: diagram, matching, saturation, proof."""

from __future__ import annotations

import importlib.resources
import json
import time
from dataclasses import dataclass, replace

from .diagram import Coordinates, build_diagram
from .engine import (
    OUTCOME_INCONSISTENT,
    OUTCOME_PROVEN,
    OUTCOME_TIMEOUT,
    Proof,
    SaturationResult,
    SolverConfig,
    extract_proof,
    saturate,
)
from .geometry import Problem
from .matcher import RuleInstance, detect_configurations, match_rules
from .parser import serialize_problem
from .rules import Rule, load_catalog


@dataclass
class SolveReport:
    problem: Problem
    outcome: str
    result: SaturationResult | None
    proof: Proof | None
    coords: Coordinates
    instances: list[RuleInstance]
    phases: dict[str, float]


def corpus_dir() -> str:
    """Path of the bundled problem corpus."""
    return str(importlib.resources.files("ddar").joinpath("problems"))


def solve_problem(
    problem: Problem, config: SolverConfig | None = None, catalog: list[Rule] | None = None
) -> SolveReport:
    """Build a diagram, match the catalog, saturate, and extract a proof.

    The timeout budget covers the whole pipeline: time spent building the
    diagram and matching is deducted from the saturation budget.
    """
    config = config or SolverConfig()
    if catalog is None:
        catalog = load_catalog(config.catalog_path)
    t0 = time.monotonic()
    deadline = t0 + config.timeout
    phases: dict[str, float] = {}

    coords = build_diagram(problem, seed=config.seed)
    phases["diagram"] = time.monotonic() - t0

    def timed_out() -> bool:
        return time.monotonic() > deadline

    if timed_out():
        result = _timeout_result(problem, config)
        phases["match"] = 0.0
        phases["saturate"] = 0.0
        return SolveReport(problem, OUTCOME_TIMEOUT, result, None, coords, [], phases)

    t1 = time.monotonic()
    cfg = detect_configurations(coords, config.tol_check)
    instances = match_rules(cfg, catalog, coords, config.tol_check)
    phases["match"] = time.monotonic() - t1

    if timed_out():
        result = _timeout_result(problem, config)
        phases["saturate"] = 0.0
        return SolveReport(problem, OUTCOME_TIMEOUT, result, None, coords, instances, phases)

    t2 = time.monotonic()
    budget = max(deadline - time.monotonic(), 0.0)
    result = saturate(problem, instances, replace(config, timeout=budget), coords=coords)
    phases["saturate"] = time.monotonic() - t2

    proof = None
    if result.outcome == OUTCOME_PROVEN:
        proof = extract_proof(result)
    return SolveReport(problem, result.outcome, result, proof, coords, instances, phases)


def _timeout_result(problem: Problem, config: SolverConfig) -> SaturationResult:
    from .engine import Stats

    return SaturationResult(
        outcome=OUTCOME_TIMEOUT,
        records={},
        stats=Stats(),
        goal=problem.goal,
        origins={},
        diagnostic="budget exhausted before saturation",
        seed=config.seed,
        law_of_sines=config.law_of_sines,
    )


def inconsistency_bundle(problem: Problem, config: SolverConfig, result: SaturationResult) -> dict:
    """Reproduction record for a hard algebraic fault."""
    return {
        "problem": serialize_problem(problem),
        "seed": config.seed,
        "law_of_sines": config.law_of_sines,
        "diagnostic": result.diagnostic,
        "established": [repr(s) for s in sorted(result.records, key=lambda s: result.records[s].epoch)],
    }


def write_inconsistency_bundle(path: str, problem: Problem, config: SolverConfig, result: SaturationResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(inconsistency_bundle(problem, config, result), fh, indent=2, sort_keys=True)


__all__ = [
    "SolveReport",
    "solve_problem",
    "corpus_dir",
    "inconsistency_bundle",
    "write_inconsistency_bundle",
    "OUTCOME_INCONSISTENT",
]
