"""The main deduction loop and proof extraction.

Saturation is a worklist fixpoint over established statements.  Newly
established statements feed their linear-table content into the three
exact tables; rule instances fire once all hypotheses are established
(tracked by a remaining-hypothesis counter per instance); statements that
could still matter (hypotheses and conclusions of instances, and the goal)
are tried against the tables between deduction rounds, resuming each
pending query from its stored watermark.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .ar import ARTable, Certificate, Equation, ar_targets, sine_axiom_statements, statement_to_equations
from .diagram import TOL_CHECK, Coordinates, numeric_holds
from .errors import ExtensionDisabled, GoalNotProven, InconsistentSystem
from .geometry import Problem, Statement
from .matcher import RuleInstance


@dataclass
class SolverConfig:
    seed: int = 0
    timeout: float = 10.0
    law_of_sines: bool = False
    resume_queries: bool = True
    catalog_path: str | None = None
    tol_check: float = TOL_CHECK
    output_format: str = "text"  # text | json


@dataclass(frozen=True)
class Given:
    """Initial fact: implied by construction ``step``, or a seeded
    law-of-sines axiom when ``step`` is None."""

    step: int | None
    axiom: str | None = None


@dataclass(frozen=True)
class ByRule:
    instance: RuleInstance


@dataclass(frozen=True)
class ByAR:
    table: str
    certificate: Certificate


@dataclass(frozen=True)
class Record:
    justification: object
    epoch: int


@dataclass
class Stats:
    rule_firings: int = 0
    ar_inserts: int = 0
    ar_row_ops: int = 0
    ar_queries: int = 0
    queries_resumed: int = 0
    established: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return {
            "rule_firings": self.rule_firings,
            "ar_inserts": self.ar_inserts,
            "ar_row_ops": self.ar_row_ops,
            "ar_queries": self.ar_queries,
            "queries_resumed": self.queries_resumed,
            "established": self.established,
        }


OUTCOME_PROVEN = "proven"
OUTCOME_SATURATED = "saturated"
OUTCOME_TIMEOUT = "timeout"
OUTCOME_INCONSISTENT = "inconsistent"


@dataclass
class SaturationResult:
    outcome: str
    records: dict[Statement, Record]
    stats: Stats
    goal: Statement
    origins: dict[int, tuple[Statement, int]]  # inserted id -> (statement, encoding index)
    diagnostic: str = ""
    seed: int = 0
    law_of_sines: bool = False


def saturate(
    problem: Problem,
    instances: list[RuleInstance],
    config: SolverConfig,
    coords: Coordinates | None = None,
) -> SaturationResult:
    """Run the fixpoint.  ``coords`` is only needed to seed law-of-sines
    axioms (one pair of equations per numerically genuine triangle)."""
    t0 = time.monotonic()
    deadline = t0 + config.timeout
    tables = {tag: ARTable(tag, resume_queries=config.resume_queries) for tag in ("len", "log", "sq")}
    records: dict[Statement, Record] = {}
    origins: dict[int, tuple[Statement, int]] = {}
    stats = Stats()
    epoch = 0
    next_origin = 0
    queue: deque[Statement] = deque()

    goal = problem.goal

    def establish(s: Statement, just) -> None:
        nonlocal epoch
        if s in records:
            return
        records[s] = Record(justification=just, epoch=epoch)
        epoch += 1
        stats.established += 1
        queue.append(s)

    # initial facts
    for step, s in problem.given_statements():
        establish(s, Given(step=step))
    if config.law_of_sines:
        if coords is None:
            raise ValueError("law-of-sines seeding needs diagram coordinates")
        from itertools import combinations

        from .geometry import stmt as _stmt

        for tri in combinations(range(len(problem.points)), 3):
            if numeric_holds(_stmt("coll", tri), coords, config.tol_check):
                continue
            for axiom in sine_axiom_statements(*tri):
                establish(axiom, Given(step=None, axiom="law_of_sines"))

    # readiness bookkeeping for rule instances
    remaining = []
    fired = [False] * len(instances)
    ready_at_start = []
    watchers: dict[Statement, list[int]] = {}
    for idx, inst in enumerate(instances):
        missing = [h for h in inst.hypotheses if h not in records]
        remaining.append(len(missing))
        if not missing:
            ready_at_start.append(idx)
        for h in missing:
            watchers.setdefault(h, []).append(idx)

    # statements the tables will be asked about, with their encodings
    targets: dict[Statement, list[Equation]] = {}

    def register_target(s: Statement) -> None:
        if s in targets or s in records:
            return
        try:
            eqs = ar_targets(s, law_of_sines=config.law_of_sines)
        except ExtensionDisabled:
            eqs = []
        if eqs:
            targets[s] = eqs

    register_target(goal)
    for inst in instances:
        for h in inst.hypotheses:
            register_target(h)
        register_target(inst.conclusion)

    def insert_equations(s: Statement) -> None:
        nonlocal next_origin
        try:
            eqs = statement_to_equations(s, law_of_sines=config.law_of_sines)
        except ExtensionDisabled:
            return
        for enc_index, eq in enumerate(eqs):
            origin = next_origin
            next_origin += 1
            origins[origin] = (s, enc_index)
            tables[eq.table].insert(eq, origin)
            stats.ar_inserts += 1

    def fire(idx: int) -> None:
        inst = instances[idx]
        fired[idx] = True
        stats.rule_firings += 1
        establish(inst.conclusion, ByRule(inst))

    def finish(outcome: str, diagnostic: str = "") -> SaturationResult:
        stats.ar_row_ops = sum(t.row_ops for t in tables.values())
        stats.queries_resumed = sum(t.queries_resumed for t in tables.values())
        stats.wall_time = time.monotonic() - t0
        return SaturationResult(
            outcome=outcome,
            records=records,
            stats=stats,
            goal=goal,
            origins=origins,
            diagnostic=diagnostic,
            seed=config.seed,
            law_of_sines=config.law_of_sines,
        )

    try:
        for idx in ready_at_start:
            if instances[idx].conclusion not in records:
                fire(idx)
            else:
                fired[idx] = True
        while True:
            # deduction closure over the established queue
            while queue:
                if time.monotonic() > deadline:
                    return finish(OUTCOME_TIMEOUT, "budget exhausted in deduction closure")
                s = queue.popleft()
                insert_equations(s)
                for idx in watchers.get(s, ()):  # noqa: B007
                    remaining[idx] -= 1
                    if remaining[idx] == 0 and not fired[idx]:
                        if instances[idx].conclusion not in records:
                            fire(idx)
                        else:
                            fired[idx] = True
            if goal in records:
                return finish(OUTCOME_PROVEN)

            # algebraic pass over still-unestablished targets
            progress = False
            for s in sorted(targets.keys(), key=lambda x: x.key()):
                if s in records:
                    targets.pop(s)
                    continue
                if time.monotonic() > deadline:
                    return finish(OUTCOME_TIMEOUT, "budget exhausted in algebraic pass")
                for eq in targets[s]:
                    stats.ar_queries += 1
                    cert = tables[eq.table].query(eq)
                    if cert is not None:
                        establish(s, ByAR(table=eq.table, certificate=cert))
                        targets.pop(s)
                        progress = True
                        break
            if goal in records:
                return finish(OUTCOME_PROVEN)
            if not progress and not queue:
                return finish(OUTCOME_SATURATED)
    except InconsistentSystem as exc:
        return finish(OUTCOME_INCONSISTENT, str(exc))


# ---------------------------------------------------------------------------
# Proof extraction


@dataclass(frozen=True)
class ProofStep:
    statement: Statement
    kind: str  # given | rule | ar
    deps: tuple[int, ...]
    # given
    construction: int | None = None
    axiom: str | None = None
    # rule
    rule_id: str | None = None
    binding: tuple[tuple[str, int], ...] | None = None
    # ar: combination entries are (dep step, encoding index, coefficient)
    table: str | None = None
    target: Equation | None = None
    combination: tuple[tuple[int, int, Fraction], ...] | None = None


@dataclass(frozen=True)
class Proof:
    goal: Statement
    steps: tuple[ProofStep, ...]
    seed: int
    law_of_sines: bool


def _dependencies(just, origins) -> list[Statement]:
    if isinstance(just, Given):
        return []
    if isinstance(just, ByRule):
        return list(just.instance.hypotheses)
    if isinstance(just, ByAR):
        seen = []
        for origin, _coeff in just.certificate.combination:
            s = origins[origin][0]
            if s not in seen:
                seen.append(s)
        return seen
    raise TypeError(f"unknown justification {just!r}")


def extract_proof(result: SaturationResult, goal: Statement | None = None) -> Proof:
    """Minimal backward slice from the goal, topologically ordered by epoch."""
    goal = goal if goal is not None else result.goal
    if goal not in result.records:
        raise GoalNotProven("goal is not established; no proof to extract")

    needed: set[Statement] = set()
    stack = [goal]
    while stack:
        s = stack.pop()
        if s in needed:
            continue
        needed.add(s)
        stack.extend(_dependencies(result.records[s].justification, result.origins))

    ordered = sorted(needed, key=lambda s: result.records[s].epoch)
    index = {s: i for i, s in enumerate(ordered)}

    steps: list[ProofStep] = []
    for s in ordered:
        just = result.records[s].justification
        deps = tuple(sorted(index[d] for d in _dependencies(just, result.origins)))
        if isinstance(just, Given):
            steps.append(
                ProofStep(statement=s, kind="given", deps=deps, construction=just.step, axiom=just.axiom)
            )
        elif isinstance(just, ByRule):
            steps.append(
                ProofStep(
                    statement=s,
                    kind="rule",
                    deps=deps,
                    rule_id=just.instance.rule_id,
                    binding=just.instance.binding,
                )
            )
        else:
            combo = tuple(
                (index[result.origins[origin][0]], result.origins[origin][1], coeff)
                for origin, coeff in just.certificate.combination
            )
            steps.append(
                ProofStep(
                    statement=s,
                    kind="ar",
                    deps=deps,
                    table=just.table,
                    target=just.certificate.target,
                    combination=combo,
                )
            )
    return Proof(goal=goal, steps=tuple(steps), seed=result.seed, law_of_sines=result.law_of_sines)
