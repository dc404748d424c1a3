"""Independent proof checking.

The checker never searches: given steps are compared against the
construction's own implied facts, rule steps are re-instantiated from the
catalog and compared against their dependencies, algebraic steps are
replayed by exact rational summation, and every statement is additionally
evaluated numerically on a fresh diagram (a different sub-seed from the one
the prover used).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .ar import ar_targets, combine, sine_axiom_statements, statement_to_equations
from .diagram import TOL_CHECK, build_diagram, numeric_holds
from .engine import Proof
from .errors import DdarError, ExtensionDisabled
from .geometry import Problem
from .matcher import instantiate
from .rules import Rule

VERIFY_SEED_OFFSET = 0x5EED


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(reason: str) -> VerifyResult:
    return VerifyResult(False, reason)


def verify_proof(proof: Proof, problem: Problem, catalog: list[Rule]) -> VerifyResult:
    """Check a proof against its problem; first failure wins."""
    try:
        return _verify(proof, problem, catalog)
    except DdarError as exc:
        return _fail(f"malformed proof: {exc}")
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        return _fail(f"malformed proof: {exc!r}")


def _verify(proof: Proof, problem: Problem, catalog: list[Rule]) -> VerifyResult:
    steps = proof.steps
    if not steps:
        return _fail("empty proof")
    if steps[-1].statement != proof.goal:
        return _fail("final step is not the goal")
    if proof.goal != problem.goal:
        return _fail("proof goal differs from the problem goal")

    statements = [s.statement for s in steps]
    seen = set()
    for i, step in enumerate(steps):
        for d in step.deps:
            if not (0 <= d < i):
                return _fail(f"step {i}: dependency {d} does not precede it")
        key = step.statement.key()
        if key in seen:
            return _fail(f"step {i}: statement repeats an earlier step")
        seen.add(key)

    given_facts = {s for _, s in problem.given_statements()}
    sine_axioms = set()
    if proof.law_of_sines:
        for tri in combinations(range(len(problem.points)), 3):
            sine_axioms.update(sine_axiom_statements(*tri))

    rules_by_id = {r.id: r for r in catalog}

    for i, step in enumerate(steps):
        if step.kind == "given":
            if step.deps:
                return _fail(f"step {i}: given steps take no dependencies")
            if step.axiom == "law_of_sines":
                if not proof.law_of_sines:
                    return _fail(f"step {i}: sine axiom used without the extension")
                if step.statement not in sine_axioms:
                    return _fail(f"step {i}: not a legal law-of-sines axiom")
            elif step.statement not in given_facts:
                return _fail(f"step {i}: not implied by any construction")
            elif step.construction is not None:
                con = problem.constructions[step.construction]
                if step.statement not in con.implied:
                    return _fail(f"step {i}: construction {step.construction} does not imply it")
        elif step.kind == "rule":
            rule = rules_by_id.get(step.rule_id)
            if rule is None:
                return _fail(f"step {i}: rule {step.rule_id!r} not in catalog")
            binding = dict(step.binding)
            missing = [v for v in rule.variables() if v not in binding]
            if missing:
                return _fail(f"step {i}: binding misses variables {missing}")
            try:
                conclusion = instantiate(rule.conclusion, binding)
                hyps = {instantiate(p, binding) for p in rule.hypotheses}
            except ValueError as exc:
                return _fail(f"step {i}: degenerate instantiation ({exc})")
            if conclusion != step.statement:
                return _fail(f"step {i}: statement is not the rule's conclusion")
            dep_statements = {statements[d] for d in step.deps}
            if dep_statements != hyps:
                return _fail(f"step {i}: dependencies do not match the rule's hypotheses")
        elif step.kind == "ar":
            try:
                valid_targets = {
                    eq.key() for eq in ar_targets(step.statement, law_of_sines=proof.law_of_sines)
                }
            except ExtensionDisabled:
                valid_targets = set()
            if step.target.key() not in valid_targets:
                return _fail(f"step {i}: target equation does not encode the statement")
            if step.target.table != step.table:
                return _fail(f"step {i}: target table mismatch")
            equations = {}
            combo = []
            used_deps = set()
            for k, (dep, enc, coeff) in enumerate(step.combination):
                if not (0 <= dep < i):
                    return _fail(f"step {i}: combination cites step {dep} out of range")
                used_deps.add(dep)
                try:
                    eqs = statement_to_equations(statements[dep], law_of_sines=proof.law_of_sines)
                except ExtensionDisabled:
                    return _fail(f"step {i}: cited statement needs a disabled extension")
                if not (0 <= enc < len(eqs)):
                    return _fail(f"step {i}: encoding index {enc} out of range for step {dep}")
                if eqs[enc].table != step.table:
                    return _fail(f"step {i}: cited equation lives in table {eqs[enc].table}")
                equations[k] = eqs[enc]
                combo.append((k, coeff))
            if used_deps != set(step.deps):
                return _fail(f"step {i}: dependency list does not match the combination")
            replay = combine(equations, combo, step.table)
            if replay.key() != step.target.normalized().key():
                return _fail(f"step {i}: certificate does not re-sum to the target")
        else:
            return _fail(f"step {i}: unknown justification kind {step.kind!r}")

    # belt and suspenders: all statements must hold on a fresh diagram
    coords = build_diagram(problem, seed=proof.seed + VERIFY_SEED_OFFSET)
    for i, step in enumerate(steps):
        if not numeric_holds(step.statement, coords, TOL_CHECK):
            return _fail(f"step {i}: statement fails numerically on a fresh diagram")
    return VerifyResult(True, "ok")
