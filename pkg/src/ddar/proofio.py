"""Proof serialization: a stable JSON form and a human-readable rendering.

The JSON form is deliberately self-contained for checking: every step
carries its statement, justification, and dependency indices; algebraic
steps carry the target equation and the exact combination, with
arbitrary-precision integers as decimal strings.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .engine import Proof, ProofStep
from .errors import DdarError
from .geometry import Problem
from .parser import (
    format_equation,
    format_statement,
    statement_from_obj,
    statement_to_obj,
    _equation_from_obj,
    _equation_to_obj,
)

FORMAT_TAG = "ddar-proof-v1"


def proof_to_json(proof: Proof, problem: Problem) -> str:
    name = problem.point_name
    steps = []
    for i, step in enumerate(proof.steps):
        just: dict = {"kind": step.kind}
        if step.kind == "given":
            if step.axiom:
                just["axiom"] = step.axiom
            else:
                just["construction"] = step.construction
        elif step.kind == "rule":
            just["rule"] = step.rule_id
            just["binding"] = {v: name(p) for v, p in step.binding}
        else:
            just["table"] = step.table
            just["target"] = _equation_to_obj(step.target, name)
            just["combination"] = [
                {"step": dep, "eq": enc, "num": str(c.numerator), "den": str(c.denominator)}
                for dep, enc, c in step.combination
            ]
        steps.append(
            {
                "index": i,
                "statement": statement_to_obj(step.statement, name),
                "justification": just,
                "deps": list(step.deps),
            }
        )
    obj = {
        "format": FORMAT_TAG,
        "goal": statement_to_obj(proof.goal, name),
        "meta": {"seed": proof.seed, "law_of_sines": proof.law_of_sines},
        "steps": steps,
    }
    return json.dumps(obj, indent=2, sort_keys=True)


def proof_from_json(text: str, problem: Problem) -> Proof:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DdarError(f"proof is not valid JSON: {exc}")
    if not isinstance(obj, dict) or obj.get("format") != FORMAT_TAG:
        raise DdarError(f"not a {FORMAT_TAG} document")
    index = {nm: i for i, nm in enumerate(problem.points)}

    def name_to_id(nm: str) -> int:
        if nm not in index:
            raise DdarError(f"proof references unknown point {nm!r}")
        return index[nm]

    steps = []
    try:
        for entry in obj["steps"]:
            statement = statement_from_obj(entry["statement"], name_to_id)
            just = entry["justification"]
            kind = just["kind"]
            deps = tuple(int(d) for d in entry["deps"])
            if kind == "given":
                steps.append(
                    ProofStep(
                        statement=statement,
                        kind="given",
                        deps=deps,
                        construction=just.get("construction"),
                        axiom=just.get("axiom"),
                    )
                )
            elif kind == "rule":
                binding = tuple(sorted((v, name_to_id(p)) for v, p in just["binding"].items()))
                steps.append(
                    ProofStep(
                        statement=statement,
                        kind="rule",
                        deps=deps,
                        rule_id=just["rule"],
                        binding=binding,
                    )
                )
            elif kind == "ar":
                combination = tuple(
                    (int(e["step"]), int(e["eq"]), Fraction(int(e["num"]), int(e["den"])))
                    for e in just["combination"]
                )
                steps.append(
                    ProofStep(
                        statement=statement,
                        kind="ar",
                        deps=deps,
                        table=just["table"],
                        target=_equation_from_obj(just["target"], name_to_id),
                        combination=combination,
                    )
                )
            else:
                raise DdarError(f"unknown justification kind {kind!r}")
        goal = statement_from_obj(obj["goal"], name_to_id)
        meta = obj.get("meta", {})
        return Proof(
            goal=goal,
            steps=tuple(steps),
            seed=int(meta.get("seed", 0)),
            law_of_sines=bool(meta.get("law_of_sines", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DdarError(f"malformed proof document: {exc!r}")


def proof_to_text(proof: Proof, problem: Problem) -> str:
    name = problem.point_name
    lines = [f"goal: {format_statement(proof.goal, name)}", ""]
    for i, step in enumerate(proof.steps):
        body = format_statement(step.statement, name)
        if step.kind == "given":
            if step.axiom:
                why = f"axiom {step.axiom}"
            else:
                con = problem.constructions[step.construction]
                args = " ".join(problem.points[a] for a in con.args)
                why = f"construction {problem.points[con.out]} = {con.kind}{' ' + args if args else ''}"
        elif step.kind == "rule":
            binding = ", ".join(f"${v}={name(p)}" for v, p in step.binding)
            why = f"rule {step.rule_id} [{binding}]"
        else:
            parts = [
                f"{c} x (step {dep}.{enc})" for dep, enc, c in step.combination
            ]
            why = f"linear combination in {step.table}: " + (" + ".join(parts) if parts else "0")
        dep_str = f"  <- {list(step.deps)}" if step.deps else ""
        lines.append(f"{i:3d}. {body}{dep_str}")
        lines.append(f"     [{why}]")
    lines.append("")
    lines.append(f"proved: {format_statement(proof.goal, name)}")
    return "\n".join(lines) + "\n"
