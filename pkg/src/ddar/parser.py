"""The constructive problem language.

Grammar (UTF-8, LF): one construction per logical line, where logical lines
are separated by newlines or semicolons and ``#`` starts a comment::

    <name> = <constructor> <arg-point>...
    ? <predicate> <arg-point>...

The goal line starts with ``?`` and must come last.  Equation goals use::

    ? areq <table> <coeff> <p> <q> [<coeff> <p> <q> ...] [= <const>]

where a term may also be ``<coeff> sin <vertex> <p> <q>`` (log table only).
Coefficients and the constant are rationals like ``2``, ``-1`` or ``3/4``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .ar import Equation, seg, sin_key
from .errors import (
    ArityMismatch,
    DuplicatePoint,
    MissingGoal,
    ProblemSyntaxError,
    UndeclaredPoint,
    UnknownConstructor,
)
from .geometry import ARITY, CONSTRUCTORS, TABLES, Construction, Problem, Statement, implied_statements, stmt


def _logical_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for part in line.split(";"):
            part = part.strip()
            if part:
                yield line_no, part


def _parse_fraction(token: str, line_no: int, line: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ProblemSyntaxError(f"bad rational {token!r}", line_no, line)


def _parse_equation(tokens: list[str], name_to_id, line_no: int, line: str) -> Equation:
    if not tokens:
        raise ArityMismatch("areq needs a table tag", line_no, line)
    table = tokens[0]
    if table not in TABLES:
        raise ProblemSyntaxError(f"unknown table {table!r}", line_no, line)
    rest = tokens[1:]
    const = Fraction(0)
    if "=" in rest:
        idx = rest.index("=")
        if idx != len(rest) - 2:
            raise ProblemSyntaxError("constant must be the final '= <value>'", line_no, line)
        # "<terms> = v" reads as sum(terms) - v = 0
        const = -_parse_fraction(rest[-1], line_no, line)
        rest = rest[:idx]
    terms = []
    i = 0
    while i < len(rest):
        coeff = _parse_fraction(rest[i], line_no, line)
        i += 1
        if i < len(rest) and rest[i] == "sin":
            if table != "log":
                raise ProblemSyntaxError("sine terms are only valid in the log table", line_no, line)
            if len(rest) - i < 4:
                raise ArityMismatch("sin term needs three points", line_no, line)
            v, p, q = (name_to_id(tok, line_no, line) for tok in rest[i + 1 : i + 4])
            try:
                terms.append((sin_key(v, p, q), coeff))
            except ValueError as exc:
                raise ProblemSyntaxError(str(exc), line_no, line)
            i += 4
        else:
            if len(rest) - i < 2:
                raise ArityMismatch("segment term needs two points", line_no, line)
            p, q = (name_to_id(tok, line_no, line) for tok in rest[i : i + 2])
            try:
                terms.append((seg(p, q), coeff))
            except ValueError as exc:
                raise ProblemSyntaxError(str(exc), line_no, line)
            i += 2
    return Equation.make(table, terms, const)


def parse_statement(tokens: list[str], name_to_id, line_no: int = 0, line: str = "") -> Statement:
    """Parse ``<predicate> <args...>`` with names resolved by ``name_to_id``."""
    if not tokens:
        raise ProblemSyntaxError("empty statement", line_no, line)
    kind = tokens[0]
    if kind == "areq":
        return stmt("areq", (), payload=_parse_equation(tokens[1:], name_to_id, line_no, line))
    if kind not in ARITY:
        raise ProblemSyntaxError(f"unknown predicate {kind!r}", line_no, line)
    args = tokens[1:]
    if len(args) != ARITY[kind]:
        raise ArityMismatch(
            f"{kind} takes {ARITY[kind]} points, got {len(args)}", line_no, line
        )
    ids = tuple(name_to_id(tok, line_no, line) for tok in args)
    try:
        return stmt(kind, ids)
    except ValueError as exc:
        raise ProblemSyntaxError(str(exc), line_no, line)


def parse_problem(text: str, name: str = "") -> Problem:
    """Parse problem source into a :class:`Problem` with implied statements."""
    points: list[str] = []
    index: dict[str, int] = {}
    constructions: list[Construction] = []
    goal: Statement | None = None

    def name_to_id(token: str, line_no: int, line: str) -> int:
        if token not in index:
            raise UndeclaredPoint(f"point {token!r} is not declared", line_no, line)
        return index[token]

    for line_no, line in _logical_lines(text):
        if line.startswith("?"):
            if goal is not None:
                raise ProblemSyntaxError("multiple goal lines", line_no, line)
            goal = parse_statement(line[1:].split(), name_to_id, line_no, line)
            continue
        if goal is not None:
            raise ProblemSyntaxError("construction after the goal line", line_no, line)
        if "=" not in line:
            raise ProblemSyntaxError("expected '<name> = <constructor> ...'", line_no, line)
        lhs, rhs = line.split("=", 1)
        pname = lhs.strip()
        if not pname or " " in pname:
            raise ProblemSyntaxError(f"bad point name {pname!r}", line_no, line)
        if pname in index:
            raise DuplicatePoint(f"point {pname!r} already declared", line_no, line)
        tokens = rhs.split()
        if not tokens:
            raise ProblemSyntaxError("missing constructor", line_no, line)
        kind = tokens[0]
        if kind not in CONSTRUCTORS:
            raise UnknownConstructor(f"unknown constructor {kind!r}", line_no, line)
        want = CONSTRUCTORS[kind]
        if len(tokens) - 1 != want:
            raise ArityMismatch(
                f"{kind} takes {want} points, got {len(tokens) - 1}", line_no, line
            )
        args = tuple(name_to_id(tok, line_no, line) for tok in tokens[1:])
        out = len(points)
        index[pname] = out
        points.append(pname)
        constructions.append(
            Construction(kind=kind, out=out, args=args, implied=implied_statements(kind, out, args))
        )

    if goal is None:
        raise MissingGoal("no goal line ('? <predicate> ...')")
    return Problem(points=tuple(points), constructions=tuple(constructions), goal=goal, name=name)


# ---------------------------------------------------------------------------
# Serialization


def format_equation(eq: Equation, id_to_name) -> str:
    parts = [eq.table]
    for key, coeff in eq.terms:
        parts.append(str(coeff))
        if key[0] == "sin":
            parts.append("sin")
            parts.extend(id_to_name(p) for p in key[1:])
        else:
            parts.extend(id_to_name(p) for p in key[1:])
    if eq.const:
        parts.extend(["=", str(-eq.const)])
    return " ".join(parts)


def format_statement(s: Statement, id_to_name) -> str:
    if s.kind == "areq":
        return "areq " + format_equation(s.payload, id_to_name)
    return " ".join([s.kind, *(id_to_name(p) for p in s.args)])


def serialize_problem(p: Problem) -> str:
    """Problem back to source text (canonical whitespace, no comments)."""
    lines = []
    for c in p.constructions:
        args = " ".join(p.points[a] for a in c.args)
        lines.append(f"{p.points[c.out]} = {c.kind}{' ' + args if args else ''}")
    lines.append("? " + format_statement(p.goal, p.point_name))
    return "\n".join(lines) + "\n"


def _equation_to_obj(eq: Equation, id_to_name) -> dict:
    terms = []
    for key, coeff in eq.terms:
        entry = {
            "var": {"kind": key[0], "points": [id_to_name(x) for x in key[1:]]},
            "num": str(coeff.numerator),
            "den": str(coeff.denominator),
        }
        terms.append(entry)
    return {
        "table": eq.table,
        "terms": terms,
        "const": {"num": str(eq.const.numerator), "den": str(eq.const.denominator)},
    }


def _equation_from_obj(obj: dict, name_to_id) -> Equation:
    terms = []
    for entry in obj["terms"]:
        pts = [name_to_id(x) for x in entry["var"]["points"]]
        if entry["var"]["kind"] == "sin":
            key = sin_key(*pts)
        else:
            key = seg(*pts)
        terms.append((key, Fraction(int(entry["num"]), int(entry["den"]))))
    const = Fraction(int(obj["const"]["num"]), int(obj["const"]["den"]))
    return Equation.make(obj["table"], terms, const)


def statement_to_obj(s: Statement, id_to_name) -> dict:
    obj = {"kind": s.kind, "points": [id_to_name(p) for p in s.args]}
    if s.payload is not None:
        obj["equation"] = _equation_to_obj(s.payload, id_to_name)
    return obj


def statement_from_obj(obj: dict, name_to_id) -> Statement:
    if obj["kind"] == "areq":
        return stmt("areq", (), payload=_equation_from_obj(obj["equation"], name_to_id))
    return stmt(obj["kind"], tuple(name_to_id(x) for x in obj["points"]))


def problem_to_json(p: Problem) -> str:
    obj = {
        "points": list(p.points),
        "constructions": [
            {"kind": c.kind, "out": p.points[c.out], "args": [p.points[a] for a in c.args]}
            for c in p.constructions
        ],
        "goal": statement_to_obj(p.goal, p.point_name),
    }
    return json.dumps(obj, indent=2, sort_keys=True)


def problem_from_json(text: str, name: str = "") -> Problem:
    obj = json.loads(text)
    points = tuple(obj["points"])
    index = {nm: i for i, nm in enumerate(points)}
    constructions = []
    for c in obj["constructions"]:
        out = index[c["out"]]
        args = tuple(index[a] for a in c["args"])
        constructions.append(
            Construction(kind=c["kind"], out=out, args=args, implied=implied_statements(c["kind"], out, args))
        )
    goal = statement_from_obj(obj["goal"], lambda nm: index[nm])
    return Problem(points=points, constructions=tuple(constructions), goal=goal, name=name)
