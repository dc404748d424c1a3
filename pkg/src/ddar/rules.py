"""Inference-rule catalog: parsing, validation, and the builtin rule file.

Catalog format, one rule per logical line (``#`` comments, blank lines ok)::

    rule <id>: <hyp> ; <hyp> ; ... => <conclusion>

Hypotheses and conclusions are statement patterns in problem-language
predicate syntax with ``$``-prefixed pattern variables.  Pattern variables
bind distinct points.  A conclusion may be an ``areq`` pattern, which turns
a linear identity into a first-class derivable statement::

    rule r_pgram_law: para $a $b $c $d ; para $b $c $a $d => areq sq 1 $a $c 1 $b $d -2 $a $b -2 $b $c

Rules are understood modulo nondegeneracy of the configuration they name
(distinct lines, genuine triangles); the matcher only instantiates a rule
when hypotheses *and* conclusion hold on the diagram, which enforces those
side conditions per instance.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from fractions import Fraction

from .errors import CatalogError
from .geometry import ARITY, TABLES

BUILTIN_CATALOG = "data/rules.txt"


@dataclass(frozen=True)
class Pattern:
    """A statement pattern: predicate kind plus variable tuple.

    For ``areq`` conclusions, ``equation`` holds (table, terms, const) where
    each term is (coefficient, var, var) or (coefficient, 'sin', var, var, var).
    """

    kind: str
    vars: tuple[str, ...]
    equation: tuple | None = None

    def all_vars(self) -> set[str]:
        if self.kind == "areq":
            out: set[str] = set()
            for term in self.equation[1]:
                if term[1] == "sin":
                    out.update(term[2:])
                else:
                    out.update(term[1:])
            return out
        return set(self.vars)


@dataclass(frozen=True)
class Rule:
    id: str
    hypotheses: tuple[Pattern, ...]
    conclusion: Pattern
    source: str = "builtin"  # builtin | mined

    def variables(self) -> list[str]:
        seen: list[str] = []
        for pat in (*self.hypotheses, self.conclusion):
            for v in sorted(pat.all_vars()):
                if v not in seen:
                    seen.append(v)
        return seen


def _parse_pattern_tokens(tokens: list[str], where: str) -> Pattern:
    if not tokens:
        raise CatalogError(f"{where}: empty pattern")
    kind = tokens[0]
    args = tokens[1:]
    if kind == "areq":
        return _parse_areq_pattern(args, where)
    if kind not in ARITY:
        raise CatalogError(f"{where}: unknown predicate {kind!r}")
    if len(args) != ARITY[kind]:
        raise CatalogError(f"{where}: {kind} takes {ARITY[kind]} arguments, got {len(args)}")
    for tok in args:
        if not tok.startswith("$") or len(tok) < 2:
            raise CatalogError(f"{where}: expected $variable, got {tok!r}")
    return Pattern(kind=kind, vars=tuple(t[1:] for t in args))


def _parse_areq_pattern(tokens: list[str], where: str) -> Pattern:
    if not tokens or tokens[0] not in TABLES:
        raise CatalogError(f"{where}: areq needs a table tag")
    table = tokens[0]
    rest = tokens[1:]
    const = Fraction(0)
    if "=" in rest:
        idx = rest.index("=")
        if idx != len(rest) - 2:
            raise CatalogError(f"{where}: constant must be the final '= <value>'")
        const = -Fraction(rest[-1])
        rest = rest[:idx]
    terms = []
    i = 0
    while i < len(rest):
        try:
            coeff = Fraction(rest[i])
        except (ValueError, ZeroDivisionError):
            raise CatalogError(f"{where}: bad coefficient {rest[i]!r}")
        i += 1
        if i < len(rest) and rest[i] == "sin":
            if len(rest) - i < 4:
                raise CatalogError(f"{where}: sin term needs three points")
            pts = rest[i + 1 : i + 4]
            i += 4
            vars_ = tuple(t[1:] for t in pts)
            if not all(t.startswith("$") for t in pts):
                raise CatalogError(f"{where}: expected $variables in sin term")
            terms.append((coeff, "sin", *vars_))
        else:
            if len(rest) - i < 2:
                raise CatalogError(f"{where}: segment term needs two points")
            pts = rest[i : i + 2]
            i += 2
            if not all(t.startswith("$") for t in pts):
                raise CatalogError(f"{where}: expected $variables in segment term")
            terms.append((coeff, pts[0][1:], pts[1][1:]))
    return Pattern(kind="areq", vars=(), equation=(table, tuple(terms), const))


def parse_catalog(text: str, source: str = "builtin") -> list[Rule]:
    rules: list[Rule] = []
    seen_ids: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"catalog line {line_no}"
        if not line.startswith("rule "):
            raise CatalogError(f"{where}: expected 'rule <id>: ...'")
        head, _, body = line[5:].partition(":")
        rule_id = head.strip()
        if not rule_id or not body:
            raise CatalogError(f"{where}: expected 'rule <id>: ...'")
        if rule_id in seen_ids:
            raise CatalogError(f"{where}: duplicate rule id {rule_id!r}")
        seen_ids.add(rule_id)
        if "=>" not in body:
            raise CatalogError(f"{where}: missing '=>'")
        hyp_src, _, concl_src = body.partition("=>")
        hyps = tuple(
            _parse_pattern_tokens(chunk.split(), where)
            for chunk in hyp_src.split(";")
            if chunk.strip()
        )
        if not hyps:
            raise CatalogError(f"{where}: rule has no hypotheses")
        for pat in hyps:
            if pat.kind == "areq":
                raise CatalogError(f"{where}: areq patterns are only allowed as conclusions")
        conclusion = _parse_pattern_tokens(concl_src.split(), where)
        rule = Rule(id=rule_id, hypotheses=hyps, conclusion=conclusion, source=source)
        hyp_vars = set().union(*(p.all_vars() for p in hyps))
        extra = conclusion.all_vars() - hyp_vars
        if extra:
            raise CatalogError(
                f"{where}: conclusion variables {sorted(extra)} not bound by any hypothesis"
            )
        rules.append(rule)
    return rules


def load_catalog(path: str | None = None) -> list[Rule]:
    """Load the builtin catalog, or a user catalog file when given."""
    if path is None:
        text = importlib.resources.files("ddar").joinpath(BUILTIN_CATALOG).read_text("utf-8")
        return parse_catalog(text, source="builtin")
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh.read(), source="mined")


def rule_by_id(catalog: list[Rule], rule_id: str) -> Rule:
    for rule in catalog:
        if rule.id == rule_id:
            return rule
    raise CatalogError(f"rule {rule_id!r} not in catalog")
