"""ddar: a plane-geometry prover combining numeric rule matching,
forward-chaining deduction, and exact-rational linear reasoning with
independently checkable certificates."""

from .ar import ARTable, Certificate, Equation, law_of_sines_equations, statement_to_equations
from .diagram import Coordinates, build_diagram, numeric_holds
from .engine import Proof, SaturationResult, SolverConfig, extract_proof, saturate
from .geometry import Construction, Problem, Statement, canonicalize_statement, stmt
from .matcher import ConfigSet, RuleInstance, detect_configurations, match_rules
from .parser import parse_problem, problem_from_json, problem_to_json, serialize_problem
from .rules import Rule, load_catalog
from .solver import SolveReport, corpus_dir, solve_problem
from .verify import VerifyResult, verify_proof

__version__ = "0.1.0"

__all__ = [
    "ARTable",
    "Certificate",
    "ConfigSet",
    "Construction",
    "Coordinates",
    "Equation",
    "Problem",
    "Proof",
    "Rule",
    "RuleInstance",
    "SaturationResult",
    "SolveReport",
    "SolverConfig",
    "Statement",
    "VerifyResult",
    "build_diagram",
    "canonicalize_statement",
    "corpus_dir",
    "detect_configurations",
    "extract_proof",
    "law_of_sines_equations",
    "load_catalog",
    "match_rules",
    "numeric_holds",
    "parse_problem",
    "problem_from_json",
    "problem_to_json",
    "saturate",
    "serialize_problem",
    "solve_problem",
    "statement_to_equations",
    "stmt",
    "verify_proof",
]
