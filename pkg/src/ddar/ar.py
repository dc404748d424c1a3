"""Exact linear reasoning over three tables: lengths, log-lengths, squared lengths.

Every equation is a rational linear form over segment (or sine) variables.
Each table keeps a fully reduced echelon form that is updated on every
insertion, together with per-row provenance: the exact rational combination
of originally inserted equations that produced the row.  Queries reduce a
target equation against the rows; a zero residual yields a certificate that
replays by plain rational summation.  Pending queries keep their partially
reduced residual and a row watermark so a later attempt only applies rows
added since.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable

from .errors import ExtensionDisabled, InconsistentSystem
from .geometry import TABLES, Statement, stmt

# Variable keys.  Segments are canonical unordered point pairs; sine keys
# (vertex, smaller endpoint, larger endpoint) are only legal in the "log"
# table with the law-of-sines extension enabled.
VarKey = tuple


def seg(a: int, b: int) -> VarKey:
    if a == b:
        raise ValueError("zero-length segment has no variable")
    return ("seg", a, b) if a < b else ("seg", b, a)


def sin_key(vertex: int, p: int, q: int) -> VarKey:
    if len({vertex, p, q}) != 3:
        raise ValueError("sine key needs three distinct points")
    return ("sin", vertex, p, q) if p < q else ("sin", vertex, q, p)


@dataclass(frozen=True)
class Equation:
    """A normalized linear form ``sum(coeff * var) + const = 0``.

    Invariants: no zero coefficients, terms sorted by variable key, content
    gcd one, first coefficient positive (or positive constant if no terms).
    """

    table: str
    terms: tuple[tuple[VarKey, Fraction], ...]
    const: Fraction = Fraction(0)

    @staticmethod
    def make(table: str, terms: Iterable[tuple[VarKey, Fraction | int]], const=0) -> "Equation":
        acc: dict[VarKey, Fraction] = {}
        for key, coeff in terms:
            acc[key] = acc.get(key, Fraction(0)) + Fraction(coeff)
        return _normalize(table, acc, Fraction(const))

    def normalized(self) -> "Equation":
        return _normalize(self.table, dict(self.terms), self.const)

    def is_zero(self) -> bool:
        return not self.terms and self.const == 0

    def is_contradiction(self) -> bool:
        return not self.terms and self.const != 0

    def points(self) -> set[int]:
        pts: set[int] = set()
        for key, _ in self.terms:
            pts.update(key[1:])
        return pts

    def has_sines(self) -> bool:
        return any(key[0] == "sin" for key, _ in self.terms)

    def key(self):
        return (self.table, self.terms, self.const)

    def __repr__(self) -> str:
        parts = [f"{c}*{k}" for k, c in self.terms]
        parts.append(str(self.const))
        return f"Eq[{self.table}] " + " + ".join(parts) + " = 0"


def _normalize(table: str, acc: dict[VarKey, Fraction], const: Fraction) -> Equation:
    if table not in TABLES:
        raise ValueError(f"unknown table tag {table!r}")
    items = sorted((k, c) for k, c in acc.items() if c != 0)
    values = [c for _, c in items] + ([const] if const else [])
    if not values:
        return Equation(table, (), Fraction(0))
    # scale so all entries are integers with gcd 1 and the leading entry
    # (first term in pivot order, else the constant) is positive
    denom_lcm = 1
    for v in values:
        denom_lcm = denom_lcm * v.denominator // gcd(denom_lcm, v.denominator)
    scaled = [v * denom_lcm for v in values]
    g = 0
    for v in scaled:
        g = gcd(g, int(v))
    factor = Fraction(denom_lcm, g)
    lead = values[0]
    if lead < 0:
        factor = -factor
    return Equation(
        table,
        tuple((k, c * factor) for k, c in items),
        const * factor,
    )


# ---------------------------------------------------------------------------
# Statement encodings


def statement_to_equations(s: Statement, law_of_sines: bool = False) -> list[Equation]:
    """Linear-table content of a statement.

    cong feeds all three tables (plain, squared, and log equality of the two
    lengths); perp feeds the squared-length identity; midp feeds the defining
    length relations; eqratio feeds the log table; areq passes its payload
    through.  Angle-only kinds (coll, cyclic, para, eqangle) have no linear
    content here and are handled purely by deduction rules.
    """
    k = s.kind
    if k == "cong":
        a, b, c, d = s.args
        if seg(a, b) == seg(c, d):
            return []
        return [
            Equation.make("len", [(seg(a, b), 1), (seg(c, d), -1)]),
            Equation.make("sq", [(seg(a, b), 1), (seg(c, d), -1)]),
            Equation.make("log", [(seg(a, b), 1), (seg(c, d), -1)]),
        ]
    if k == "perp":
        a, b, c, d = s.args
        return [perp_equation(a, b, c, d)]
    if k == "midp":
        m, a, b = s.args
        return [
            Equation.make("len", [(seg(a, m), 1), (seg(m, b), -1)]),
            Equation.make("len", [(seg(a, b), 1), (seg(a, m), -2)]),
            Equation.make("sq", [(seg(a, m), 1), (seg(m, b), -1)]),
            Equation.make("sq", [(seg(a, b), 1), (seg(a, m), -4)]),
            Equation.make("log", [(seg(a, m), 1), (seg(m, b), -1)]),
        ]
    if k == "eqratio":
        a, b, c, d, e, f, g, h = s.args
        return [
            Equation.make(
                "log",
                [(seg(a, b), 1), (seg(c, d), -1), (seg(e, f), -1), (seg(g, h), 1)],
            )
        ]
    if k == "areq":
        eq = s.payload
        if eq.has_sines() and not law_of_sines:
            raise ExtensionDisabled("equation uses sine variables; enable law of sines")
        return [] if eq.is_zero() else [eq]
    return []


def perp_equation(a: int, b: int, c: int, d: int) -> Equation:
    """Squared-length identity equivalent to segment ab being perpendicular
    to segment cd: |ac|^2 + |bd|^2 - |ad|^2 - |bc|^2 = 0 (zero-length
    segments between coincident points contribute nothing)."""
    terms = []
    for p, q, sign in ((a, c, 1), (b, d, 1), (a, d, -1), (b, c, -1)):
        if p != q:
            terms.append((seg(p, q), sign))
    return Equation.make("sq", terms)


def ar_targets(s: Statement, law_of_sines: bool = False) -> list[Equation]:
    """Alternative single-equation encodings whose derivability each
    suffices to establish the statement."""
    k = s.kind
    if k == "cong":
        a, b, c, d = s.args
        if seg(a, b) == seg(c, d):
            return []
        return [
            Equation.make("len", [(seg(a, b), 1), (seg(c, d), -1)]),
            Equation.make("sq", [(seg(a, b), 1), (seg(c, d), -1)]),
            Equation.make("log", [(seg(a, b), 1), (seg(c, d), -1)]),
        ]
    if k == "perp":
        return [perp_equation(*s.args)]
    if k == "eqratio":
        return statement_to_equations(s)
    if k == "areq":
        return statement_to_equations(s, law_of_sines=law_of_sines)
    return []


def law_of_sines_equations(a: int, b: int, c: int) -> list[Equation]:
    """Two independent log-table relations tying each triangle side to the
    sine of its opposite angle: |bc|/sin(A) = |ca|/sin(B) = |ab|/sin(C)."""
    return [
        Equation.make(
            "log",
            [
                (seg(b, c), 1),
                (sin_key(a, b, c), -1),
                (seg(c, a), -1),
                (sin_key(b, c, a), 1),
            ],
        ),
        Equation.make(
            "log",
            [
                (seg(c, a), 1),
                (sin_key(b, c, a), -1),
                (seg(a, b), -1),
                (sin_key(c, a, b), 1),
            ],
        ),
    ]


def sine_axiom_statements(a: int, b: int, c: int) -> list[Statement]:
    return [stmt("areq", (), payload=eq) for eq in law_of_sines_equations(a, b, c)]


# ---------------------------------------------------------------------------
# Certificates and the table itself


@dataclass(frozen=True)
class Certificate:
    """Exact witness: ``target`` equals the combination of inserted equations."""

    table: str
    target: Equation
    combination: tuple[tuple[int, Fraction], ...]  # (inserted id, coefficient)


def combine(equations: dict[int, Equation], combination: Iterable[tuple[int, Fraction]], table: str) -> Equation:
    """Rational summation of inserted equations; the replay primitive."""
    acc: dict[VarKey, Fraction] = {}
    const = Fraction(0)
    for eq_id, coeff in combination:
        eq = equations[eq_id]
        for key, c in eq.terms:
            acc[key] = acc.get(key, Fraction(0)) + coeff * c
        const += coeff * eq.const
    items = tuple(sorted((k, c) for k, c in acc.items() if c != 0))
    return Equation(table, items, const)


@dataclass
class _Row:
    pivot: VarKey
    terms: dict  # VarKey -> Fraction
    const: Fraction
    prov: dict  # inserted id -> Fraction


@dataclass
class _Pending:
    terms: dict
    const: Fraction
    comb: dict
    watermark: int


class InsertReport:
    NEW_ROW = "new_row"
    REDUNDANT = "redundant"
    INCONSISTENT = "inconsistent"


@dataclass
class ARTable:
    """One incremental exact linear system with certificate provenance."""

    table: str
    resume_queries: bool = True
    rows: list[_Row] = field(default_factory=list)
    inserted: dict[int, Equation] = field(default_factory=dict)
    pending: dict[tuple, _Pending] = field(default_factory=dict)
    row_ops: int = 0
    queries_resumed: int = 0

    def __post_init__(self):
        if self.table not in TABLES:
            raise ValueError(f"unknown table tag {self.table!r}")

    # -- reduction core ----------------------------------------------------

    def _apply_rows(self, terms: dict, const: Fraction, comb: dict, start: int) -> Fraction:
        """Eliminate pivots of rows[start:] from (terms, const) in place,
        accumulating the combination over inserted ids."""
        for row in self.rows[start:]:
            coeff = terms.get(row.pivot)
            if not coeff:
                continue
            f = coeff / row.terms[row.pivot]
            for key, c in row.terms.items():
                nv = terms.get(key, Fraction(0)) - f * c
                if nv:
                    terms[key] = nv
                else:
                    terms.pop(key, None)
            const -= f * row.const
            for eq_id, c in row.prov.items():
                nv = comb.get(eq_id, Fraction(0)) + f * c
                if nv:
                    comb[eq_id] = nv
                else:
                    comb.pop(eq_id, None)
            self.row_ops += 1
        return const

    # -- insertion ---------------------------------------------------------

    def insert(self, eq: Equation, origin: int) -> str:
        """Reduce ``eq`` against the rows; install the residual as a new row
        (restoring full reduction) unless it vanished."""
        if eq.table != self.table:
            raise ValueError(f"equation for table {eq.table!r} inserted into {self.table!r}")
        if origin in self.inserted:
            raise ValueError(f"inserted-equation id {origin} reused")
        self.inserted[origin] = eq

        terms = dict(eq.terms)
        comb: dict[int, Fraction] = {}
        const = self._apply_rows(terms, eq.const, comb, 0)

        if not terms:
            if const:
                raise InconsistentSystem(
                    f"table {self.table}: inserted equation reduces to {const} = 0"
                )
            return InsertReport.REDUNDANT

        # residual = eq - sum(comb * inserted); installed row is residual
        # rescaled so its own provenance replays exactly
        pivot = min(terms)
        prov = {eq_id: -c for eq_id, c in comb.items()}
        prov[origin] = prov.get(origin, Fraction(0)) + 1
        row = _Row(pivot=pivot, terms=terms, const=const, prov=prov)
        self._rescale(row)
        self.rows.append(row)

        # back-substitute the new pivot out of every earlier row
        for other in self.rows[:-1]:
            coeff = other.terms.get(pivot)
            if not coeff:
                continue
            f = coeff / row.terms[pivot]
            for key, c in row.terms.items():
                nv = other.terms.get(key, Fraction(0)) - f * c
                if nv:
                    other.terms[key] = nv
                else:
                    other.terms.pop(key, None)
            other.const -= f * row.const
            for eq_id, c in row.prov.items():
                nv = other.prov.get(eq_id, Fraction(0)) - f * c
                if nv:
                    other.prov[eq_id] = nv
                else:
                    other.prov.pop(eq_id, None)
            self._rescale(other)
            self.row_ops += 1
        return InsertReport.NEW_ROW

    @staticmethod
    def _rescale(row: _Row) -> None:
        """Scale a row to integer entries, gcd one, positive pivot."""
        values = list(row.terms.values()) + ([row.const] if row.const else [])
        denom_lcm = 1
        for v in values:
            denom_lcm = denom_lcm * v.denominator // gcd(denom_lcm, v.denominator)
        g = 0
        for v in values:
            g = gcd(g, int(v * denom_lcm))
        factor = Fraction(denom_lcm, g)
        if row.terms[row.pivot] < 0:
            factor = -factor
        if factor != 1:
            for key in row.terms:
                row.terms[key] *= factor
            row.const *= factor
            for eq_id in row.prov:
                row.prov[eq_id] *= factor

    # -- queries -----------------------------------------------------------

    def query(self, eq: Equation):
        """Return a :class:`Certificate` if ``eq`` is a consequence of the
        inserted equations, else ``None`` (query kept pending)."""
        if eq.table != self.table:
            raise ValueError(f"query for table {eq.table!r} against {self.table!r}")
        eq = eq.normalized()
        if eq.is_zero():
            return Certificate(self.table, eq, ())
        key = eq.key()

        state = self.pending.get(key) if self.resume_queries else None
        if state is None:
            state = _Pending(terms=dict(eq.terms), const=eq.const, comb={}, watermark=0)
        elif state.watermark > 0:
            self.queries_resumed += 1

        state.const = self._apply_rows(state.terms, state.const, state.comb, state.watermark)
        state.watermark = len(self.rows)

        if not state.terms and state.const == 0:
            combination = tuple(sorted((i, c) for i, c in state.comb.items() if c))
            cert = Certificate(self.table, eq, combination)
            self.pending.pop(key, None)
            replay = combine(self.inserted, cert.combination, self.table)
            if replay.key() != eq.key():
                raise InconsistentSystem(
                    f"table {self.table}: certificate replay mismatch for {eq!r}"
                )
            return cert
        if self.resume_queries:
            self.pending[key] = state
        return None

    # -- reference views ---------------------------------------------------

    def canonical_rows(self) -> set:
        """Normalized row equations; the comparison form for oracle tests."""
        out = set()
        for row in self.rows:
            eq = _normalize(self.table, dict(row.terms), row.const)
            out.add(eq.key())
        return out
