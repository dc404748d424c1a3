"""Domain model: statements over point ids, constructions, problems.

Statements are stored in canonical form only, so that two statements that
denote the same geometric relation compare (and hash) equal.  Canonical form
is the lexicographically smallest argument tuple over the statement kind's
symmetry group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from .ar import Equation

PointId = int

# Argument count per statement kind.  "areq" carries an Equation payload
# instead of point arguments.
ARITY = {
    "coll": 3,
    "cyclic": 4,
    "para": 4,
    "perp": 4,
    "cong": 4,
    "eqangle": 8,
    "eqratio": 8,
    "midp": 3,
    "areq": 0,
}

KINDS = tuple(ARITY)

# Linear-table tags an "areq" payload may belong to.
TABLES = ("len", "log", "sq")

# eqangle(a,b,c,d,e,f,g,h) and eqratio(a,b,c,d,e,f,g,h) are both relations
# of the form  v(s0) - v(s1) = v(s2) - v(s3)  over four two-point slots
# (line directions mod pi, or log lengths).  The slot permutations that
# preserve such a relation form a group of order eight.
_SLOT_PERMS = (
    (0, 1, 2, 3),
    (0, 2, 1, 3),
    (3, 1, 2, 0),
    (3, 2, 1, 0),
    (1, 0, 3, 2),
    (1, 3, 0, 2),
    (2, 0, 3, 1),
    (2, 3, 0, 1),
)

# para/perp/cong are unordered pairs of unordered two-point slots.
_PAIR_PERMS = ((0, 1), (1, 0))


@dataclass(frozen=True)
class Statement:
    """A canonical geometric relation.  Build via :func:`stmt`."""

    kind: str
    args: tuple[PointId, ...]
    payload: "Equation | None" = None

    def points(self) -> set[PointId]:
        pts = set(self.args)
        if self.payload is not None:
            pts |= self.payload.points()
        return pts

    def key(self):
        payload_key = self.payload.key() if self.payload is not None else ()
        return (self.kind, self.args, payload_key)

    def __lt__(self, other: "Statement") -> bool:
        return self.key() < other.key()

    def __repr__(self) -> str:
        if self.kind == "areq":
            return f"Statement(areq {self.payload!r})"
        return f"Statement({self.kind} {' '.join(map(str, self.args))})"


def slot_presentations(kind: str, args: tuple[int, ...]) -> list[tuple[tuple[int, int], ...]]:
    """Slot-order presentations of a segment-pair statement.

    The endpoints within a slot are interchangeable on top of these; callers
    that unify against patterns branch on endpoint order themselves.
    """
    if kind in ("para", "perp", "cong"):
        slots = ((args[0], args[1]), (args[2], args[3]))
        return [tuple(slots[i] for i in perm) for perm in _PAIR_PERMS]
    if kind in ("eqangle", "eqratio"):
        slots = ((args[0], args[1]), (args[2], args[3]), (args[4], args[5]), (args[6], args[7]))
        return [tuple(slots[i] for i in perm) for perm in _SLOT_PERMS]
    raise ValueError(f"{kind} has no segment slots")


def _canonical_slots(args: tuple[int, ...], perms) -> tuple[int, ...]:
    # sorting within each slot is lexicographically optimal slot-by-slot,
    # so the orbit minimum is the minimum over slot orders alone
    nslots = len(args) // 2
    slots = []
    for k in range(nslots):
        p, q = args[2 * k], args[2 * k + 1]
        slots.append((p, q) if p <= q else (q, p))
    best = None
    for perm in perms:
        cand = tuple(x for i in perm for x in slots[i])
        if best is None or cand < best:
            best = cand
    return best


def presentations(kind: str, args: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Every argument tuple denoting the same relation as ``args``."""
    if kind == "coll":
        a, b, c = args
        yield from (
            (a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a),
        )
    elif kind == "cyclic":
        import itertools

        yield from itertools.permutations(args)
    elif kind in ("para", "perp", "cong", "eqangle", "eqratio"):
        for slots in slot_presentations(kind, args):
            n = len(slots)
            for flips in range(1 << n):
                out = []
                for k, (p, q) in enumerate(slots):
                    if flips >> k & 1:
                        out.extend((q, p))
                    else:
                        out.extend((p, q))
                yield tuple(out)
    elif kind == "midp":
        m, a, b = args
        yield (m, a, b)
        yield (m, b, a)
    elif kind == "areq":
        yield args
    else:
        raise ValueError(f"unknown statement kind {kind!r}")


def validate_args(kind: str, args: tuple[int, ...]) -> None:
    if kind not in ARITY:
        raise ValueError(f"unknown statement kind {kind!r}")
    if len(args) != ARITY[kind]:
        raise ValueError(f"{kind} takes {ARITY[kind]} points, got {len(args)}")
    if kind in ("para", "perp", "eqangle"):
        for i in range(0, len(args), 2):
            if args[i] == args[i + 1]:
                raise ValueError(f"{kind} line ({args[i]}, {args[i + 1]}) is degenerate")
    if kind == "eqratio":
        for i in range(0, 8, 2):
            if args[i] == args[i + 1]:
                raise ValueError(f"eqratio segment ({args[i]}, {args[i + 1]}) has zero length")
    if kind == "midp" and args[1] == args[2]:
        raise ValueError("midp endpoints coincide")


def stmt(kind: str, args: tuple[int, ...] | list[int] = (), payload: "Equation | None" = None) -> Statement:
    """Create a statement in canonical form."""
    args = tuple(args)
    validate_args(kind, args)
    if kind == "areq":
        if payload is None:
            raise ValueError("areq requires an equation payload")
        if payload.table not in TABLES:
            raise ValueError(f"unknown table tag {payload.table!r}")
        return Statement("areq", (), payload.normalized())
    if payload is not None:
        raise ValueError(f"{kind} does not take a payload")
    if kind == "coll" or kind == "cyclic":
        canonical = tuple(sorted(args))
    elif kind == "midp":
        canonical = (args[0], *sorted(args[1:]))
    elif kind in ("para", "perp", "cong"):
        canonical = _canonical_slots(args, _PAIR_PERMS)
    elif kind in ("eqangle", "eqratio"):
        canonical = _canonical_slots(args, _SLOT_PERMS)
    else:
        canonical = min(presentations(kind, args))
    return Statement(kind, canonical)


def canonicalize_statement(s: Statement) -> Statement:
    """Idempotent canonical form; constant on each symmetry orbit."""
    return stmt(s.kind, s.args, s.payload)


# ---------------------------------------------------------------------------
# Constructions and problems


@dataclass(frozen=True)
class Construction:
    """One constructive step: ``out`` is defined from ``args`` points."""

    kind: str
    out: PointId
    args: tuple[PointId, ...]
    implied: tuple[Statement, ...]


# constructor name -> number of input points
CONSTRUCTORS = {
    "free": 0,
    "midpoint": 2,
    "on_line": 2,
    "on_circle": 2,
    "foot": 3,
    "circumcenter": 3,
    "intersect_ll": 4,
    "intersect_lc": 4,
    "intersect_cc": 4,
    "reflect": 3,
    "parallel_through": 3,
    "perp_through": 3,
}


def implied_statements(kind: str, out: PointId, args: tuple[PointId, ...]) -> tuple[Statement, ...]:
    """The defining relations a construction guarantees about its output."""
    o = out
    if kind == "free":
        return ()
    if kind == "midpoint":
        a, b = args
        return (
            stmt("midp", (o, a, b)),
            stmt("coll", (o, a, b)),
            stmt("cong", (a, o, o, b)),
        )
    if kind == "on_line":
        a, b = args
        return (stmt("coll", (o, a, b)),)
    if kind == "on_circle":
        c, r = args
        return (stmt("cong", (c, o, c, r)),)
    if kind == "foot":
        p, a, b = args
        return (
            stmt("coll", (o, a, b)),
            stmt("perp", (p, o, a, b)),
        )
    if kind == "circumcenter":
        a, b, c = args
        return (
            stmt("cong", (o, a, o, b)),
            stmt("cong", (o, b, o, c)),
            stmt("cong", (o, a, o, c)),
        )
    if kind == "intersect_ll":
        a, b, c, d = args
        return (
            stmt("coll", (o, a, b)),
            stmt("coll", (o, c, d)),
        )
    if kind == "intersect_lc":
        a, b, c, r = args
        return (
            stmt("coll", (o, a, b)),
            stmt("cong", (c, o, c, r)),
        )
    if kind == "intersect_cc":
        c1, r1, c2, r2 = args
        return (
            stmt("cong", (c1, o, c1, r1)),
            stmt("cong", (c2, o, c2, r2)),
        )
    if kind == "reflect":
        p, a, b = args
        return (
            stmt("cong", (a, p, a, o)),
            stmt("cong", (b, p, b, o)),
            stmt("perp", (p, o, a, b)),
        )
    if kind == "parallel_through":
        p, a, b = args
        return (stmt("para", (p, o, a, b)),)
    if kind == "perp_through":
        p, a, b = args
        return (stmt("perp", (p, o, a, b)),)
    raise ValueError(f"unknown constructor {kind!r}")


@dataclass(frozen=True)
class Problem:
    """A constructive problem: named points built in order, plus one goal."""

    points: tuple[str, ...]
    constructions: tuple[Construction, ...]
    goal: Statement
    name: str = ""

    def point_id(self, name: str) -> PointId:
        return self.points.index(name)

    def point_name(self, pid: PointId) -> str:
        return self.points[pid]

    def given_statements(self) -> list[tuple[int, Statement]]:
        """(construction index, statement) pairs implied by the build."""
        out = []
        for i, c in enumerate(self.constructions):
            for s in c.implied:
                out.append((i, s))
        return out
