"""Randomized floating-point models of problems and numeric statement checks.

A diagram is built construction by construction from a seeded RNG, then
normalized to a unit bounding box.  Attempts are rejected and resampled
(with a derived sub-seed) when points collide, an implied statement fails,
or any measured invariant lands in the ambiguity band between "exactly
true" and "clearly false"; that band is what lets the matcher trust a
single diagram.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from itertools import combinations

from .errors import DegenerateProblem, UnsolvableConstruction
from .geometry import Problem, Statement

TOL_BUILD = 1e-10
TOL_CHECK = 1e-7
SEP_MIN = 1e-3
RESAMPLE_MAX = 64

# residuals inside (AMBIG_LO, AMBIG_HI) are neither construction-true nor
# generic; diagrams showing one are resampled
AMBIG_LO = 1e-9
AMBIG_HI = 1e-5

_MASK64 = (1 << 64) - 1
_MIX = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class Coordinates:
    """Immutable point coordinates for one problem, unit-box normalized."""

    names: tuple[str, ...]
    xy: tuple[tuple[float, float], ...]
    seed: int
    scale: float  # raw-sample units per normalized unit
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.xy)

    def span(self) -> float:
        """Bounding-box extent of the stored coordinates."""
        if "span" not in self._cache:
            xs = [p[0] for p in self.xy]
            ys = [p[1] for p in self.xy]
            self._cache["span"] = max(max(xs) - min(xs), max(ys) - min(ys), 1e-12)
        return self._cache["span"]

    def to_json(self) -> str:
        obj = {
            "seed": self.seed,
            "scale": self.scale,
            "points": {nm: [x, y] for nm, (x, y) in zip(self.names, self.xy)},
        }
        return json.dumps(obj, indent=2, sort_keys=True)


class _StepEmpty(Exception):
    def __init__(self, step: int):
        self.step = step


class _StepDegenerate(Exception):
    pass


# ---------------------------------------------------------------------------
# Primitive geometry on float pairs


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _dist2(p, q):
    dx, dy = p[0] - q[0], p[1] - q[1]
    return dx * dx + dy * dy


def line_line_intersection(a, b, c, d):
    """Intersection of lines ab and cd; None when (near) parallel."""
    u = _sub(b, a)
    v = _sub(d, c)
    den = _cross(u, v)
    lim = 1e-12 * max(1.0, abs(u[0]) + abs(u[1])) * max(1.0, abs(v[0]) + abs(v[1]))
    if abs(den) <= lim:
        return None
    t = _cross(_sub(c, a), v) / den
    return (a[0] + t * u[0], a[1] + t * u[1])


def line_circle_intersection(a, b, center, radius):
    """Both intersection points of line ab with the circle, or None if empty."""
    u = _sub(b, a)
    w = _sub(a, center)
    aa = _dot(u, u)
    if aa == 0.0:
        return None
    bb = 2.0 * _dot(u, w)
    cc = _dot(w, w) - radius * radius
    disc = bb * bb - 4.0 * aa * cc
    if disc < -1e-12 * aa * max(radius * radius, 1.0):
        return None
    disc = max(disc, 0.0)
    r = math.sqrt(disc)
    t1 = (-bb - r) / (2.0 * aa)
    t2 = (-bb + r) / (2.0 * aa)
    return (
        (a[0] + t1 * u[0], a[1] + t1 * u[1]),
        (a[0] + t2 * u[0], a[1] + t2 * u[1]),
    )


def circle_circle_intersection(c1, r1, c2, r2):
    """Both intersection points of two circles, or None if empty/concentric."""
    d = _dist(c1, c2)
    if d <= 1e-12 * max(r1, r2, 1.0):
        return None
    if d > r1 + r2 + 1e-12 * max(r1 + r2, 1.0):
        return None
    if d < abs(r1 - r2) - 1e-12 * max(r1 + r2, 1.0):
        return None
    a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    h2 = r1 * r1 - a * a
    h = math.sqrt(max(h2, 0.0))
    ex = ((c2[0] - c1[0]) / d, (c2[1] - c1[1]) / d)
    mx = (c1[0] + a * ex[0], c1[1] + a * ex[1])
    return (
        (mx[0] - h * ex[1], mx[1] + h * ex[0]),
        (mx[0] + h * ex[1], mx[1] - h * ex[0]),
    )


def _circumcenter(a, b, c):
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < 1e-14 * (1.0 + _dist2(a, b) + _dist2(b, c)):
        return None
    a2, b2, c2 = _dot(a, a), _dot(b, b), _dot(c, c)
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    return (ux, uy)


def _foot(p, a, b):
    u = _sub(b, a)
    den = _dot(u, u)
    if den == 0.0:
        return None
    t = _dot(_sub(p, a), u) / den
    return (a[0] + t * u[0], a[1] + t * u[1])


def _reflect_over_line(p, a, b):
    f = _foot(p, a, b)
    if f is None:
        return None
    return (2.0 * f[0] - p[0], 2.0 * f[1] - p[1])


# ---------------------------------------------------------------------------
# Construction execution


def _run_constructions(problem: Problem, rng: random.Random) -> list[tuple[float, float]]:
    pts: list[tuple[float, float]] = []
    for i, con in enumerate(problem.constructions):
        args = [pts[a] for a in con.args]
        kind = con.kind
        if kind == "free":
            p = (rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0))
        elif kind == "midpoint":
            a, b = args
            p = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
        elif kind == "on_line":
            a, b = args
            t = rng.choice([rng.uniform(-0.8, -0.2), rng.uniform(0.2, 0.8), rng.uniform(1.2, 1.8)])
            p = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        elif kind == "on_circle":
            c, r = args
            radius = _dist(c, r)
            ang = rng.uniform(0.0, 2.0 * math.pi)
            p = (c[0] + radius * math.cos(ang), c[1] + radius * math.sin(ang))
        elif kind == "foot":
            q, a, b = args
            p = _foot(q, a, b)
        elif kind == "circumcenter":
            p = _circumcenter(*args)
        elif kind == "intersect_ll":
            a, b, c, d = args
            p = line_line_intersection(a, b, c, d)
        elif kind == "intersect_lc":
            a, b, c, r = args
            got = line_circle_intersection(a, b, c, _dist(c, r))
            if got is None:
                raise _StepEmpty(i)
            p = got[rng.randrange(2)]
        elif kind == "intersect_cc":
            c1, r1, c2, r2 = args
            got = circle_circle_intersection(c1, _dist(c1, r1), c2, _dist(c2, r2))
            if got is None:
                raise _StepEmpty(i)
            p = got[rng.randrange(2)]
        elif kind == "reflect":
            q, a, b = args
            p = _reflect_over_line(q, a, b)
        elif kind == "parallel_through":
            q, a, b = args
            u = _sub(b, a)
            n = math.hypot(*u)
            if n == 0.0:
                raise _StepDegenerate()
            t = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.2) / n
            p = (q[0] + t * u[0], q[1] + t * u[1])
        elif kind == "perp_through":
            q, a, b = args
            u = _sub(b, a)
            n = math.hypot(*u)
            if n == 0.0:
                raise _StepDegenerate()
            t = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.2) / n
            p = (q[0] - t * u[1], q[1] + t * u[0])
        else:
            raise ValueError(f"unknown constructor {kind!r}")
        if p is None:
            raise _StepDegenerate()
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise _StepDegenerate()
        pts.append(p)
    return pts


def _normalize(pts: list[tuple[float, float]]):
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys))
    if span < 1e-9:
        return None
    x0, y0 = min(xs), min(ys)
    return [((x - x0) / span, (y - y0) / span) for x, y in pts], span


# ---------------------------------------------------------------------------
# Numeric statement evaluation


def residual(s: Statement, c: Coordinates) -> float:
    """Scale-normalized defining residual of a statement; 0 means true.

    Statements about lines or ratios whose defining segments collapse
    (coincident points) return +inf rather than a spurious zero.
    """
    span = c.span()
    pts = c.xy
    k = s.kind
    if k == "coll":
        a, b, cc = (pts[i] for i in s.args)
        return abs(_cross(_sub(b, a), _sub(cc, a))) / (span * span)
    if k == "para" or k == "perp":
        a, b, d, e = (pts[i] for i in s.args)
        u, v = _sub(b, a), _sub(e, d)
        if _dot(u, u) < (1e-9 * span) ** 2 or _dot(v, v) < (1e-9 * span) ** 2:
            return math.inf
        val = _dot(u, v) if k == "perp" else _cross(u, v)
        return abs(val) / (span * span)
    if k == "cong":
        a, b, d, e = (pts[i] for i in s.args)
        return abs(_dist2(a, b) - _dist2(d, e)) / (span * span)
    if k == "midp":
        m, a, b = (pts[i] for i in s.args)
        return _dist(m, ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)) / span
    if k == "cyclic":
        ids = s.args
        ps = [pts[i] for i in ids]
        for p, q in combinations(ps, 2):
            if _dist2(p, q) < (1e-9 * span) ** 2:
                return math.inf
        # 4x4 determinant |x y x^2+y^2 1|, the circumcircle membership test
        rows = [(x, y, x * x + y * y) for x, y in ps]
        det = 0.0
        for i0 in range(4):
            sub = [rows[j] for j in range(4) if j != i0]
            m3 = (
                sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
                - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
                + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0])
            )
            det += (-1.0 if i0 % 2 else 1.0) * m3
        return abs(det) / (span**4)
    if k == "eqangle":
        ps = [pts[i] for i in s.args]
        dirs = []
        for j in range(0, 8, 2):
            u = _sub(ps[j + 1], ps[j])
            if _dot(u, u) < (1e-9 * span) ** 2:
                return math.inf
            dirs.append(math.atan2(u[1], u[0]) % math.pi)
        delta = (dirs[1] - dirs[0]) - (dirs[3] - dirs[2])
        delta %= math.pi
        return min(delta, math.pi - delta)
    if k == "eqratio":
        ps = [pts[i] for i in s.args]
        lens = []
        for j in range(0, 8, 2):
            d = _dist(ps[j], ps[j + 1])
            if d < 1e-9 * span:
                return math.inf
            lens.append(d)
        return abs(math.log(lens[0]) - math.log(lens[1]) - math.log(lens[2]) + math.log(lens[3]))
    if k == "areq":
        return equation_residual(s.payload, c)
    raise ValueError(f"unknown statement kind {k!r}")


def equation_residual(eq, c: Coordinates) -> float:
    """Residual of a linear-table equation under the coordinate valuation."""
    span = c.span()
    pts = c.xy
    total = float(eq.const)
    for key, coeff in eq.terms:
        if key[0] == "seg":
            _, p, q = key
            d = _dist(pts[p], pts[q])
            if eq.table == "len":
                val = d
            elif eq.table == "sq":
                val = d * d
            else:
                if d < 1e-9 * span:
                    return math.inf
                val = math.log(d)
        else:
            _, v, p, q = key
            u1 = _sub(pts[p], pts[v])
            u2 = _sub(pts[q], pts[v])
            n1, n2 = math.hypot(*u1), math.hypot(*u2)
            if n1 < 1e-9 * span or n2 < 1e-9 * span:
                return math.inf
            s_val = abs(_cross(u1, u2)) / (n1 * n2)
            if s_val < 1e-12:
                return math.inf
            val = math.log(s_val)
        total += coeff * val
    if eq.table == "len":
        return abs(total) / span
    if eq.table == "sq":
        return abs(total) / (span * span)
    return abs(total)


def numeric_holds(s: Statement, c: Coordinates, tol: float = TOL_CHECK) -> bool:
    """True when the statement's scale-normalized residual is within tol."""
    cache = c._cache.setdefault("holds", {})
    key = (s.key(), tol)
    got = cache.get(key)
    if got is None:
        got = residual(s, c) < tol
        cache[key] = got
    return got


# ---------------------------------------------------------------------------
# Rejection scans


def _separated(pts, min_dist: float) -> bool:
    for p, q in combinations(pts, 2):
        if _dist(p, q) < min_dist:
            return False
    return True


def _gap_scan(values: list[float], lo: float, hi: float, wrap: float | None = None) -> bool:
    """True when no adjacent pair of sorted values differs by an amount in
    (lo, hi); such a gap means two measurements are suspiciously close."""
    if len(values) < 2:
        return True
    vs = sorted(values)
    if wrap is not None:
        vs.append(vs[0] + wrap)
    for a, b in zip(vs, vs[1:]):
        if lo < b - a < hi:
            return False
    return True


def _unambiguous(c: Coordinates) -> bool:
    """Reject diagrams where any family measurement sits in the ambiguity
    band: near-coincidences there would make single-diagram matching lie."""
    pts = c.xy
    n = len(pts)
    span = c.span()
    s2 = span * span

    dirs = []
    d2s = []
    logs = []
    for i, j in combinations(range(n), 2):
        u = _sub(pts[j], pts[i])
        d2 = _dot(u, u)
        d2s.append(d2 / s2)
        if d2 > 0:
            dirs.append(math.atan2(u[1], u[0]) % math.pi)
            logs.append(0.5 * math.log(d2))
    if not _gap_scan(d2s, AMBIG_LO, AMBIG_HI):
        return False

    # direction differences mod pi cover para (0), perp (pi/2) and eqangle
    deltas = [0.0, math.pi / 2.0]
    for t1, t2 in combinations(dirs, 2):
        deltas.append((t1 - t2) % math.pi)
    if not _gap_scan(deltas, AMBIG_LO, AMBIG_HI, wrap=math.pi):
        return False

    ratios = [0.0]
    for l1, l2 in combinations(logs, 2):
        ratios.append(abs(l1 - l2))
    if not _gap_scan(ratios, AMBIG_LO, AMBIG_HI):
        return False

    # tuple residuals with no pairwise-difference shortcut
    from .geometry import stmt as _stmt

    for tpl in combinations(range(n), 3):
        for m in tpl:
            rest = [x for x in tpl if x != m]
            r = residual(_stmt("midp", (m, rest[0], rest[1])), c)
            if AMBIG_LO < r < AMBIG_HI:
                return False
        r = residual(_stmt("coll", tpl), c)
        if AMBIG_LO < r < AMBIG_HI:
            return False
    for quad in combinations(range(n), 4):
        r = residual(_stmt("cyclic", quad), c)
        if AMBIG_LO < r < AMBIG_HI:
            return False
    return True


# ---------------------------------------------------------------------------
# Top-level build


def _subseed(seed: int, attempt: int) -> int:
    return (seed * _MIX + attempt * 0xD1B54A32D192ED03 + 0x2545F4914F6CDD1D) & _MASK64


def build_diagram(problem: Problem, seed: int = 0) -> Coordinates:
    """Deterministic randomized model of the problem.

    Raises :class:`UnsolvableConstruction` when every attempt died at an
    empty intersection, :class:`DegenerateProblem` when no attempt produced
    a clean diagram.
    """
    empty_steps: list[int] = []
    attempts = 0
    for attempt in range(RESAMPLE_MAX):
        attempts += 1
        rng = random.Random(_subseed(seed, attempt))
        try:
            raw = _run_constructions(problem, rng)
        except _StepEmpty as e:
            empty_steps.append(e.step)
            continue
        except _StepDegenerate:
            continue
        norm = _normalize(raw)
        if norm is None:
            continue
        pts, span = norm
        if not _separated(pts, SEP_MIN):
            continue
        coords = Coordinates(
            names=problem.points, xy=tuple(pts), seed=seed, scale=span
        )
        ok = True
        for _, implied in problem.given_statements():
            if residual(implied, coords) >= TOL_BUILD:
                ok = False
                break
        if not ok:
            continue
        if not _unambiguous(coords):
            continue
        return coords
    if empty_steps and len(empty_steps) == attempts:
        step = max(set(empty_steps), key=empty_steps.count)
        con = problem.constructions[step]
        raise UnsolvableConstruction(
            f"intersection at step {step} ({con.kind} -> {problem.points[con.out]}) "
            f"was empty on every attempt",
            step=step,
        )
    raise DegenerateProblem(
        f"no valid diagram for {problem.name or 'problem'} after {RESAMPLE_MAX} attempts"
    )
