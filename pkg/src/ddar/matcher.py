"""Numeric configuration detection and rule instantiation.

Detection finds the configuration families present in a diagram (collinear
triples, concyclic quadruples, parallel/perpendicular/congruent segment
pairs, midpoints, similar triangles, angle bisectors).  Bucketed invariant
keys generate candidates near-linearly; every candidate is confirmed with
the exact numeric predicate, so the result is extensionally identical to
brute-force enumeration.

Matching then instantiates every catalog rule whose hypotheses and
conclusion all hold numerically.  Hypotheses over detected families iterate
those statement sets; eqangle/eqratio hypotheses draw candidates from
direction-difference and log-ratio indexes.  Pattern variables bind distinct
points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations

from .diagram import TOL_CHECK, Coordinates, numeric_holds
from .geometry import Statement, presentations, slot_presentations, stmt
from .rules import Pattern, Rule

# ---------------------------------------------------------------------------
# Similar-triangle helpers (no Statement kind of their own)


def simtri_residual(t1: tuple[int, int, int], t2: tuple[int, int, int], c: Coordinates) -> float:
    """Log-scale shape mismatch of the correspondence t1 -> t2."""
    span = c.span()
    logs = []
    for (p, q) in ((t1[0], t1[1]), (t1[1], t1[2]), (t1[2], t1[0])):
        d = math.dist(c.xy[p], c.xy[q])
        if d < 1e-9 * span:
            return math.inf
        logs.append(math.log(d))
    ratios = []
    for i, (p, q) in enumerate(((t2[0], t2[1]), (t2[1], t2[2]), (t2[2], t2[0]))):
        d = math.dist(c.xy[p], c.xy[q])
        if d < 1e-9 * span:
            return math.inf
        ratios.append(math.log(d) - logs[i])
    return max(ratios) - min(ratios)


def _orientation(t: tuple[int, int, int], c: Coordinates) -> float:
    a, b, d = (c.xy[i] for i in t)
    return (b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0])


def canonical_simtri(t1, t2, direct: bool):
    """Canonical form of a similar-pair correspondence: minimum over
    simultaneous rotations and swapping the two triangles."""
    best = None
    for r in range(3):
        rot1 = (t1[r % 3], t1[(r + 1) % 3], t1[(r + 2) % 3])
        rot2 = (t2[r % 3], t2[(r + 1) % 3], t2[(r + 2) % 3])
        for cand in ((rot1 + rot2), (rot2 + rot1)):
            if best is None or cand < best:
                best = cand
    return (*best, direct)


# ---------------------------------------------------------------------------
# The configuration set


@dataclass
class ConfigSet:
    """Detected configuration families plus matching indexes."""

    coll: set[Statement] = field(default_factory=set)
    cyclic: set[Statement] = field(default_factory=set)
    para: set[Statement] = field(default_factory=set)
    perp: set[Statement] = field(default_factory=set)
    cong: set[Statement] = field(default_factory=set)
    midp: set[Statement] = field(default_factory=set)
    simtri: set[tuple] = field(default_factory=set)
    bisect: set[Statement] = field(default_factory=set)
    # ordered-segment-pair candidate quadruples for eqangle/eqratio patterns
    eqangle_quads: list[tuple] = field(default_factory=list)
    eqratio_quads: list[tuple] = field(default_factory=list)

    def family(self, kind: str) -> set[Statement]:
        return getattr(self, kind)

    def statements(self):
        for kind in ("coll", "cyclic", "para", "perp", "cong", "midp", "bisect"):
            yield from self.family(kind)


def _close_pairs(items: list, values: list[float], window: float, period: float | None = None):
    """Ordered pairs (i, j), i != j, whose values differ by at most
    ``window`` (circularly when ``period`` is given).  Superset generator;
    callers confirm with the exact predicate."""
    order = sorted(range(len(items)), key=values.__getitem__)
    augmented = [(values[i], i) for i in order]
    if period is not None:
        low = [(v + period, i) for v, i in augmented if v - augmented[0][0] <= window]
        augmented = augmented + low
    for a in range(len(augmented)):
        va, ia = augmented[a]
        b = a + 1
        while b < len(augmented):
            vb, ib = augmented[b]
            if vb - va > window:
                break
            if ia != ib:
                yield ia, ib
                yield ib, ia
            b += 1


def detect_configurations(c: Coordinates, tol: float = TOL_CHECK) -> ConfigSet:
    """All configuration-family members that hold numerically at ``tol``."""
    n = len(c)
    cfg = ConfigSet()
    span = c.span()

    for tri in combinations(range(n), 3):
        s = stmt("coll", tri)
        if numeric_holds(s, c, tol):
            cfg.coll.add(s)
    for quad in combinations(range(n), 4):
        s = stmt("cyclic", quad)
        if numeric_holds(s, c, tol):
            cfg.cyclic.add(s)
    for tri in combinations(range(n), 3):
        for m in tri:
            a, b = (x for x in tri if x != m)
            s = stmt("midp", (m, a, b))
            if numeric_holds(s, c, tol):
                cfg.midp.add(s)

    segs = list(combinations(range(n), 2))
    dirs = {}
    d2s = {}
    for p, q in segs:
        u = (c.xy[q][0] - c.xy[p][0], c.xy[q][1] - c.xy[p][1])
        dirs[(p, q)] = math.atan2(u[1], u[0]) % math.pi
        d2s[(p, q)] = (u[0] * u[0] + u[1] * u[1]) / (span * span)

    dir_values = [dirs[s] for s in segs]
    seen = set()
    for i, j in _close_pairs(segs, dir_values, 2.0 * tol, period=math.pi):
        if i < j:
            s = stmt("para", segs[i] + segs[j])
            if s not in seen:
                seen.add(s)
                if numeric_holds(s, c, tol):
                    cfg.para.add(s)
    # perpendicular candidates: pair each segment's direction against the
    # quarter-turned direction of every other segment
    perp_values = [(d + math.pi / 2.0) % math.pi for d in dir_values]
    seen = set()
    both = dir_values + perp_values
    items = segs + segs
    for i, j in _close_pairs(items, both, 2.0 * tol, period=math.pi):
        if i < len(segs) <= j:
            s = stmt("perp", items[i] + items[j])
            if s not in seen:
                seen.add(s)
                if numeric_holds(s, c, tol):
                    cfg.perp.add(s)

    d2_values = [d2s[s] for s in segs]
    seen = set()
    for i, j in _close_pairs(segs, d2_values, 2.0 * tol):
        if i < j:
            s = stmt("cong", segs[i] + segs[j])
            if s not in seen:
                seen.add(s)
                if numeric_holds(s, c, tol):
                    cfg.cong.add(s)

    # angle bisectors: ray vb bisecting the angle between rays va and vc
    for v in range(n):
        for a, b, d in permutations([x for x in range(n) if x != v], 3):
            if a > d:
                continue
            s = stmt("eqangle", (v, a, v, b, v, b, v, d))
            if numeric_holds(s, c, tol):
                cfg.bisect.add(s)

    # similar triangles via quantized shape keys, then exact confirmation
    tris = [t for t in combinations(range(n), 3) if stmt("coll", t) not in cfg.coll]
    buckets: dict[tuple[int, int], list] = {}
    grid = tol
    for t in tris:
        sides = sorted(
            math.log(max(math.dist(c.xy[p], c.xy[q]), 1e-300))
            for p, q in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))
        )
        key = (round((sides[1] - sides[0]) / grid), round((sides[2] - sides[1]) / grid))
        buckets.setdefault(key, []).append(t)
    for key, members in buckets.items():
        neighborhood = list(members)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if (dx, dy) != (0, 0):
                    neighborhood.extend(buckets.get((key[0] + dx, key[1] + dy), ()))
        for t1 in members:
            for t2 in neighborhood:
                if t2 <= t1:
                    continue
                for perm in permutations(t2):
                    if simtri_residual(t1, perm, c) < tol:
                        direct = _orientation(t1, c) * _orientation(perm, c) > 0
                        cfg.simtri.add(canonical_simtri(t1, perm, direct))

    # candidate quadruples for eqangle / eqratio hypothesis matching
    pair_items = []
    delta_values = []
    rho_values = []
    for s1 in segs:
        for s2 in segs:
            if s1 == s2:
                continue
            pair_items.append((s1, s2))
            delta_values.append((dirs[s2] - dirs[s1]) % math.pi)
            rho_values.append(0.5 * (math.log(d2s[s2]) - math.log(d2s[s1])))
    cfg.eqangle_quads = [
        (pair_items[i][0], pair_items[i][1], pair_items[j][0], pair_items[j][1])
        for i, j in _close_pairs(pair_items, delta_values, 2.0 * tol, period=math.pi)
    ]
    cfg.eqratio_quads = [
        (pair_items[i][0], pair_items[i][1], pair_items[j][0], pair_items[j][1])
        for i, j in _close_pairs(pair_items, rho_values, 2.0 * tol)
    ]
    return cfg


# ---------------------------------------------------------------------------
# Rule instances


@dataclass(frozen=True)
class RuleInstance:
    rule_id: str
    binding: tuple[tuple[str, int], ...]
    hypotheses: tuple[Statement, ...]
    conclusion: Statement

    def key(self):
        return (
            self.rule_id,
            tuple(sorted(h.key() for h in self.hypotheses)),
            self.conclusion.key(),
        )


def instantiate(pat: Pattern, binding: dict[str, int]) -> Statement:
    """Ground a pattern under a (total for the pattern) variable binding."""
    if pat.kind == "areq":
        from .ar import Equation, seg, sin_key

        table, terms, const = pat.equation
        eq_terms = []
        for term in terms:
            if term[1] == "sin":
                coeff, _, v, p, q = term
                eq_terms.append((sin_key(binding[v], binding[p], binding[q]), coeff))
            else:
                coeff, p, q = term
                eq_terms.append((seg(binding[p], binding[q]), coeff))
        return stmt("areq", (), payload=Equation.make(table, eq_terms, const))
    return stmt(pat.kind, tuple(binding[v] for v in pat.vars))


def _unify_flat(pvars, args, binding):
    """Positional unification; variables may share points (the numeric
    conclusion check guards degenerate coincidences)."""
    nb = binding
    copied = False
    for v, p in zip(pvars, args):
        cur = nb.get(v)
        if cur is not None:
            if cur != p:
                return None
            continue
        if not copied:
            nb = dict(nb)
            copied = True
        nb[v] = p
    return nb


def _unify_slots(pvars, slots, binding, out):
    """Unify two-variable slots against unordered segments, branching on
    the endpoint order of each slot."""
    n = len(slots)

    def rec(k, b):
        if k == n:
            out.append(b)
            return
        v1, v2 = pvars[2 * k], pvars[2 * k + 1]
        p, q = slots[k]
        for a1, a2 in ((p, q), (q, p)):
            got = _unify_flat((v1, v2), (a1, a2), b)
            if got is not None:
                rec(k + 1, got)
            if p == q:
                break

    rec(0, binding)


_SLOT_KINDS = ("para", "perp", "cong", "eqangle", "eqratio")


def _config_candidates(pat: Pattern, cfg: ConfigSet, binding):
    """Extended bindings from detected-family statements for one pattern."""
    out: list[dict] = []
    bound_pts = {binding[v] for v in pat.vars if v in binding}
    slotted = pat.kind in _SLOT_KINDS
    for s in cfg.family(pat.kind):
        if bound_pts and not bound_pts.issubset(set(s.args)):
            continue
        if slotted:
            for slots in slot_presentations(s.kind, s.args):
                _unify_slots(pat.vars, slots, binding, out)
        else:
            seen_args = set()
            for args in presentations(s.kind, s.args):
                if args in seen_args:
                    continue
                seen_args.add(args)
                got = _unify_flat(pat.vars, args, binding)
                if got is not None:
                    out.append(got)
    return out


def _slot_links(pat: Pattern) -> list[tuple[int, int]]:
    """Slot index pairs that share a pattern variable; their candidate
    segments must then share a point."""
    slots = [set(pat.vars[2 * k : 2 * k + 2]) for k in range(len(pat.vars) // 2)]
    links = []
    for i in range(len(slots)):
        for j in range(i + 1, len(slots)):
            if slots[i] & slots[j]:
                links.append((i, j))
    return links


def _quad_candidates(pat: Pattern, quads, binding):
    links = _slot_links(pat)
    bound_per_slot = []
    for k in range(4):
        pts = {binding[v] for v in pat.vars[2 * k : 2 * k + 2] if v in binding}
        bound_per_slot.append(pts)
    out: list[dict] = []
    for quad in quads:
        ok = True
        for i, j in links:
            if not (set(quad[i]) & set(quad[j])):
                ok = False
                break
        if ok:
            for k in range(4):
                if bound_per_slot[k] and not bound_per_slot[k].issubset(set(quad[k])):
                    ok = False
                    break
        if ok:
            _unify_slots(pat.vars, quad, binding, out)
    return out


_FAMILY_KINDS = ("coll", "cyclic", "para", "perp", "cong", "midp")


def _plan(rule: Rule, cfg: ConfigSet) -> list[Pattern]:
    """Static hypothesis order: check-only patterns first, then smallest
    candidate families, so the join prunes as early as possible."""
    remaining = list(rule.hypotheses)
    bound: set[str] = set()
    order: list[Pattern] = []
    while remaining:
        def score(p: Pattern):
            unbound = len(set(p.vars) - bound)
            if p.kind in _FAMILY_KINDS:
                size = len(cfg.family(p.kind))
            elif p.kind == "eqangle":
                size = len(cfg.eqangle_quads)
            else:
                size = len(cfg.eqratio_quads)
            return (0 if unbound == 0 else 1, unbound, size)

        best = min(remaining, key=score)
        order.append(best)
        remaining.remove(best)
        bound |= set(best.vars)
    return order


def _holds(pat: Pattern, binding: dict, c: Coordinates, tol: float) -> bool:
    try:
        s = instantiate(pat, binding)
    except ValueError:
        return False  # degenerate coincidence, not a real configuration
    return numeric_holds(s, c, tol)


def _rule_bindings(rule: Rule, cfg: ConfigSet, c: Coordinates, tol: float):
    order = _plan(rule, cfg)

    def extend(i: int, binding: dict):
        if i == len(order):
            yield binding
            return
        pat = order[i]
        if all(v in binding for v in pat.vars):
            if _holds(pat, binding, c, tol):
                yield from extend(i + 1, binding)
            return
        if pat.kind in _FAMILY_KINDS:
            cands = _config_candidates(pat, cfg, binding)
        elif pat.kind == "eqangle":
            cands = _quad_candidates(pat, cfg.eqangle_quads, binding)
        else:
            cands = _quad_candidates(pat, cfg.eqratio_quads, binding)
        seen = set()
        for nb in cands:
            sig = tuple(sorted(nb.items()))
            if sig in seen:
                continue
            seen.add(sig)
            if _holds(pat, nb, c, tol):
                yield from extend(i + 1, nb)

    yield from extend(0, {})


def _build_instance(rule: Rule, binding: dict, c: Coordinates, tol: float) -> RuleInstance | None:
    try:
        hyps = []
        for pat in rule.hypotheses:
            s = instantiate(pat, binding)
            if not numeric_holds(s, c, tol):
                return None
            if s not in hyps:
                hyps.append(s)
        conclusion = instantiate(rule.conclusion, binding)
    except ValueError:
        return None  # degenerate instantiation
    if not numeric_holds(conclusion, c, tol):
        return None
    if conclusion in hyps:
        return None  # vacuous: would prove a statement from itself
    return RuleInstance(
        rule_id=rule.id,
        binding=tuple(sorted(binding.items())),
        hypotheses=tuple(sorted(hyps)),
        conclusion=conclusion,
    )


def match_rules(
    cfg: ConfigSet, catalog: list[Rule], c: Coordinates, tol: float = TOL_CHECK
) -> list[RuleInstance]:
    """Every catalog-rule instance true on the diagram, deduplicated by
    (rule, hypothesis set, conclusion) and deterministically ordered."""
    found: dict[tuple, RuleInstance] = {}
    for rule in catalog:
        for binding in _rule_bindings(rule, cfg, c, tol):
            inst = _build_instance(rule, binding, c, tol)
            if inst is None:
                continue
            key = inst.key()
            prev = found.get(key)
            if prev is None or inst.binding < prev.binding:
                found[key] = inst
    return sorted(found.values(), key=lambda i: i.key())
