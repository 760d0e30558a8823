"""Sum-free partitions, the Schur coloring, the translation-invariant blow-up,
and a cutting-based search for monochromatic triangles.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Poly, substitute_vars
from .cutting import build_cutting
from .relations import (
    BudgetExceeded,
    Formula,
    PointSet,
    RelationSystem,
    SemiAlgRelation,
    check_symmetric,
    coverage_gap,
    distance_in_intervals,
    find_mono_triangle_bruteforce,
    mono_triangle_in,
    pair_matrix,
    squared_distance,
)

SCHUR_NODE_BUDGET = 5 * 10 ** 7


class PartitionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# sum-free partitions


@dataclass
class SumFreePartition:
    n_max: int
    classes: list

    def __post_init__(self):
        self.classes = [sorted(int(v) for v in c) for c in self.classes]

    @property
    def m(self) -> int:
        return len(self.classes)

    def color_of(self) -> dict:
        return {v: i for i, c in enumerate(self.classes) for v in c}

    def runs(self) -> list:
        """Number of maximal integer intervals in each class."""
        return [sum(1 for k, v in enumerate(c) if k == 0 or c[k - 1] != v - 1) for c in self.classes]


def is_sum_free(values) -> bool:
    s = set(values)
    vals = sorted(s)
    for i, x in enumerate(vals):
        for y in vals[i:]:
            if x + y in s:
                return False
    return True


def check_partition(p: SumFreePartition) -> list:
    """Problems with p (empty when it is a sum-free partition of 1..n_max)."""
    problems = []
    seen = [v for c in p.classes for v in c]
    if sorted(seen) != list(range(1, p.n_max + 1)):
        problems.append("classes do not partition 1..%d" % p.n_max)
    for i, c in enumerate(p.classes):
        if not is_sum_free(c):
            problems.append("class %d is not sum-free" % i)
    return problems


def format_partition(p: SumFreePartition) -> str:
    lines = ["%d %d" % (p.m, p.n_max)] + [" ".join(str(v) for v in c) for c in p.classes]
    return "\n".join(lines) + "\n"


def parse_partition(text: str) -> SumFreePartition:
    rows = [ln.split() for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    while rows and not rows[0]:
        rows.pop(0)
    m, n = int(rows[0][0]), int(rows[0][1])
    body = rows[1 : 1 + m]
    if len(body) != m:
        raise PartitionError("header announces %d classes, found %d" % (m, len(body)))
    return SumFreePartition(n, [[int(v) for v in r] for r in body])


@dataclass
class SchurResult:
    status: str  # "SAT", "UNSAT" or "UNKNOWN"
    n: int
    m: int
    partition: SumFreePartition | None
    nodes: int
    interval_cap: int | None = None
    bound: float | None = None
    bound_holds: bool | None = None


class _Budget(Exception):
    pass


def _decide(m: int, N: int, budget: int):
    """Backtracking with bitset forbidden-sum masks and unit propagation."""
    full = ((1 << (N + 1)) - 1) & ~1
    nodes = 0

    def add(mask, rev, forb, z):
        nf = forb | (mask << z) | (1 << (2 * z)) | (mask >> z) | (rev >> (N - z))
        if z % 2 == 0:
            nf |= 1 << (z >> 1)
        return mask | (1 << z), rev | (1 << (N - z)), nf & full

    def rec(masks, revs, forbs, used):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        masks, revs, forbs = list(masks), list(revs), list(forbs)
        while True:
            free = full
            for mk in masks:
                free &= ~mk
            if not free:
                return masks
            if used < m:
                break
            once = twice = 0
            allowed = [free & ~f for f in forbs]
            for a in allowed:
                twice |= once & a
                once |= a
            if free & ~once:
                return None
            forced = once & ~twice
            if not forced:
                break
            c = 0
            while not (forced & allowed[c]):
                c += 1
            f = forced & allowed[c]
            z = (f & -f).bit_length() - 1
            masks[c], revs[c], forbs[c] = add(masks[c], revs[c], forbs[c], z)
        z = (free & -free).bit_length() - 1
        if used == m:
            once = twice = three = 0
            for fb in forbs:
                a = free & ~fb
                three |= twice & a
                twice |= once & a
                once |= a
            two = twice & ~three
            if two:
                z = (two & -two).bit_length() - 1
        # unused colors are interchangeable: open at most one new color
        for c in range(min(used + 1, m)):
            if (forbs[c] >> z) & 1:
                continue
            nm, nr, nf = list(masks), list(revs), list(forbs)
            nm[c], nr[c], nf[c] = add(nm[c], nr[c], nf[c], z)
            out = rec(nm, nr, nf, max(used, c + 1))
            if out is not None:
                return out
        return None

    masks = rec([0] * m, [0] * m, [0] * m, 0)
    return masks, nodes


def _decide_intervals(m: int, N: int, t: int, budget: int):
    """Sequential backtracking where each class is a union of at most t intervals."""
    full = ((1 << (N + 1)) - 1) & ~1
    nodes = 0
    masks, revs, forbs = [0] * m, [0] * m, [0] * m
    last, runs = [-1] * m, [0] * m

    def rec(z, used):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        if z > N:
            return True
        for c in range(min(used + 1, m)):
            if (forbs[c] >> z) & 1:
                continue
            new_run = last[c] != z - 1
            if new_run and runs[c] >= t:
                continue
            saved = (masks[c], revs[c], forbs[c], last[c], runs[c])
            mask, rev, forb = saved[:3]
            nf = forb | (mask << z) | (1 << (2 * z)) | (mask >> z) | (rev >> (N - z))
            if z % 2 == 0:
                nf |= 1 << (z >> 1)
            masks[c], revs[c], forbs[c] = mask | (1 << z), rev | (1 << (N - z)), nf & full
            last[c], runs[c] = z, runs[c] + new_run
            if rec(z + 1, max(used, c + 1)):
                return True
            masks[c], revs[c], forbs[c], last[c], runs[c] = saved
        return False

    ok = rec(1, 0)
    return (list(masks) if ok else None), nodes


def _to_partition(masks, N) -> SumFreePartition:
    return SumFreePartition(N, [[v for v in range(1, N + 1) if (mk >> v) & 1] for mk in masks])


def interval_schur_bound(m: int, t: int) -> float:
    """The ceiling 2^(m log log 2t), logarithms base 2."""
    inner = math.log2(2 * t)
    return 2.0 ** (m * math.log2(inner)) if inner > 0 else 0.0


def schur_search(
    m: int,
    N: int | None = None,
    mode: str = "decide",
    interval_cap: int | None = None,
    node_budget: int = SCHUR_NODE_BUDGET,
) -> SchurResult:
    """Decide whether 1..N splits into m sum-free classes, or find the largest such N."""
    if m < 1:
        raise ValueError("need at least one class")
    if mode not in ("decide", "maximize"):
        raise ValueError("mode must be 'decide' or 'maximize'")

    def decide(n, budget):
        if n == 0:
            return [0] * m, 0
        if interval_cap is not None:
            return _decide_intervals(m, n, interval_cap, budget)
        return _decide(m, n, budget)

    bound = interval_schur_bound(m, interval_cap) if interval_cap is not None else None
    spent = 0
    if mode == "decide":
        if N is None:
            raise ValueError("decide mode needs N")
        try:
            masks, spent = decide(N, node_budget)
        except _Budget:
            return SchurResult("UNKNOWN", N, m, None, node_budget, interval_cap, bound)
        part = _to_partition(masks, N) if masks is not None else None
        res = SchurResult("SAT" if part else "UNSAT", N, m, part, spent, interval_cap, bound)
        return res

    best = SumFreePartition(0, [[] for _ in range(m)])
    n = 0
    while N is None or n < N:
        n += 1
        # cheap extension of the previous witness before searching
        placed = False
        for c in range(m):
            trial = best.classes[c] + [n]
            if is_sum_free(trial) and (interval_cap is None or SumFreePartition(n, [trial]).runs()[0] <= interval_cap):
                classes = [list(k) for k in best.classes]
                classes[c] = trial
                best = SumFreePartition(n, classes)
                placed = True
                break
        if placed:
            continue
        try:
            masks, nodes = decide(n, node_budget - spent)
        except _Budget:
            return SchurResult("UNKNOWN", n - 1, m, best, node_budget, interval_cap, bound)
        spent += nodes
        if masks is None:
            n -= 1
            break
        best = _to_partition(masks, n)
    holds = None if bound is None else best.n_max <= bound
    return SchurResult("SAT", best.n_max, m, best, spent, interval_cap, bound, holds)


# ---------------------------------------------------------------------------
# Schur coloring


def _runs_of(values) -> list:
    vals = sorted(values)
    out = []
    for v in vals:
        if out and out[-1][1] == v - 1:
            out[-1][1] = v
        else:
            out.append([v, v])
    return [(a, b) for a, b in out]


def schur_coloring(p: SumFreePartition, validate: bool = True, num_points: int | None = None) -> RelationSystem:
    """Points 1..N+1 with pair (x, y) in relation i iff |x - y| lies in class i."""
    if validate:
        problems = check_partition(p)
        if problems:
            raise PartitionError("; ".join(problems))
    n = p.n_max + 1 if num_points is None else num_points
    base = PointSet.from_values(range(1, n + 1))
    rels = [distance_in_intervals(_runs_of(c), "class%d" % i) for i, c in enumerate(p.classes)]
    return RelationSystem(base, rels)


def extend_partition(p: SumFreePartition, value: int, color: int) -> SumFreePartition:
    """Add ``value`` to one class (no sum-free check)."""
    classes = [list(c) for c in p.classes]
    classes[color].append(value)
    return SumFreePartition(max(p.n_max, value), classes)


# ---------------------------------------------------------------------------
# blow-up


@dataclass
class BlowupSystem:
    level: int
    base_partition: SumFreePartition
    points: PointSet
    relations: list
    C_schedule: list
    slack: Fraction = Fraction(1, 1000)
    window: int = 0

    @property
    def system(self) -> RelationSystem:
        return RelationSystem(self.points, self.relations)


def _level_relation(C: int, window_factor: int, members: Sequence[int], slack: Fraction, name: str) -> SemiAlgRelation:
    """C/2 <= |x-y| <= window*C and some z in members has ||x-y|/C - z| < slack."""
    sq = squared_distance(0, 1, 2, 1)
    x, y = Poly.var(0, 2), Poly.var(1, 2)
    polys = [sq - Fraction(C * C, 4), Fraction(window_factor * window_factor * C * C) - sq]
    near = []
    for z in members:
        for diff in (x - y, y - x):
            g = diff * Fraction(1, C) - z
            polys.append(g * g - slack * slack)
            near.append(Formula("not", [Formula.atom(len(polys) - 1)]))
    phi = Formula("and", [Formula.atom(0), Formula.atom(1), Formula("or", near)])
    return SemiAlgRelation(2, 1, tuple(polys), phi, name)


def blowup(p: SumFreePartition, ell: int, point_budget: int = 200_000, slack=Fraction(1, 1000), factor: int = 5000) -> BlowupSystem:
    """Level-``ell`` translated copies of 1..N+1 carrying m relations per level."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    problems = check_partition(p)
    if problems:
        raise PartitionError("; ".join(problems))
    base = p.n_max + 1
    if base ** ell > point_budget:
        raise BudgetExceeded("%d^%d points exceed the point budget %d" % (base, ell, point_budget))
    pts = list(range(1, base + 1))
    relations = [distance_in_intervals(_runs_of(c), "L1/%d" % i) for i, c in enumerate(p.classes)]
    schedule = []
    window = p.n_max + 2
    for level in range(2, ell + 1):
        C = (factor * max(pts)) ** 2 + 1
        schedule.append(C)
        pts = [q + i * C for i in range(1, base + 1) for q in pts]
        for i, c in enumerate(p.classes):
            relations.append(_level_relation(C, window, c, Fraction(slack), "L%d/%d" % (level, i)))
    return BlowupSystem(ell, p, PointSet.from_values(pts), relations, schedule, Fraction(slack), window)


def verify_blowup(sys: BlowupSystem, triple_budget: int = 10 ** 8, seed: int = 0, samples: int = 200_000) -> dict:
    """Coverage of all pairs and per-relation triangle-freeness."""
    P = sys.points
    n = len(P)
    mats = [pair_matrix(R, P) for R in sys.relations]
    gap = coverage_gap(sys.system, mats)
    exhaustive = math.comb(n, 3) * len(mats) <= triple_budget
    triangles = []
    if exhaustive:
        for color, A in enumerate(mats):
            tri = mono_triangle_in(A)
            if tri is not None:
                triangles.append((tri, color))
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            i, j, k = sorted(rng.sample(range(n), 3))
            for color, A in enumerate(mats):
                if A[i, j] and A[j, k] and A[i, k]:
                    triangles.append(((i, j, k), color))
    return {
        "points": n,
        "relations": len(sys.relations),
        "covered": gap is None,
        "uncovered_pair": gap,
        "triangle_free": not triangles,
        "triangles": triangles[:5],
        "exhaustive": exhaustive,
        "ok": gap is None and not triangles,
    }


def verify_translation_invariance(relations, points, shifts, sample_pairs=None, seed: int = 0) -> dict:
    """Membership of (x+s, y+s) equals membership of (x, y) for every relation and shift."""
    if isinstance(relations, BlowupSystem):
        points = relations.points if points is None else points
        relations = relations.relations
    pts = [p[0] for p in (points.points if isinstance(points, PointSet) else points)]
    pairs = list(itertools.combinations(range(len(pts)), 2))
    exhaustive = sample_pairs is None or sample_pairs >= len(pairs)
    if not exhaustive:
        pairs = random.Random(seed).sample(pairs, sample_pairs)
    violations = []
    checks = 0
    for i, j in pairs:
        x, y = pts[i], pts[j]
        for ri, R in enumerate(relations):
            ref = R.holds([x, y])
            for s in shifts:
                s = Fraction(s)
                s = s.numerator if s.denominator == 1 else s
                checks += 1
                if R.holds([x + s, y + s]) != ref:
                    violations.append((ri, i, j, s))
                    if len(violations) >= 20:
                        break
    return {
        "invariant": not violations,
        "violations": violations[:20],
        "pairs": len(pairs),
        "checks": checks,
        "exhaustive": exhaustive,
    }


# ---------------------------------------------------------------------------
# monochromatic triangle search


@dataclass
class MonoConfig:
    small_n: int = 10
    c1: float = 8.0
    backend: str = "auto"
    max_depth: int = 40
    certify: bool = True


def _colors_of(mats, i, j, allowed) -> list:
    return [c for c in allowed if mats[c][i, j]]


def _surfaces_for(S: RelationSystem, idx, allowed, symmetric) -> list:
    """Surfaces f_{c,j}(p, x) = 0 for every allowed relation c, polynomial j, point p.

    Returns ``(poly, p)`` pairs; constant polynomials are dropped.
    """
    d = S.base.dim
    out = []
    for c in allowed:
        R = S.relations[c]
        for f in R.polys:
            for p in idx:
                coords = S.base.points[p]
                slots = [0] if symmetric[c] else [0, 1]
                for slot in slots:
                    fixed = {slot * d + k: coords[k] for k in range(d)}
                    g = substitute_vars(f, fixed)
                    if g.constant_value() is None:
                        out.append((g, p))
    return out


def find_mono_triangle(S: RelationSystem, config: MonoConfig | None = None, seed: int = 0, trace: list | None = None):
    """Search for three points pairwise in one relation, following the cutting argument.

    Returns ``((i, j, k), color)`` with base indices, or None.  A None from the
    structured search is certified by an exhaustive scan when ``config.certify``.
    """
    config = config or MonoConfig()
    if any(R.arity != 2 for R in S.relations):
        raise ValueError("monochromatic triangles need binary relations")
    mats = [pair_matrix(R, S.base) for R in S.relations]
    from .relations import UncoveredPair

    gap = coverage_gap(S, mats)
    if gap is not None:
        raise UncoveredPair(gap)
    n = len(S.base)
    symmetric = []
    for R in S.relations:
        sample = S.base.subset(range(min(n, 8))) if n >= 2 else S.base
        symmetric.append(len(sample) < 2 or check_symmetric(R, sample, trials=30, seed=seed)["symmetric"])
    trace = trace if trace is not None else []

    def verified(tri, color):
        a, b, c = sorted(tri)
        A = mats[color]
        return A[a, b] and A[b, c] and A[a, c]

    def small(idx, allowed):
        sub = np.ix_(idx, idx)
        for color in allowed:
            tri = mono_triangle_in(mats[color][sub])
            if tri is not None:
                return tuple(sorted(idx[t] for t in tri)), color
        return None

    def search(idx, allowed, depth):
        trace.append({"depth": depth, "points": len(idx), "colors": list(allowed)})
        if len(idx) <= config.small_n or len(allowed) <= 1 or depth >= config.max_depth:
            return small(idx, allowed)
        sigma = _surfaces_for(S, idx, allowed, symmetric)
        t = max(R.complexity for R in S.relations)
        mcol = len(allowed)
        r = min(2 * t * mcol, max(len(sigma), 1))
        if sigma:
            polys = [g for g, _ in sigma]
            K = build_cutting(polys, r, config.backend, seed + depth, dim=S.base.dim, points=[S.base.points[i] for i in idx])
            groups: dict = {}
            for i in idx:
                groups.setdefault(K.locate(S.base.points[i]), []).append(i)
            heavy = max(K.bounded_positions(), key=lambda pos: len(groups.get(pos, [])))
            inside = groups.get(heavy, [])
            crossing_owner = {sigma[j][1] for j in K.crossing[heavy]}
        else:
            inside, crossing_owner = list(idx), set()
        target = max(2, math.floor(len(idx) / (config.c1 * (2 * t * mcol) ** (2 * S.base.dim))))
        P1 = inside[: max(target, min(len(inside), 2))]
        if len(P1) < 2:
            return small(idx, allowed)
        P1set = set(P1)
        P2 = [p for p in idx if p not in P1set and p not in crossing_owner]
        chi = {}
        for p in P2:
            common = None
            for q in P1:
                cols = set(_colors_of(mats, p, q, allowed))
                common = cols if common is None else common & cols
            if common:
                chi[p] = min(common)
        image = sorted(set(chi.values()))
        m0 = len(image)
        trace[-1].update({"P1": len(P1), "P2": len(P2), "m0": m0})
        if m0 > math.log2(max(mcol, 2)):
            # case 1: a pair of P1 in a color of the image closes a triangle with its witness
            witness = {}
            for p, c in chi.items():
                witness.setdefault(c, p)
            for a, b in itertools.combinations(P1, 2):
                for c in _colors_of(mats, a, b, image):
                    tri = tuple(sorted((a, b, witness[c])))
                    if verified(tri, c):
                        return tri, c
            rest = [c for c in allowed if c not in image]
            found = search(sorted(P1), rest, depth + 1) if rest else None
        else:
            # case 2: the largest color class of P2 toward P1
            if not chi:
                return small(idx, allowed)
            counts: dict = {}
            for p, c in chi.items():
                counts.setdefault(c, []).append(p)
            color = max(counts, key=lambda c: (len(counts[c]), -c))
            P3 = sorted(counts[color])
            for a, b in itertools.combinations(P3, 2):
                if mats[color][a, b]:
                    tri = tuple(sorted((a, b, P1[0])))
                    if verified(tri, color):
                        return tri, color
            rest = [c for c in allowed if c != color]
            found = search(P3, rest, depth + 1) if rest and len(P3) >= 3 else None
        if found is not None:
            return found
        # the structured branch exhausted its subset; scan the rest of this level
        return small(idx, allowed)

    result = search(list(range(n)), list(range(len(S.relations))), 0)
    if result is None and config.certify:
        trace.append({"certify": "exhaustive"})
        result = find_mono_triangle_bruteforce(S, matrices=mats)
    if result is not None and not verified(*result):
        raise AssertionError("internal error: unverified triangle %r" % (result,))
    return result
