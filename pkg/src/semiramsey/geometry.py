"""Erdős–Szekeres constructions and detectors, and one-sided hyperplane families."""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Poly, determinant, rat
from .relations import (
    BudgetExceeded,
    PointSet,
    SemiAlgRelation,
    TruthTable,
    brute_force_clique,
)


class GeneralPositionError(ValueError):
    pass


@dataclass(frozen=True)
class NotFound:
    """No witness exists; ``exhaustive`` marks a certificate from a full search."""

    exhaustive: bool = True
    detail: tuple = ()

    def __bool__(self):
        return False


# ---------------------------------------------------------------------------
# monotone subsequences


def es_extremal_sequence(s: int, n: int) -> list:
    """n-1 descending blocks, each holding s-1 ascending integers."""
    if s < 2 or n < 2:
        raise ValueError("need s, n >= 2")
    out = []
    for b in range(n - 1):
        base = (n - 2 - b) * (s - 1)
        out.extend(base + k + 1 for k in range(s - 1))
    return out


@dataclass(frozen=True)
class Monotone:
    inc: int
    inc_witness: tuple
    dec: int
    dec_witness: tuple


def _longest_increasing(values: Sequence) -> tuple:
    tails: list = []
    tail_idx: list = []
    parent = [-1] * len(values)
    for i, v in enumerate(values):
        k = bisect.bisect_left(tails, v)
        if k == len(tails):
            tails.append(v)
            tail_idx.append(i)
        else:
            tails[k] = v
            tail_idx[k] = i
        parent[i] = tail_idx[k - 1] if k else -1
    out = []
    i = tail_idx[-1] if tail_idx else -1
    while i >= 0:
        out.append(i)
        i = parent[i]
    return tuple(reversed(out))


def longest_monotone(seq: Sequence) -> Monotone:
    """Longest strictly increasing and decreasing subsequences, with index witnesses."""
    vals = [rat(v) for v in seq]
    if len(set(vals)) != len(vals):
        raise ValueError("values must be distinct")
    inc = _longest_increasing(vals)
    dec = _longest_increasing([-v for v in vals])
    for w, sgn in ((inc, 1), (dec, -1)):
        for a, b in zip(w, w[1:]):
            if not (a < b and sgn * (vals[b] - vals[a]) > 0):
                raise AssertionError("internal error: witness is not monotone")
    return Monotone(len(inc), inc, len(dec), dec)


# ---------------------------------------------------------------------------
# cups and caps


def orient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def check_general_position(P: PointSet) -> None:
    """Distinct x-coordinates and no three collinear, or a named violation."""
    if P.dim != 2:
        raise GeneralPositionError("planar configurations need d = 2")
    xs: dict = {}
    for i, p in enumerate(P.points):
        if p[0] in xs:
            raise GeneralPositionError("points %d and %d share the x-coordinate %s" % (xs[p[0]], i, p[0]))
        xs[p[0]] = i
    for i, j, k in itertools.combinations(range(len(P)), 3):
        if orient(P.points[i], P.points[j], P.points[k]) == 0:
            raise GeneralPositionError("points %d, %d, %d are collinear" % (i, j, k))


@dataclass(frozen=True)
class PlanarConfig:
    points: PointSet
    general_position: bool = False

    @classmethod
    def checked(cls, P: PointSet) -> "PlanarConfig":
        check_general_position(P)
        return cls(P, True)


def cupcap_extremal(s: int, n: int) -> PlanarConfig:
    """C(n+s-4, s-2) points with no s-cup and no n-cap.

    X(s, n) is X(s-1, n) followed by a copy of X(s, n-1) raised so steeply
    that every connecting slope exceeds every slope inside either half.
    """
    if s < 3 or n < 3:
        raise ValueError("need s, n >= 3")
    memo: dict = {}

    def build(a: int, b: int) -> list:
        if a <= 2 or b <= 2:
            return [(0, 0)]
        if (a, b) in memo:
            return memo[a, b]
        left = build(a - 1, b)
        right = build(a, b - 1)
        steep = 0
        for half in (left, right):
            for p, q in itertools.combinations(half, 2):
                steep = max(steep, abs(Fraction(q[1] - p[1], q[0] - p[0])))
        steep = math.floor(steep) + 1
        dx = max(p[0] for p in left) - min(p[0] for p in right) + 1
        span = max(p[0] for p in right) + dx - min(p[0] for p in left)
        dy = steep * span + max(p[1] for p in left) - min(p[1] for p in right) + 1
        pts = left + [(p[0] + dx, p[1] + dy) for p in right]
        memo[a, b] = pts
        return pts

    pts = build(s, n)
    if len(pts) != math.comb(n + s - 4, s - 2):
        raise AssertionError("internal error: wrong construction size")
    return PlanarConfig.checked(PointSet(2, tuple(pts)))


@dataclass(frozen=True)
class CupCap:
    kind: str
    indices: tuple


def _longest_chains(pts: list, turn: int):
    """Longest chain with consecutive turns of sign ``turn``, over x-sorted points."""
    n = len(pts)
    best = {}
    back = {}
    for j in range(n):
        for i in range(j):
            best[i, j] = 2
            back[i, j] = None
            for h in range(i):
                if best[h, i] + 1 > best[i, j] and orient(pts[h], pts[i], pts[j]) == turn:
                    best[i, j] = best[h, i] + 1
                    back[i, j] = h
    if not best:
        return min(n, 1), tuple(range(min(n, 1)))
    (i, j), length = max(best.items(), key=lambda kv: kv[1])
    chain = [j, i]
    while back[i, j] is not None:
        i, j = back[i, j], i
        chain.append(i)
    return length, tuple(reversed(chain))


def find_cup_cap(cfg: PlanarConfig | PointSet, s: int, n: int):
    """An s-cup or an n-cap (indices into the point set), or NotFound."""
    P = cfg.points if isinstance(cfg, PlanarConfig) else cfg
    check_general_position(P)
    order = sorted(range(len(P)), key=lambda i: P.points[i][0])
    pts = [P.points[i] for i in order]
    cup_len, cup = _longest_chains(pts, 1)
    cap_len, cap = _longest_chains(pts, -1)
    if cup_len >= s:
        w = CupCap("cup", tuple(order[i] for i in cup[:s]))
    elif cap_len >= n:
        w = CupCap("cap", tuple(order[i] for i in cap[:n]))
    else:
        return NotFound(True, (("longest_cup", cup_len), ("longest_cap", cap_len)))
    if not verify_cup_cap(P, w):
        raise AssertionError("internal error: witness fails the orientation check")
    return w


def verify_cup_cap(P: PointSet, w: CupCap) -> bool:
    turn = 1 if w.kind == "cup" else -1
    idx = sorted(w.indices, key=lambda i: P.points[i][0])
    pts = [P.points[i] for i in idx]
    return all(orient(pts[k], pts[k + 1], pts[k + 2]) == turn for k in range(len(pts) - 2))


def has_cup_cap_exhaustive(P: PointSet, size: int, kind: str) -> bool:
    """Subset enumeration oracle for cups/caps of exactly ``size`` points."""
    for sub in itertools.combinations(range(len(P)), size):
        if verify_cup_cap(P, CupCap(kind, sub)):
            return True
    return False


# ---------------------------------------------------------------------------
# hyperplanes


@dataclass(frozen=True)
class HyperplaneFamily:
    """Hyperplanes ``a . x = b`` in R^dim, stored as (a, b)."""

    dim: int
    planes: tuple

    def __post_init__(self):
        planes = tuple((tuple(rat(c) for c in a), rat(b)) for a, b in self.planes)
        if any(len(a) != self.dim for a, _ in planes):
            raise ValueError("every hyperplane needs %d coefficients" % self.dim)
        object.__setattr__(self, "planes", planes)

    def __len__(self):
        return len(self.planes)

    def as_points(self) -> PointSet:
        return PointSet(self.dim + 1, tuple(a + (b,) for a, b in self.planes))

    @classmethod
    def from_points(cls, P: PointSet) -> "HyperplaneFamily":
        return cls(P.dim - 1, tuple((p[:-1], p[-1]) for p in P.points))


def solve_linear(A: Sequence[Sequence], b: Sequence):
    """Exact Gaussian elimination; None when the matrix is singular."""
    n = len(A)
    M = [[rat(v) for v in row] + [rat(bv)] for row, bv in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertex(H: HyperplaneFamily, subset: Sequence[int]):
    planes = [H.planes[i] for i in subset]
    return solve_linear([a for a, _ in planes], [b for _, b in planes])


def check_hyperplane_position(H: HyperplaneFamily, budget: int = 10 ** 6) -> None:
    if math.comb(len(H), H.dim) > budget:
        raise BudgetExceeded("too many %d-subsets to check" % H.dim)
    seen: dict = {}
    for sub in itertools.combinations(range(len(H)), H.dim):
        v = vertex(H, sub)
        if v is None:
            raise GeneralPositionError("hyperplanes %r do not meet in a single point" % (sub,))
        v = tuple(v)
        if v in seen:
            raise GeneralPositionError("subsets %r and %r share the vertex %r" % (seen[v], sub, v))
        seen[v] = sub


def _vertex_sign_poly(d: int) -> Poly:
    """det(A) * det(A with last column replaced by b), over d points of R^{d+1}."""
    nv = d * (d + 1)
    var = lambda i, j: Poly.var(i * (d + 1) + j, nv)
    A = [[var(i, j) for j in range(d)] for i in range(d)]
    Ad = [[var(i, j) for j in range(d - 1)] + [var(i, d)] for i in range(d)]
    return determinant(A) * determinant(Ad)


def dualize_hyperplanes(H: HyperplaneFamily, check: bool = True):
    """Dual points (a, b) and the relation 'the d hyperplanes meet above x_d = 0'."""
    if check:
        check_hyperplane_position(H)
    f = _vertex_sign_poly(H.dim)
    above = SemiAlgRelation(H.dim, H.dim + 1, (-f,), TruthTable.from_function(1, lambda b: not b[0]), "vertex-above")
    return H.as_points(), above


def below_relation(d: int) -> SemiAlgRelation:
    f = _vertex_sign_poly(d)
    return SemiAlgRelation(d, d + 1, (f,), TruthTable.from_function(1, lambda b: not b[0]), "vertex-below")


def one_sided(H: HyperplaneFamily, subset: Sequence[int], side: str) -> bool:
    """Direct-solve check that every d-subset's vertex lies strictly on ``side``."""
    for sub in itertools.combinations(subset, H.dim):
        v = vertex(H, sub)
        if v is None:
            return False
        if (v[-1] > 0) != (side == "above") or v[-1] == 0:
            return False
    return True


@dataclass(frozen=True)
class OneSided:
    side: str
    indices: tuple


def family_from_sequence(seq: Sequence) -> HyperplaneFamily:
    """Lines x = k y - v_k with v_k an order-preserving bend of ``seq``.

    Above-subfamilies correspond to increasing subsequences and
    below-subfamilies to decreasing ones.  The quadratic bend keeps the
    points (k, v_k) free of collinear triples, so no three lines concur.
    """
    vals = [rat(v) for v in seq]
    n = len(vals)
    gap = min((abs(a - b) for a, b in itertools.combinations(vals, 2)), default=Fraction(1))
    for scale in range(1, 64):
        eps = gap / (2 * scale * (n * n + 1))
        bent = [v + eps * k * k for k, v in enumerate(vals)]
        H = HyperplaneFamily(2, tuple(((1, -k), -v) for k, v in enumerate(bent)))
        try:
            check_hyperplane_position(H)
        except GeneralPositionError:
            continue
        return H
    raise GeneralPositionError("could not bend the sequence into general position")


def _planar_reduction(H: HyperplaneFamily):
    """Lines as x = w y + u sorted by w; None when some line has a1 = 0."""
    rows = []
    for i, (a, b) in enumerate(H.planes):
        if a[0] == 0:
            return None
        rows.append((-a[1] / a[0], b / a[0], i))
    rows.sort()
    return rows


def osh_extract(H: HyperplaneFamily, s: int, n: int, budget: int = 10 ** 7, check: bool = True):
    """s hyperplanes with all vertices above, or n with all vertices below, or NotFound."""
    if check:
        check_hyperplane_position(H)
    d = H.dim
    if d == 2:
        rows = _planar_reduction(H)
        if rows is not None and len({u for _, u, _ in rows}) == len(rows):
            # above: u strictly decreasing in w order; below: increasing
            mono = longest_monotone([u for _, u, _ in rows])
            if mono.dec >= s:
                res = OneSided("above", tuple(sorted(rows[k][2] for k in mono.dec_witness[:s])))
            elif mono.inc >= n:
                res = OneSided("below", tuple(sorted(rows[k][2] for k in mono.inc_witness[:n])))
            else:
                res = None
            if res is not None:
                if not one_sided(H, res.indices, res.side):
                    raise AssertionError("internal error: unverified one-sided family")
                return res
            return NotFound(True, (("method", "monotone"), ("longest_above", mono.dec), ("longest_below", mono.inc)))
    P = H.as_points()
    for side, size, R in (("above", s, dualize_hyperplanes(H, check=False)[1]), ("below", n, below_relation(d))):
        if size < d:
            return OneSided(side, tuple(range(size)))
        found = brute_force_clique(R, P, size, subset_budget=budget)
        if found is not None:
            res = OneSided(side, tuple(found))
            if not one_sided(H, res.indices, side):
                raise AssertionError("internal error: unverified one-sided family")
            return res
    return NotFound(True, (("method", "exhaustive"),))


def osh_exhaustive(H: HyperplaneFamily, s: int, n: int):
    """Plain subset enumeration with direct solves (oracle)."""
    for sub in itertools.combinations(range(len(H)), s):
        if one_sided(H, sub, "above"):
            return OneSided("above", sub)
    for sub in itertools.combinations(range(len(H)), n):
        if one_sided(H, sub, "below"):
            return OneSided("below", sub)
    return NotFound(True, (("method", "enumeration"),))
