"""Semi-algebraic relations on ordered point sets, and brute-force oracles.

A k-ary relation on points of R^d is a list of polynomials in k*d variables
together with a Boolean function ``phi`` of the conditions ``f_j >= 0``.
Tuples are always evaluated in base order of the point set (``i1 < ... < ik``);
a sign of zero counts as the condition holding.

The oracles here (independent sets, cliques, K_s^(3)-freeness, monochromatic
triangles) are exhaustive and are what every extractor is checked against.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import Poly, embed, format_poly, parse_poly, rat, sign_at

#: Default search budgets: subsets examined by fixed-size searches, nodes of backtracking.
SUBSET_BUDGET = 10 ** 7
NODE_BUDGET = 10 ** 7
TUPLE_BUDGET = 10 ** 8


class RelationError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """An exhaustive search was refused or aborted because it is too large."""


class UncoveredPair(RelationError):
    def __init__(self, pair):
        super().__init__("pair %r is in no relation of the system" % (pair,))
        self.pair = pair


def _norm(v):
    v = rat(v)
    return v.numerator if v.denominator == 1 else v


# ---------------------------------------------------------------------------
# point sets


@dataclass(frozen=True)
class PointSet:
    dim: int
    points: tuple
    labels: tuple | None = None

    def __post_init__(self):
        pts = tuple(tuple(_norm(c) for c in p) for p in self.points)
        if any(len(p) != self.dim for p in pts):
            raise RelationError("every point must have dimension %d" % self.dim)
        if len(set(pts)) != len(pts):
            raise RelationError("points must be pairwise distinct")
        if self.labels is not None and len(self.labels) != len(pts):
            raise RelationError("label count does not match point count")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_values(cls, values: Sequence) -> "PointSet":
        """A 1-D point set from scalars."""
        return cls(1, tuple((v,) for v in values))

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    def subset(self, indices: Sequence[int]) -> "PointSet":
        labels = None if self.labels is None else tuple(self.labels[i] for i in indices)
        return PointSet(self.dim, tuple(self.points[i] for i in indices), labels)


def format_points(P: PointSet) -> str:
    lines = ["%d %d" % (P.dim, len(P))]
    lines += [" ".join(str(c) for c in p) for p in P.points]
    return "\n".join(lines) + "\n"


def parse_points(text: str) -> PointSet:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise RelationError("empty point file")
    d, n = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != n:
        raise RelationError("header announces %d points, found %d" % (n, len(body)))
    return PointSet(d, tuple(tuple(Fraction(c) for c in r) for r in body))


# ---------------------------------------------------------------------------
# Boolean functions of sign conditions


class TruthTable:
    """Explicit table over ``2**n`` indicator vectors; bit j of the index is condition j."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int):
        self.n = n
        self.bits = bits

    @classmethod
    def from_function(cls, n: int, fn: Callable) -> "TruthTable":
        bits = 0
        for idx in range(1 << n):
            if fn(tuple((idx >> j) & 1 for j in range(n))):
                bits |= 1 << idx
        return cls(n, bits)

    @classmethod
    def from_string(cls, s: str) -> "TruthTable":
        s = s.strip()
        n = max(len(s).bit_length() - 1, 0)
        if set(s) - {"0", "1"} or len(s) != 1 << n:
            raise RelationError("truth table must be a 0/1 string of length 2^n, got %r" % s[:40])
        return cls(n, sum(1 << i for i, ch in enumerate(s) if ch == "1"))

    def to_string(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(1 << self.n))

    def lookup(self, index: int) -> bool:
        return bool((self.bits >> index) & 1)

    def evaluate(self, atom: Callable[[int], bool]) -> bool:
        index = 0
        for j in range(self.n):
            if atom(j):
                index |= 1 << j
        return self.lookup(index)


class Formula:
    """Boolean formula over atoms ``j`` (meaning ``f_j >= 0``); evaluated lazily.

    Used when a relation has too many polynomials for an explicit table.
    Text form is an s-expression: ``(or (and 0 (not 1)) 2)``, ``true``, ``false``.
    """

    __slots__ = ("op", "args")

    def __init__(self, op: str, args=()):
        self.op = op
        self.args = tuple(args)

    @staticmethod
    def atom(j: int) -> "Formula":
        return Formula("atom", (j,))

    def evaluate(self, atom: Callable[[int], bool]) -> bool:
        op = self.op
        if op == "atom":
            return atom(self.args[0])
        if op == "not":
            return not self.args[0].evaluate(atom)
        if op == "and":
            return all(a.evaluate(atom) for a in self.args)
        if op == "or":
            return any(a.evaluate(atom) for a in self.args)
        return op == "true"

    def to_string(self) -> str:
        if self.op == "atom":
            return str(self.args[0])
        if self.op in ("true", "false"):
            return self.op
        return "(%s %s)" % (self.op, " ".join(a.to_string() for a in self.args))

    @classmethod
    def parse(cls, text: str) -> "Formula":
        tokens = re.findall(r"\(|\)|[^\s()]+", text)
        pos = 0

        def walk():
            nonlocal pos
            tok = tokens[pos]
            pos += 1
            if tok == "(":
                op = tokens[pos]
                pos += 1
                args = []
                while tokens[pos] != ")":
                    args.append(walk())
                pos += 1
                if op not in ("and", "or", "not"):
                    raise RelationError("unknown formula operator %r" % op)
                return cls(op, args)
            if tok in ("true", "false"):
                return cls(tok)
            return cls.atom(int(tok))

        result = walk()
        if pos != len(tokens):
            raise RelationError("trailing tokens in formula %r" % text)
        return result


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True, eq=False)
class SemiAlgRelation:
    arity: int
    dim: int
    polys: tuple
    phi: object
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        nvars = self.arity * self.dim
        if self.arity < 2:
            raise RelationError("arity must be at least 2")
        for p in self.polys:
            if p.num_vars != nvars:
                raise RelationError("polynomial %s has %d variables, expected %d" % (p, p.num_vars, nvars))
        if isinstance(self.phi, TruthTable) and self.phi.n != len(self.polys):
            raise RelationError("truth table has %d inputs for %d polynomials" % (self.phi.n, len(self.polys)))

    @property
    def complexity(self) -> int:
        """Smallest t with at most t polynomials, each of degree at most t."""
        return max([1, len(self.polys)] + [p.degree for p in self.polys])

    def holds(self, coords: Sequence) -> bool:
        """Membership for a flat coordinate vector of length ``arity * dim``."""
        polys = self.polys
        return self.phi.evaluate(lambda j: sign_at(polys[j], coords) >= 0)

    def __repr__(self):
        return "SemiAlgRelation(%s k=%d d=%d t=%d)" % (self.name or "?", self.arity, self.dim, self.complexity)


def rescale_poly(p: Poly, D: int) -> Poly:
    """``D^deg * p(X / D)``: same sign as ``p`` at ``x``, evaluated at the integer point ``X = D x``."""
    deg = p.degree
    return Poly(p.num_vars, {e: c * D ** (deg - sum(e)) for e, c in p.terms.items()})


def integer_frame(P: PointSet):
    """Common denominator ``D`` and the integer points ``D * p``."""
    D = 1
    for p in P.points:
        for c in p:
            if not isinstance(c, int):
                D = math.lcm(D, c.denominator)
    if D == 1:
        return 1, P.points
    return D, tuple(tuple(int(c * D) for c in p) for p in P.points)


def framed(R: SemiAlgRelation, P: PointSet):
    """A relation and integer point tuple with the same memberships as ``(R, P)``."""
    D, pts = integer_frame(P)
    if D == 1:
        return R, pts
    return SemiAlgRelation(R.arity, R.dim, tuple(rescale_poly(f, D) for f in R.polys), R.phi, R.name), pts


def tuple_in_relation(R: SemiAlgRelation, pts: Sequence) -> bool:
    """Is the k-tuple of points (given in base order) in the relation?"""
    if len(pts) != R.arity:
        raise RelationError("relation has arity %d, got %d points" % (R.arity, len(pts)))
    coords = []
    for p in pts:
        if len(p) != R.dim:
            raise RelationError("relation expects points of dimension %d" % R.dim)
        coords.extend(p)
    return R.holds(coords)


def make_relation(arity: int, dim: int, polys: Sequence[Poly], fn: Callable, name: str = "") -> SemiAlgRelation:
    """Relation whose truth table is ``fn(bits)`` over the indicator bits of ``polys``."""
    return SemiAlgRelation(arity, dim, tuple(polys), TruthTable.from_function(len(polys), fn), name)


def format_relation(R: SemiAlgRelation) -> str:
    lines = ["%d %d %d" % (R.arity, R.dim, R.complexity)]
    lines += [format_poly(p) for p in R.polys]
    if isinstance(R.phi, TruthTable):
        lines.append(R.phi.to_string())
    else:
        lines.append("phi " + R.phi.to_string())
    return "\n".join(lines) + "\n"


def parse_relation(text: str, name: str = "") -> SemiAlgRelation:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(rows) < 2:
        raise RelationError("relation file needs a header and a truth table")
    k, d, _t = (int(v) for v in rows[0].split())
    polys = tuple(parse_poly(r, k * d) for r in rows[1:-1])
    last = rows[-1]
    if last.startswith("phi"):
        phi = Formula.parse(last[3:].strip())
    else:
        phi = TruthTable.from_string(last)
    return SemiAlgRelation(k, d, polys, phi, name)


# common relation builders ----------------------------------------------------


def _vars(k: int, d: int):
    n = k * d
    return [[Poly.var(i * d + c, n) for c in range(d)] for i in range(k)]


def empty_relation(arity: int, dim: int) -> SemiAlgRelation:
    return SemiAlgRelation(arity, dim, (), TruthTable(0, 0), "empty")


def full_relation(arity: int, dim: int) -> SemiAlgRelation:
    return SemiAlgRelation(arity, dim, (), TruthTable(0, 1), "full")


def squared_distance(k_i: int, k_j: int, arity: int, dim: int) -> Poly:
    v = _vars(arity, dim)
    total = Poly.const(0, arity * dim)
    for c in range(dim):
        diff = v[k_i][c] - v[k_j][c]
        total = total + diff * diff
    return total


def distance_at_least(c, dim: int = 1) -> SemiAlgRelation:
    """``|x - y| >= c``."""
    c = rat(c)
    return make_relation(2, dim, [squared_distance(0, 1, 2, dim) - c * c], lambda b: b[0], "dist>=%s" % c)


def distance_at_most(c, dim: int = 1) -> SemiAlgRelation:
    """``|x - y| <= c``."""
    c = rat(c)
    return make_relation(2, dim, [c * c - squared_distance(0, 1, 2, dim)], lambda b: b[0], "dist<=%s" % c)


def difference_at_least(c) -> SemiAlgRelation:
    """``y - x >= c`` on the line (not symmetric)."""
    v = _vars(2, 1)
    return make_relation(2, 1, [v[1][0] - v[0][0] - rat(c)], lambda b: b[0], "y-x>=%s" % c)


def distance_in_intervals(intervals: Sequence, name: str = "") -> SemiAlgRelation:
    """``|x - y|`` in a union of closed intervals ``[(a, b), ...]`` with ``0 <= a <= b``."""
    sq = squared_distance(0, 1, 2, 1)
    polys = []
    for a, b in intervals:
        a, b = rat(a), rat(b)
        polys.append(sq - a * a)
        polys.append(b * b - sq)
    count = len(intervals)
    if 2 * count > 12:  # explicit tables stay at 2^12 entries or fewer
        phi = Formula("or", [Formula("and", [Formula.atom(2 * i), Formula.atom(2 * i + 1)]) for i in range(count)])
        return SemiAlgRelation(2, 1, tuple(polys), phi, name)
    return make_relation(
        2, 1, polys, lambda bits: any(bits[2 * i] and bits[2 * i + 1] for i in range(count)), name
    )


def orientation_poly() -> Poly:
    """Orientation determinant of three planar points (positive = counterclockwise)."""
    v = _vars(3, 2)
    (ax, ay), (bx, by), (cx, cy) = v
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def collinearity() -> SemiAlgRelation:
    f = orientation_poly()
    return make_relation(3, 2, [f, -f], lambda b: b[0] and b[1], "collinear")


def positive_orientation() -> SemiAlgRelation:
    """Counterclockwise triples (in base order); not symmetric."""
    f = orientation_poly()
    return make_relation(3, 2, [-f], lambda b: not b[0], "ccw")


def sum_at_least(c=0, arity: int = 3) -> SemiAlgRelation:
    """``x1 + ... + xk >= c`` on the line."""
    v = _vars(arity, 1)
    total = Poly.const(-rat(c), arity)
    for row in v:
        total = total + row[0]
    return make_relation(arity, 1, [total], lambda b: b[0], "sum>=%s" % c)


def lift(R: SemiAlgRelation, mapping: Sequence[int], arity: int) -> SemiAlgRelation:
    """Re-index the argument slots of R (slot i -> ``mapping[i]``) into a larger arity."""
    d = R.dim
    var_map = [mapping[i // d] * d + i % d for i in range(R.arity * d)]
    polys = tuple(embed(p, arity * d, var_map) for p in R.polys)
    return SemiAlgRelation(arity, d, polys, R.phi, R.name)


# ---------------------------------------------------------------------------
# systems and cached membership


@dataclass
class RelationSystem:
    base: PointSet
    relations: list = field(default_factory=list)

    def __post_init__(self):
        arities = {R.arity for R in self.relations}
        if len(arities) > 1:
            raise RelationError("relations in a system must share their arity")
        for R in self.relations:
            if R.dim != self.base.dim:
                raise RelationError("relation %r does not match point dimension %d" % (R, self.base.dim))


class Membership:
    """Memoized membership of index tuples of a point set (sorted to base order)."""

    def __init__(self, R: SemiAlgRelation, P: PointSet):
        if R.dim != P.dim:
            raise RelationError("relation dimension %d vs point dimension %d" % (R.dim, P.dim))
        self.R = R
        self.P = P
        self._R, self._pts = framed(R, P)
        self._cache: dict = {}
        self.evaluations = 0

    def __call__(self, idx) -> bool:
        key = tuple(sorted(idx))
        hit = self._cache.get(key)
        if hit is None:
            coords = []
            for i in key:
                coords.extend(self._pts[i])
            hit = self._R.holds(coords)
            self._cache[key] = hit
            self.evaluations += 1
        return hit


def pair_matrix(R: SemiAlgRelation, P: PointSet) -> np.ndarray:
    """Symmetric boolean adjacency of a binary relation (pairs taken in base order)."""
    if R.arity != 2:
        raise RelationError("pair_matrix needs a binary relation")
    n = len(P)
    A = np.zeros((n, n), dtype=bool)
    R, pts = framed(R, P)
    for i in range(n):
        pi = list(pts[i])
        for j in range(i + 1, n):
            if R.holds(pi + list(pts[j])):
                A[i, j] = A[j, i] = True
    return A


def _pair_masks(member: Membership, idx: Sequence[int]):
    """For k=3: bitmask over positions of third points completing each pair into E."""
    n = len(idx)
    masks = {}
    for a in range(n):
        for b in range(a + 1, n):
            m = 0
            for c in range(n):
                if c != a and c != b and member((idx[a], idx[b], idx[c])):
                    m |= 1 << c
            masks[a, b] = masks[b, a] = m
    return masks


def _adjacency_masks(member: Membership, idx: Sequence[int]):
    n = len(idx)
    adj = [0] * n
    for a in range(n):
        for b in range(a + 1, n):
            if member((idx[a], idx[b])):
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    return adj


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# oracles


def check_symmetric(R: SemiAlgRelation, sample: PointSet, trials: int = 200, seed: int = 0) -> dict:
    """Permutation invariance on random k-subsets (exhaustive when trials cover them all)."""
    k = R.arity
    n = len(sample)
    if n < k:
        raise RelationError("sample needs at least %d points" % k)
    total = math.comb(n, k)
    if trials >= total:
        subsets = itertools.combinations(range(n), k)
        exhaustive = True
    else:
        rng = random.Random(seed)
        subsets = (tuple(sorted(rng.sample(range(n), k))) for _ in range(trials))
        exhaustive = False
    checked = 0
    for sub in subsets:
        checked += 1
        pts = [sample.points[i] for i in sub]
        ref = tuple_in_relation(R, pts)
        for perm in itertools.permutations(range(k)):
            if tuple_in_relation(R, [pts[i] for i in perm]) != ref:
                return {
                    "symmetric": False,
                    "counterexample": (tuple(pts), tuple(pts[i] for i in perm)),
                    "checked": checked,
                    "exhaustive": exhaustive,
                }
    return {"symmetric": True, "counterexample": None, "checked": checked, "exhaustive": exhaustive}


def first_tuple_in(R: SemiAlgRelation, P: PointSet, subset: Sequence[int], member: Membership | None = None):
    """First k-tuple (base order) of ``subset`` that lies in R, or None."""
    member = member or Membership(R, P)
    for tup in itertools.combinations(sorted(subset), R.arity):
        if member(tup):
            return tup
    return None


def first_tuple_out(R: SemiAlgRelation, P: PointSet, subset: Sequence[int], member: Membership | None = None):
    member = member or Membership(R, P)
    for tup in itertools.combinations(sorted(subset), R.arity):
        if not member(tup):
            return tup
    return None


def _search(R, P, target, want_clique, indices, member, node_budget, maximize=False):
    """Backtracking over positions of ``indices``; bitset pruning for k in {2, 3}."""
    idx = list(range(len(P))) if indices is None else list(indices)
    n = len(idx)
    k = R.arity
    member = member or Membership(R, P)
    nodes = 0
    best: list = []

    if k == 2:
        adj = _adjacency_masks(member, idx)
        masks = None
    elif k == 3:
        masks = _pair_masks(member, idx)
        adj = None
    else:
        masks = adj = None

    full = (1 << n) - 1

    def ok_general(chosen, v):
        for rest in itertools.combinations(chosen, k - 1):
            inside = member(tuple(idx[i] for i in rest) + (idx[v],))
            if inside != want_clique:
                return False
        return True

    def rec(chosen, cand):
        nonlocal nodes, best
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded("search exceeded %d nodes" % node_budget)
        if len(chosen) > len(best):
            best = list(chosen)
            if not maximize and len(best) >= target:
                return True
        if len(chosen) + bin(cand).count("1") <= (len(best) if maximize else target - 1):
            return False
        for v in _bits(cand):
            cand &= ~(1 << v)
            later = cand & ~((1 << (v + 1)) - 1)
            if k == 2:
                nxt = later & (adj[v] if want_clique else ~adj[v])
            elif k == 3:
                nxt = later
                for u in chosen:
                    m = masks[u, v]
                    nxt &= m if want_clique else ~m
            else:
                if not ok_general(chosen, v):
                    continue
                nxt = later
            chosen.append(v)
            if rec(chosen, nxt):
                return True
            chosen.pop()
            if len(chosen) + bin(cand).count("1") <= (len(best) if maximize else target - 1):
                break
        return False

    if maximize or target > 0:
        rec([], full)
    return [idx[i] for i in best], nodes


def brute_force_independent(
    R: SemiAlgRelation, P: PointSet, target: int, subset_budget: int = SUBSET_BUDGET,
    indices=None, member=None, node_budget: int = NODE_BUDGET,
):
    """A ``target``-subset with no k-tuple in R, or None if none exists (exhaustive)."""
    n = len(P) if indices is None else len(indices)
    if math.comb(n, target) > subset_budget:
        raise BudgetExceeded("C(%d, %d) subsets exceed the budget %d" % (n, target, subset_budget))
    if target > n:
        return None
    found, _ = _search(R, P, target, False, indices, member, node_budget)
    return sorted(found) if len(found) >= target else None


def brute_force_clique(
    R: SemiAlgRelation, P: PointSet, target: int, subset_budget: int = SUBSET_BUDGET,
    indices=None, member=None, node_budget: int = NODE_BUDGET,
):
    """A ``target``-subset with every k-tuple in R, or None (exhaustive)."""
    n = len(P) if indices is None else len(indices)
    if math.comb(n, target) > subset_budget:
        raise BudgetExceeded("C(%d, %d) subsets exceed the budget %d" % (n, target, subset_budget))
    if target > n:
        return None
    found, _ = _search(R, P, target, True, indices, member, node_budget)
    return sorted(found) if len(found) >= target else None


def max_independent(R, P, indices=None, member=None, node_budget: int = NODE_BUDGET) -> list:
    """A maximum subset with no k-tuple in R (branch and bound, exhaustive)."""
    found, _ = _search(R, P, 0, False, indices, member, node_budget, maximize=True)
    return sorted(found)


def clique_number(R, P, indices=None, member=None, node_budget: int = NODE_BUDGET) -> int:
    found, _ = _search(R, P, 0, True, indices, member, node_budget, maximize=True)
    return len(found)


def is_ks3_free(R: SemiAlgRelation, P: PointSet, s: int, **budget) -> bool:
    if R.arity != 3:
        raise RelationError("K_s^(3)-freeness is defined for ternary relations")
    return brute_force_clique(R, P, s, **budget) is None


def coverage_gap(system: RelationSystem, matrices=None):
    """First pair of indices covered by no relation, or None."""
    n = len(system.base)
    mats = matrices if matrices is not None else [pair_matrix(R, system.base) for R in system.relations]
    covered = np.zeros((n, n), dtype=bool)
    for A in mats:
        covered |= A
    missing = np.argwhere(np.triu(~covered, 1))
    if len(missing):
        i, j = missing[0]
        return int(i), int(j)
    return None


def mono_triangle_in(A: np.ndarray):
    """Lexicographically first triangle of a boolean adjacency matrix, or None."""
    n = A.shape[0]
    order = np.arange(n)
    for i in range(n):
        row = A[i]
        for j in np.nonzero(row[i + 1:])[0] + i + 1:
            common = row & A[j] & (order > j)
            hit = np.nonzero(common)[0]
            if len(hit):
                return int(i), int(j), int(hit[0])
    return None


def find_mono_triangle_bruteforce(S: RelationSystem, matrices=None, tuple_budget: int = TUPLE_BUDGET):
    """Exhaustive search for a triple monochromatic in some relation.

    Returns ``((i, j, k), color)`` with zero-based color index, or None.
    """
    if any(R.arity != 2 for R in S.relations):
        raise RelationError("monochromatic triangles need binary relations")
    n = len(S.base)
    if math.comb(n, 3) * max(len(S.relations), 1) > tuple_budget:
        raise BudgetExceeded("%d points exceed the triple budget" % n)
    mats = matrices if matrices is not None else [pair_matrix(R, S.base) for R in S.relations]
    gap = coverage_gap(S, mats)
    if gap is not None:
        raise UncoveredPair(gap)
    for color, A in enumerate(mats):
        tri = mono_triangle_in(A)
        if tri is not None:
            return tri, color
    return None
