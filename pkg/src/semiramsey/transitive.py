"""Transitive subsets of binary relation systems and Dilworth-style extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import sign_at, substitute_vars
from .cutting import CuttingFailure, build_cutting, choose_backend
from .relations import (
    PointSet,
    RelationError,
    SemiAlgRelation,
    framed,
    pair_matrix,
)


class TransitivityError(RelationError):
    def __init__(self, triple, relation=None):
        super().__init__("ordered triple %r violates transitivity%s" % (
            triple, "" if relation is None else " of relation %d" % relation))
        self.triple = triple
        self.relation = relation


class CliqueBoundError(RelationError):
    pass


@dataclass(frozen=True)
class OrderedSubset:
    base: PointSet
    order: tuple

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        n = len(self.base)
        if len(set(order)) != len(order) or any(not 0 <= i < n for i in order):
            raise RelationError("order must list distinct valid indices")
        object.__setattr__(self, "order", order)

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def points(self) -> list:
        return [self.base.points[i] for i in self.order]


def _adjacency(R: SemiAlgRelation, P: PointSet, cache: dict | None = None) -> np.ndarray:
    if cache is not None and id(R) in cache:
        return cache[id(R)]
    if R.arity != 2:
        raise RelationError("binary relation expected, got arity %d" % R.arity)
    A = pair_matrix(R, P)
    if cache is not None:
        cache[id(R)] = A
    return A


def ordered_matrix(R: SemiAlgRelation, P: PointSet) -> np.ndarray:
    """Membership of every ordered pair (p_i, p_j), i != j, without sorting to base order."""
    n = len(P)
    A = np.zeros((n, n), dtype=bool)
    R, pts = framed(R, P)
    for i in range(n):
        for j in range(n):
            if i != j and R.holds(list(pts[i]) + list(pts[j])):
                A[i, j] = True
    return A


def base_order_matrix(ordered: np.ndarray) -> np.ndarray:
    """Membership of unordered pairs, evaluated with the lower index first."""
    U = np.triu(ordered, 1)
    return U | U.T


def transitivity_violation(A: np.ndarray, order: Sequence[int]):
    """First ordered triple a<b<c (positions in ``order``) with ab, bc in E but ac not; else None."""
    order = list(order)
    if len(order) < 3:
        return None
    B = A[np.ix_(order, order)]
    U = np.triu(B, 1).astype(np.int64)
    paths = (U @ U) > 0
    bad = np.argwhere(np.triu(paths & ~B, 2))
    if not len(bad):
        return None
    i, k = (int(v) for v in bad[0])
    j = next(j for j in range(i + 1, k) if B[i, j] and B[j, k])
    return order[i], order[j], order[k]


def is_transitive(A: np.ndarray, order: Sequence[int]) -> bool:
    return transitivity_violation(A, order) is None


def _chain_levels(A: np.ndarray, order: Sequence[int]) -> list:
    """Length of the longest E-chain ending at each position of ``order``."""
    level = [1] * len(order)
    for b in range(len(order)):
        row = A[order[b]]
        best = 0
        for a in range(b):
            if row[order[a]] and level[a] > best:
                best = level[a]
        level[b] = best + 1
    return level


def chain_clique_number(A: np.ndarray, order: Sequence[int]) -> int:
    """Clique number of a relation that is transitive on ``order`` (longest chain)."""
    return max(_chain_levels(A, order), default=0)


def dilworth_independent(V: OrderedSubset, E: SemiAlgRelation, omega: int | None = None, *, matrix=None) -> OrderedSubset:
    """Largest Mirsky level class; at least ceil(|V| / omega) points with no E-pair.

    Transitivity along ``V.order`` is checked exhaustively first.  On a
    transitive ordering the clique number equals the longest chain, so the
    supplied bound is always checked exactly.
    """
    A = matrix if matrix is not None else _adjacency(E, V.base)
    bad = transitivity_violation(A, V.order)
    if bad is not None:
        raise TransitivityError(bad)
    if not len(V):
        return V
    levels = _chain_levels(A, V.order)
    height = max(levels)
    if omega is not None and height > omega:
        raise CliqueBoundError("clique number %d exceeds the stated bound %d" % (height, omega))
    classes: dict = {}
    for pos, lv in enumerate(levels):
        classes.setdefault(lv, []).append(V.order[pos])
    best = max(sorted(classes), key=lambda lv: len(classes[lv]))
    return OrderedSubset(V.base, tuple(classes[best]))


@dataclass
class TransitiveReport:
    size: int
    target: int
    target_met: bool
    c3: float
    c3_measured: float | None
    levels: list = field(default_factory=list)
    uniformity_checks: int = 0
    backend: str = ""


def _level_record(levels, depth, **kw):
    while len(levels) <= depth:
        levels.append([])
    levels[depth].append(kw)


def _best_small_ordering(idx: list, mats: list) -> list:
    """Largest subset of a tiny set with an ordering transitive for all relations."""
    import itertools

    for size in range(len(idx), 1, -1):
        for sub in itertools.combinations(idx, size):
            for perm in itertools.permutations(sub):
                if all(is_transitive(A, perm) for A in mats):
                    return list(perm)
    return idx[:1]


def _child_seed(seed: int, branch: int) -> int:
    return (seed * 1_000_003 + 7919 * (branch + 1)) % (1 << 61)


def transitive_subset(
    P: PointSet,
    relations: Sequence[SemiAlgRelation],
    c3: float = 2.0,
    backend: str = "auto",
    seed: int = 0,
    *,
    floor: int = 4,
    report: list | None = None,
    matrices: list | None = None,
    indices: Sequence[int] | None = None,
    slot_symmetric: Sequence[bool] | None = None,
) -> OrderedSubset:
    """An ordered subset of P on which every relation is transitive.

    The recursion cuts the plane (or line) by the surfaces f(p, x) = 0, keeps
    the fullest cell as P1, keeps the points whose surfaces miss that cell,
    refines them by their sign pattern at one point of P1, and concatenates
    the two recursive orderings.
    """
    relations = list(relations)
    if len(relations) < 2:
        raise RelationError("transitive_subset needs at least two relations")
    for R in relations:
        if R.arity != 2 or R.dim != P.dim:
            raise RelationError("relations must be binary on %d-dimensional points" % P.dim)
    if matrices is None:
        ordered = [ordered_matrix(R, P) for R in relations]
        symmetric = [bool(np.array_equal(A, A.T)) for A in ordered]
        mats = [base_order_matrix(A) for A in ordered]
    else:
        mats = matrices
        symmetric = [bool(v) for v in (slot_symmetric or [False] * len(relations))]
    d = P.dim
    idx_all = list(range(len(P))) if indices is None else list(indices)
    t = max(R.complexity for R in relations)
    m = len(relations)
    levels: list = []
    checks = [0]
    used_backend = [backend if backend != "auto" else ""]

    # surfaces Z_{p,i,j}: first slot fixed to p; the free variables are x
    fixed_polys = {}

    def surfaces_of(p):
        out = fixed_polys.get(p)
        if out is None:
            coords = P.points[p]
            out = []
            for R, sym in zip(relations, symmetric):
                for slot in ([0] if sym else [0, 1]):
                    for f in R.polys:
                        out.append(substitute_vars(f, {slot * d + k: coords[k] for k in range(d)}))
            fixed_polys[p] = out
        return out

    def rec(idx: list, sd: int, depth: int) -> list:
        n = len(idx)
        if n <= 1:
            return idx
        if all(is_transitive(A, idx) for A in mats):
            _level_record(levels, depth, size=n, shortcut=True)
            return idx
        if n <= floor:
            out = _best_small_ordering(idx, mats)
            _level_record(levels, depth, size=n, floor=len(out))
            return out
        polys, owner = [], []
        for p in idx:
            for g in surfaces_of(p):
                if g.constant_value() is None:
                    polys.append(g)
                    owner.append(p)
        if polys:
            pts = [P.points[i] for i in idx]
            be = backend
            if be == "auto":
                be = choose_backend(polys, d)
            used_backend[0] = be
            r = min(max(1, (m * t) ** 2), len(polys))
            while True:
                try:
                    K = build_cutting(polys, r, be, sd, dim=d, points=pts)
                    break
                except CuttingFailure:
                    # concurrent surfaces defeat the box backend at this r
                    if r <= 1:
                        raise
                    r = max(1, r // 2)
            groups: dict = {}
            for i in idx:
                groups.setdefault(K.locate(P.points[i]), []).append(i)
            heavy = max(sorted(groups), key=lambda pos: len(groups[pos]))
            inside = groups[heavy]
            crossing = {owner[j] for j in K.crossing[heavy]}
        else:
            inside, crossing = list(idx), set()
        P1 = inside[: max(1, n // 2)]
        P1set = set(P1)
        p0 = min(P1)
        P2 = [q for q in idx if q not in P1set and q not in crossing]
        classes: dict = {}
        for q in P2:
            key = tuple(sign_at(g, P.points[p0]) for g in surfaces_of(q))
            classes.setdefault(key, []).append(q)
        P3 = max(classes.values(), key=len) if classes else []
        # exact refinement: keep the largest group of q with uniform rows toward P1
        groups3: dict = {}
        for q in P3:
            key = []
            for A in mats:
                col = A[P1, q]
                checks[0] += len(P1)
                key.append(None if col.any() and not col.all() else bool(col[0]))
            if None not in key:
                groups3.setdefault(tuple(key), []).append(q)
        refined = max(groups3.values(), key=len) if groups3 else []
        dropped = len(P3) - len(refined)
        if dropped and all(symmetric):
            raise AssertionError("sign-pattern class is not uniform toward P1")
        P3 = refined
        _level_record(levels, depth, size=n, P1=len(P1), P2=len(P2), P3=len(P3), dropped=dropped,
                      r=r if polys else None)
        left = rec(P1, _child_seed(sd, 0), depth + 1)
        right = rec(P3, _child_seed(sd, 1), depth + 1) if P3 else []
        out = left + right
        return out

    order = rec(idx_all, seed, 0)
    for i, A in enumerate(mats):
        bad = transitivity_violation(A, order)
        if bad is not None:
            raise TransitivityError(bad, i)
    N = len(idx_all)
    logm = math.log2(m)
    target = math.ceil(N ** (1.0 / (c3 * logm))) if N else 0
    measured = None
    if len(order) > 1 and N > 1:
        measured = math.log(N) / (math.log(len(order)) * logm)
    if report is not None:
        report.append(TransitiveReport(
            size=len(order), target=target, target_met=len(order) >= target, c3=c3,
            c3_measured=measured, levels=levels, uniformity_checks=checks[0], backend=used_backend[0],
        ))
    return OrderedSubset(P, tuple(order))


def empty_in_all(
    P: PointSet,
    relations: Sequence[SemiAlgRelation],
    clique_bounds: Sequence[int] | None = None,
    c3: float = 2.0,
    backend: str = "auto",
    seed: int = 0,
    *,
    report: dict | None = None,
    matrices: list | None = None,
    indices: Sequence[int] | None = None,
    slot_symmetric: Sequence[bool] | None = None,
) -> list:
    """A subset of P with no pair in any relation, via one Dilworth pass per relation."""
    relations = list(relations)
    if matrices is None:
        ordered = [ordered_matrix(R, P) for R in relations]
        symmetric = [bool(np.array_equal(A, A.T)) for A in ordered]
        mats = [base_order_matrix(A) for A in ordered]
    else:
        mats, symmetric = matrices, slot_symmetric
    treps: list = []
    V = transitive_subset(P, relations, c3, backend, seed, report=treps, matrices=mats, indices=indices,
                          slot_symmetric=symmetric)
    sizes = [len(V)]
    omegas = []
    for i, R in enumerate(relations):
        omega = None if clique_bounds is None else clique_bounds[i]
        measured = chain_clique_number(mats[i], V.order)
        V = dilworth_independent(V, R, omega, matrix=mats[i])
        omegas.append(omega if omega is not None else measured)
        sizes.append(len(V))
    out = list(V.order)
    for i, A in enumerate(mats):
        sub = A[np.ix_(out, out)]
        if sub.any():
            raise AssertionError("relation %d still has a pair in the output" % i)
    if report is not None:
        N = len(P) if indices is None else len(indices)
        m = len(relations)
        base = N ** (1.0 / (c3 * math.log2(m))) if N else 0.0
        target = math.ceil(base / math.prod(omegas)) if omegas else len(out)
        report.update({
            "transitive": treps[0],
            "sizes": sizes,
            "clique_bounds": omegas,
            "target": target,
            "target_met": len(out) >= target,
            "size": len(out),
        })
    return out
