import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from semiramsey.algebra import Poly
from semiramsey.relations import (
    Membership,
    PointSet,
    RelationError,
    collinearity,
    empty_relation,
    full_relation,
    max_independent,
    sum_at_least,
    tuple_in_relation,
)
from semiramsey.triple import (
    ExtractConfig,
    classify_triples,
    derived_binary,
    extract_independent,
    homogeneous_parts,
    paper_size_bound,
    propagation_holds,
)

COL = collinearity()


def no_three_collinear(seed, n, box=30):
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        c = (rng.randint(0, box), rng.randint(0, box))
        if c in pts:
            continue
        if any(
            (a[0] - c[0]) * (b[1] - c[1]) == (a[1] - c[1]) * (b[0] - c[0])
            for a, b in itertools.combinations(pts, 2)
        ):
            continue
        pts.append(c)
    return PointSet(2, tuple(pts))


def no_four_collinear(seed, n, box=30):
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        c = (rng.randint(0, box), rng.randint(0, box))
        if c in pts:
            continue
        ok = True
        for a in pts:
            k = sum(1 for b in pts if b != a and (a[0] - c[0]) * (b[1] - c[1]) == (a[1] - c[1]) * (b[0] - c[0]))
            if k >= 2:
                ok = False
                break
        if ok:
            pts.append(c)
    return PointSet(2, tuple(pts))


def symmetric_line(seed, n=60):
    rng = random.Random(seed)
    vals = rng.sample(range(1, 1000), n // 2)
    return PointSet.from_values(sorted([F(-v, 10) for v in vals] + [F(v, 10) for v in vals]))


def e_free(E, P, idx):
    return not any(tuple_in_relation(E, [P[i] for i in t]) for t in itertools.combinations(sorted(idx), 3))


def test_classify_trivial_relations():
    P = PointSet.from_values(range(9))
    parts = [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
    rep = classify_triples(parts, empty_relation(3, 1), P)
    assert rep["homogeneous_out"] == 1 and not rep["bad"]
    rep = classify_triples(parts, full_relation(3, 1), P)
    assert rep["homogeneous_in"] == 1 and not rep["bad"]


def test_classify_mixed_example():
    P = PointSet.from_values([-5, -4, -1, 1, 4, 5])
    rep = classify_triples([[0, 1], [2, 3], [4, 5]], sum_at_least(0), P)
    assert rep["bad"]
    # direct enumeration of the bad (p, q, part) triples
    E = sum_at_least(0)
    parts = [[0, 1], [2, 3], [4, 5]]
    expected = set()
    for i, part in enumerate(parts):
        rest = [p for j, o in enumerate(parts) if j != i for p in o]
        for p, q in itertools.combinations(rest, 2):
            vals = {tuple_in_relation(E, [P[a] for a in sorted((p, q, x))]) for x in part}
            if len(vals) > 1:
                expected.add((p, q, i))
    assert set(rep["bad"]) == expected


def test_disjointness_required():
    with pytest.raises(RelationError):
        classify_triples([[0, 1], [1, 2]], sum_at_least(0), PointSet.from_values(range(3)))


def test_homogeneous_empty_relation():
    P = PointSet.from_values(range(30))
    H = homogeneous_parts(P, empty_relation(3, 1), 3, 3)
    assert H.ok and H.attempts == 1


def test_homogeneous_collinearity():
    P = no_three_collinear(2, 20)
    H = homogeneous_parts(P, COL, 3, 3, seed=2)
    assert H.ok
    rep = classify_triples(H.parts, COL, P)
    assert not rep["bad"] and rep["homogeneous_out"] == 1


def test_homogeneous_symmetric_line():
    P = symmetric_line(0)
    H = homogeneous_parts(P, sum_at_least(0), 3, 3, seed=0)
    assert H.ok and "census" in H.report
    rep = classify_triples(H.parts, sum_at_least(0), P)
    assert not rep["bad"] and not rep["mixed"]


def test_homogeneous_refuses_when_too_small():
    H = homogeneous_parts(PointSet.from_values(range(5)), sum_at_least(0), 3, 3)
    assert not H.ok and H.verdict == "refused"


def test_derived_binary_examples():
    D = derived_binary(sum_at_least(0), (0,))
    x, y = Poly.var(0, 2), Poly.var(1, 2)
    assert D.polys == ((x + y),)
    D2 = derived_binary(COL, (0, 0))
    assert tuple_in_relation(D2, [(1, 1), (3, 3)]) and not tuple_in_relation(D2, [(1, 1), (3, 2)])
    with pytest.raises(RelationError):
        derived_binary(COL, (0, 0), [(0, 0), (1, 1)])


def test_derived_binary_consistency():
    rng = random.Random(9)
    P = no_three_collinear(9, 12)
    q0 = (F(7, 3), F(-2, 5))
    D = derived_binary(COL, q0)
    for _ in range(10):
        a, b = rng.sample(list(P), 2)
        assert tuple_in_relation(D, [a, b]) == COL.holds(list(a) + list(b) + list(q0))


def test_extract_trivial_cases():
    P = no_three_collinear(1, 10)
    assert extract_independent(P, COL, 3) == list(range(10))
    Q = PointSet.from_values(range(12))
    assert extract_independent(Q, empty_relation(3, 1), 5) == list(range(12))


def test_extract_grid():
    G = PointSet(2, tuple((i, j) for i in range(5) for j in range(5)))
    rep = {}
    out = extract_independent(G, COL, 4, report=rep)
    assert e_free(COL, G, out) and len(out) >= 4
    best = max_independent(COL, G)
    assert len(best) == 10 and len(out) <= len(best)
    assert rep["premise"] == "violated"
    with pytest.raises(RelationError):
        extract_independent(G, COL, 4, strict=True)


def test_extract_paper_preset_runs():
    P = no_four_collinear(3, 30)
    rep = {}
    out = extract_independent(P, COL, 4, ExtractConfig.paper(), report=rep)
    assert e_free(COL, P, out) and rep["preset"] == "paper"


def test_size_bound_is_vacuous_at_desk_scale():
    assert paper_size_bound(40, 2.0, 4) == pytest.approx(1.0, abs=1.0)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_homogeneous_success_is_verified(seed):
    P = symmetric_line(seed, 36)
    H = homogeneous_parts(P, sum_at_least(0), 3, 3, seed=seed)
    if H.ok:
        rep = classify_triples(H.parts, sum_at_least(0), P)
        assert not rep["bad"] and not rep["mixed"]
        assert propagation_holds(H.parts, sum_at_least(0), P)
    else:
        assert H.verdict == "refused"


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(8, 30))
def test_extract_output_is_e_free(seed, n):
    P = no_four_collinear(seed, n)
    out = extract_independent(P, COL, 4, seed=seed)
    assert e_free(COL, P, out)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(6, 22))
def test_nested_monotone_in_oracle_regime(seed, n):
    P = no_four_collinear(seed, n + 2)
    small = extract_independent(P.subset(range(n)), COL, 4, seed=seed)
    large = extract_independent(P, COL, 4, seed=seed)
    assert len(small) <= len(large)


@pytest.mark.xfail(strict=True, reason="the randomized recursion is not monotone under nesting once it leaves the oracle regime")
def test_nested_monotone_beyond_oracle_regime():
    P = no_four_collinear(1, 40)
    small = extract_independent(P.subset(range(24)), COL, 4, seed=1)
    large = extract_independent(P.subset(range(26)), COL, 4, seed=1)
    assert len(small) <= len(large)
