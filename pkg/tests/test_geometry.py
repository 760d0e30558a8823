import itertools
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from semiramsey.geometry import (
    GeneralPositionError,
    HyperplaneFamily,
    NotFound,
    check_general_position,
    cupcap_extremal,
    dualize_hyperplanes,
    es_extremal_sequence,
    family_from_sequence,
    find_cup_cap,
    has_cup_cap_exhaustive,
    longest_monotone,
    one_sided,
    osh_exhaustive,
    osh_extract,
    vertex,
)
from semiramsey.relations import PointSet, tuple_in_relation


def random_gp_points(rng, n, box=1000):
    while True:
        xs = rng.sample(range(-box, box), n)
        P = PointSet(2, tuple((x, rng.randint(-box, box)) for x in xs))
        try:
            check_general_position(P)
            return P
        except GeneralPositionError:
            pass


def random_family(rng, n, d, span=20):
    while True:
        planes = tuple(
            (tuple(F(rng.randint(-span, span), rng.randint(1, 5)) for _ in range(d)), F(rng.randint(-span, span), rng.randint(1, 5)))
            for _ in range(n)
        )
        H = HyperplaneFamily(d, planes)
        try:
            dualize_hyperplanes(H)
            return H
        except GeneralPositionError:
            pass


def brute_monotone(seq):
    best_inc = best_dec = 1 if seq else 0
    for k in range(2, len(seq) + 1):
        for sub in itertools.combinations(seq, k):
            if all(a < b for a, b in zip(sub, sub[1:])):
                best_inc = k
            if all(a > b for a, b in zip(sub, sub[1:])):
                best_dec = k
    return best_inc, best_dec


def test_es_examples():
    seq = es_extremal_sequence(3, 3)
    assert len(seq) == 4
    m = longest_monotone(seq)
    assert (m.inc, m.dec) == (2, 2) == brute_monotone(seq)
    for n in range(2, 7):
        s = es_extremal_sequence(2, n)
        assert len(s) == n - 1 and all(a > b for a, b in zip(s, s[1:]))
    for s_ in range(2, 7):
        s = es_extremal_sequence(s_, 2)
        assert len(s) == s_ - 1 and all(a < b for a, b in zip(s, s[1:]))


def test_longest_monotone_examples():
    m = longest_monotone(range(7))
    assert (m.inc, m.dec) == (7, 1)
    m = longest_monotone([2, 1, 4, 3])
    assert (m.inc, m.dec) == (2, 2)
    with pytest.raises(ValueError):
        longest_monotone([1, 2, 1])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=0, max_size=9, unique=True))
def test_longest_monotone_matches_enumeration(seq):
    m = longest_monotone(seq)
    assert (m.inc, m.dec) == brute_monotone(seq)
    assert all(seq[a] < seq[b] for a, b in zip(m.inc_witness, m.inc_witness[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 10 ** 6))
def test_es_threshold(s, n, seed):
    rng = random.Random(seed)
    seq = rng.sample(range(1000), (s - 1) * (n - 1) + 1)
    m = longest_monotone(seq)
    assert m.inc >= s or m.dec >= n


def test_cupcap_sizes_and_detection():
    for s, n in [(3, 3), (4, 4), (5, 5), (3, 5), (5, 3)]:
        cfg = cupcap_extremal(s, n)
        assert len(cfg.points) == math.comb(n + s - 4, s - 2)
        assert isinstance(find_cup_cap(cfg, s, n), NotFound)
    cfg = cupcap_extremal(4, 4)
    assert not has_cup_cap_exhaustive(cfg.points, 4, "cup")
    assert not has_cup_cap_exhaustive(cfg.points, 4, "cap")
    cfg = cupcap_extremal(5, 5)
    assert len(cfg.points) == 20
    assert not has_cup_cap_exhaustive(cfg.points, 5, "cup")
    assert not has_cup_cap_exhaustive(cfg.points, 5, "cap")


def test_three_points_and_parabola():
    rng = random.Random(3)
    for _ in range(20):
        w = find_cup_cap(random_gp_points(rng, 3), 3, 3)
        assert w and w.kind in ("cup", "cap")
    P = PointSet(2, tuple((x, x * x) for x in range(-4, 5)))
    w = find_cup_cap(P, 9, 3)
    assert w.kind == "cup" and len(w.indices) == 9
    assert not has_cup_cap_exhaustive(P, 3, "cap")


def test_general_position_violations_are_named():
    with pytest.raises(GeneralPositionError, match="collinear"):
        find_cup_cap(PointSet(2, ((0, 0), (1, 1), (2, 2))), 3, 3)
    with pytest.raises(GeneralPositionError, match="x-coordinate"):
        find_cup_cap(PointSet(2, ((0, 0), (0, 1), (2, 5))), 3, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 5), st.integers(3, 5), st.integers(0, 10 ** 6))
def test_cupcap_threshold(s, n, seed):
    rng = random.Random(seed)
    P = random_gp_points(rng, math.comb(n + s - 4, s - 2) + 1)
    w = find_cup_cap(P, s, n)
    assert w
    assert has_cup_cap_exhaustive(P.subset(w.indices), len(w.indices), w.kind)


def test_dual_examples():
    H = HyperplaneFamily(2, (((-1, 1), 1), ((1, 1), 1)))
    P, E = dualize_hyperplanes(H)
    assert P.dim == 3 and E.arity == 2
    assert tuple_in_relation(E, list(P))
    H = HyperplaneFamily(2, (((-1, 1), -1), ((1, 1), -1)))
    P, E = dualize_hyperplanes(H)
    assert not tuple_in_relation(E, list(P))


def test_dual_membership_matches_direct_solve_3d():
    rng = random.Random(100)
    for _ in range(100):
        H = random_family(rng, 3, 3)
        P, E = dualize_hyperplanes(H)
        v = vertex(H, (0, 1, 2))
        assert tuple_in_relation(E, list(P)) == (v[-1] > 0)


def test_dual_membership_all_subsets():
    rng = random.Random(5)
    H = random_family(rng, 7, 2)
    P, E = dualize_hyperplanes(H)
    for sub in itertools.combinations(range(7), 2):
        for perm in itertools.permutations(sub):
            assert tuple_in_relation(E, [P[i] for i in perm]) == (vertex(H, perm)[-1] > 0)


def test_osh_examples():
    rng = random.Random(11)
    for _ in range(20):
        res = osh_extract(random_family(rng, 5, 2), 3, 3)
        assert res
    H = family_from_sequence(es_extremal_sequence(3, 3))
    assert len(H) == 4
    res = osh_extract(H, 3, 3)
    assert isinstance(res, NotFound) and res.exhaustive
    assert isinstance(osh_exhaustive(H, 3, 3), NotFound)
    H3 = random_family(random.Random(6), 6, 3)
    res = osh_extract(H3, 3, 3)
    if res:
        assert one_sided(H3, res.indices, res.side)
    else:
        assert isinstance(osh_exhaustive(H3, 3, 3), NotFound)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 7), st.integers(2, 4), st.integers(2, 4), st.integers(0, 10 ** 6))
def test_osh_planar_agrees_with_enumeration(N, s, n, seed):
    rng = random.Random(seed)
    H = random_family(rng, N, 2)
    fast, slow = osh_extract(H, s, n), osh_exhaustive(H, s, n)
    assert bool(fast) == bool(slow)
    if fast:
        assert one_sided(H, fast.indices, fast.side)
