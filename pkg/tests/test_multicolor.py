import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from semiramsey.algebra import Poly
from semiramsey.multicolor import (
    MonoConfig,
    PartitionError,
    SumFreePartition,
    blowup,
    check_partition,
    extend_partition,
    find_mono_triangle,
    format_partition,
    parse_partition,
    schur_coloring,
    schur_search,
    verify_blowup,
    verify_translation_invariance,
)
from semiramsey.relations import (
    PointSet,
    RelationSystem,
    UncoveredPair,
    distance_in_intervals,
    find_mono_triangle_bruteforce,
    full_relation,
    make_relation,
    tuple_in_relation,
)


def sum_free_oracle(c):
    return all(a + b not in c for a in c for b in c)


@pytest.fixture(scope="module")
def s3():
    return schur_search(3, mode="maximize").partition


def test_small_schur_numbers():
    assert schur_search(1, mode="maximize").n == 1
    res = schur_search(2, mode="maximize")
    assert res.n == 4 and not check_partition(res.partition)
    assert sorted(map(sorted, res.partition.classes)) == [[1, 4], [2, 3]]
    assert schur_search(3, mode="maximize").n == 13


def test_decide_mode():
    assert schur_search(2, 4).status == "SAT"
    assert schur_search(2, 5).status == "UNSAT"
    assert schur_search(3, 14).status == "UNSAT"


def test_budget_gives_unknown():
    assert schur_search(3, 13, node_budget=3).status == "UNKNOWN"


def test_interval_cap_structure():
    res = schur_search(3, mode="maximize", interval_cap=2)
    assert all(k <= 2 for k in res.partition.runs())
    assert not check_partition(res.partition)
    assert res.bound is not None


def test_partition_file_round_trip(s3):
    assert parse_partition(format_partition(s3)) == s3
    with pytest.raises(PartitionError):
        parse_partition("3 5\n1 4\n")


def test_check_partition_rejects():
    assert check_partition(SumFreePartition(4, [[1, 2], [3, 4]]))
    assert check_partition(SumFreePartition(4, [[1, 4], [2]]))


def test_schur_colorings_triangle_free(s3):
    p2 = schur_search(2, mode="maximize").partition
    S2 = schur_coloring(p2)
    assert len(S2.base) == 5 and find_mono_triangle_bruteforce(S2) is None
    S3 = schur_coloring(s3)
    assert len(S3.base) == 14 and find_mono_triangle_bruteforce(S3) is None
    S1 = schur_coloring(SumFreePartition(1, [[1]]))
    assert len(S1.base) == 2


def test_blowup_s2_level2():
    B = blowup(schur_search(2, mode="maximize").partition, 2)
    assert len(B.points) == 25 and len(B.relations) == 4
    rep = verify_blowup(B)
    assert rep["covered"] and rep["triangle_free"] and rep["exhaustive"]


def test_translation_invariance(s3):
    B = blowup(s3, 1)
    rep = verify_translation_invariance(B, None, [1, -1, 7, -7])
    assert rep["invariant"] and rep["exhaustive"]
    assert verify_translation_invariance(B, None, [0])["invariant"]
    x = Poly.var(0, 2)
    skewed = make_relation(2, 1, [x - 5], lambda b: b[0])
    assert not verify_translation_invariance([skewed], B.points, [3])["invariant"]


def test_mono_examples(s3):
    S = RelationSystem(PointSet.from_values([0, 1, 2]), [full_relation(2, 1)])
    assert find_mono_triangle(S) == ((0, 1, 2), 0)
    assert find_mono_triangle(schur_coloring(s3)) is None
    ext = extend_partition(s3, 14, 0)
    S15 = schur_coloring(ext, validate=False)
    (tri, c) = find_mono_triangle(S15)
    R = S15.relations[c]
    pts = [S15.base[i] for i in tri]
    assert all(tuple_in_relation(R, [pts[a], pts[b]]) for a, b in itertools.combinations(range(3), 2))


def test_mono_needs_coverage():
    S = RelationSystem(PointSet.from_values([0, 1, 5]), [distance_in_intervals([(0, 2)])])
    with pytest.raises(UncoveredPair):
        find_mono_triangle(S)


def interval_system(seed, n, m):
    rng = random.Random(seed)
    pts = sorted(rng.sample(range(1, 3 * n + 5), n))
    D = pts[-1] - pts[0]
    cuts = sorted(rng.sample(range(1, D), min(D - 1, 2 * m))) if D > 1 else []
    bounds = [0] + cuts + [D]
    colors = [[] for _ in range(m)]
    for a, b in zip(bounds, bounds[1:]):
        colors[rng.randrange(m)].append((F(a) + F(1, 2), F(b) + F(1, 3)))
    rels = [distance_in_intervals(c) for c in colors if c]
    return RelationSystem(PointSet.from_values(pts), rels)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(3, 24), st.integers(1, 3), st.sampled_from(["desk", "deep"]))
def test_mono_agrees_with_oracle(seed, n, m, mode):
    S = interval_system(seed, n, m)
    cfg = MonoConfig() if mode == "desk" else MonoConfig(small_n=3)
    fast = find_mono_triangle(S, cfg, seed)
    slow = find_mono_triangle_bruteforce(S)
    assert (fast is None) == (slow is None)
    if fast is not None:
        (i, j, k), c = fast
        R = S.relations[c]
        assert all(tuple_in_relation(R, [S.base[a], S.base[b]]) for a, b in ((i, j), (i, k), (j, k)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 13))
def test_search_partitions_pass_independent_check(m, n):
    res = schur_search(m, n)
    if res.status == "SAT":
        p = res.partition
        assert sorted(v for c in p.classes for v in c) == list(range(1, n + 1))
        assert all(sum_free_oracle(set(c)) for c in p.classes)
