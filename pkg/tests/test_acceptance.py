"""Acceptance checks, one per criterion.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
Each check prints a single PASS/FAIL line with its measurements.
"""

import itertools
import math
import random
import sys
import time
from fractions import Fraction as F

import numpy as np
import pytest

from semiramsey.algebra import Poly, milnor_thom_bound, random_poly, sign_vector
from semiramsey.cutting import build_cutting, crosses, partition_low_crossing, verify_cutting
from semiramsey.geometry import (
    GeneralPositionError,
    HyperplaneFamily,
    NotFound,
    check_general_position,
    check_hyperplane_position,
    cupcap_extremal,
    es_extremal_sequence,
    family_from_sequence,
    find_cup_cap,
    longest_monotone,
    one_sided,
    osh_extract,
)
from semiramsey.harness import generate_instance
from semiramsey.multicolor import (
    MonoConfig,
    blowup,
    extend_partition,
    find_mono_triangle,
    schur_coloring,
    schur_search,
    verify_blowup,
    verify_translation_invariance,
)
from semiramsey.relations import (
    PointSet,
    RelationSystem,
    brute_force_clique,
    clique_number,
    collinearity,
    distance_at_least,
    distance_at_most,
    find_mono_triangle_bruteforce,
    max_independent,
    pair_matrix,
    rescale_poly,
    sum_at_least,
    tuple_in_relation,
)
from semiramsey.transitive import empty_in_all, transitive_subset
from semiramsey.triple import classify_triples, extract_independent, homogeneous_parts


# ---------------------------------------------------------------------------
# independent helpers


def sum_free(values) -> bool:
    s = set(values)
    return not any(a + b in s for a in s for b in s)


def turn(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def is_chain(pts, sign) -> bool:
    pts = sorted(pts)
    return all(turn(pts[k], pts[k + 1], pts[k + 2]) == sign for k in range(len(pts) - 2))


def solve2(l1, l2):
    (a1, b1), c1 = l1
    (a2, b2), c2 = l2
    det = a1 * b2 - a2 * b1
    return (F(c1 * b2 - c2 * b1, 1) / det, F(a1 * c2 - a2 * c1, 1) / det)


def random_points_gp(rng, n, box=10 ** 4):
    while True:
        xs = rng.sample(range(box), n)
        P = PointSet(2, tuple((x, rng.randrange(box)) for x in xs))
        try:
            check_general_position(P)
            return P
        except GeneralPositionError:
            pass


def random_line_family(rng, n):
    while True:
        H = HyperplaneFamily(2, tuple(((rng.randint(-50, 50), rng.randint(-50, 50)), rng.randint(-50, 50)) for _ in range(n)))
        try:
            check_hyperplane_position(H)
            return H
        except GeneralPositionError:
            pass


def no_four_collinear(seed, n=40, box=30):
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        c = (rng.randint(0, box), rng.randint(0, box))
        if c in pts:
            continue
        if any(sum(1 for b in pts if b != a and turn(a, b, c) == 0) >= 2 for a in pts):
            continue
        pts.append(c)
    return PointSet(2, tuple(pts))


# ---------------------------------------------------------------------------
# criteria; each returns (ok, detail, time limit in seconds or None)


def check_1():
    ok = True
    for s in range(2, 7):
        for n in range(2, 7):
            seq = es_extremal_sequence(s, n)
            m = longest_monotone(seq)
            ok &= len(seq) == (s - 1) * (n - 1) and m.inc < s and m.dec < n
            rng = random.Random(1000 * s + n)
            L = (s - 1) * (n - 1) + 1
            for _ in range(1000):
                m = longest_monotone(rng.sample(range(100 * L), L))
                ok &= m.inc >= s or m.dec >= n
    return ok, "25 (s,n) pairs, 1000 random sequences each", 5


def check_2():
    ok, witnesses = True, 0
    for s in range(3, 6):
        for n in range(3, 6):
            size = math.comb(n + s - 4, s - 2)
            cfg = cupcap_extremal(s, n)
            ok &= len(cfg.points) == size and isinstance(find_cup_cap(cfg, s, n), NotFound)
            rng = random.Random(100 * s + n)
            for _ in range(200):
                P = random_points_gp(rng, size + 1)
                w = find_cup_cap(P, s, n)
                good = bool(w) and len(w.indices) == (s if w.kind == "cup" else n)
                good = good and is_chain([P[i] for i in w.indices], 1 if w.kind == "cup" else -1)
                ok &= good
                witnesses += good
    return ok, "9 (s,n) pairs, %d/1800 verified witnesses" % witnesses, 60


def check_3():
    found, ok, times = [], True, []
    for m in range(1, 5):
        t0 = time.perf_counter()
        res = schur_search(m, mode="maximize")
        times.append(time.perf_counter() - t0)
        found.append(res.n)
        covered = sorted(v for c in res.partition.classes for v in c) == list(range(1, res.n + 1))
        ok &= covered and all(sum_free(c) for c in res.partition.classes) and len(res.partition.classes) == m
    ok &= found == [1, 4, 13, 44] and max(times[:3]) < 1
    return ok, "S(1..4) = %s, times %s" % (found, ["%.2fs" % t for t in times]), None


def _has_mono_triangle(n_points, color):
    for a, b, c in itertools.combinations(range(n_points), 3):
        if color[b - a] == color[c - b] == color[c - a]:
            return True
    return False


def check_4():
    part = schur_search(3, mode="maximize").partition
    S = schur_coloring(part)
    color = {v: i for i, c in enumerate(part.classes) for v in c}
    ok = len(S.base) == 14 and find_mono_triangle_bruteforce(S) is None and not _has_mono_triangle(14, color)
    for c in range(3):
        S15 = schur_coloring(extend_partition(part, 14, c), validate=False)
        ok &= len(S15.base) == 15 and find_mono_triangle_bruteforce(S15) is not None
        ok &= _has_mono_triangle(15, {**color, 14: c})
    return ok, "14 points triangle-free, 3/3 extensions to 15 contain one", 1


def check_5():
    B = blowup(schur_search(3, mode="maximize").partition, 2)
    rep = verify_blowup(B)
    inv = verify_translation_invariance(B, None, [1, 7, -3] + list(B.C_schedule))
    ok = (len(B.points) == 196 and len(B.relations) == 6 and rep["covered"] and rep["triangle_free"]
          and rep["exhaustive"] and inv["invariant"] and inv["exhaustive"])
    return ok, "%d points, %d relations, %d invariance checks" % (len(B.points), len(B.relations), inv["checks"]), 30


def check_6():
    ok, c1s, worst = True, [], 0.0
    for seed in range(20):
        rng = random.Random(seed)
        polys = []
        while len(polys) < 100:
            p = random_poly(rng, 1, rng.randint(1, 4), 10)
            if p.degree >= 1:
                polys.append(p)
        lines = [Poly.linear([rng.randint(-50, 50) or 1, rng.randint(-50, 50)], rng.randint(-50, 50)) for _ in range(100)]
        for surfaces in (polys, lines):
            for r in (2, 5, 10):
                K = build_cutting(surfaces, r, seed=seed)
                rep = verify_cutting(surfaces, K, r=r)
                ok &= rep["ok"] and rep["max_crossings"] <= F(100, r)
                worst = max(worst, rep["max_crossings"] / (100 / r))
                c1s.append(rep["c1_min"])
    return ok, "120 cuttings, worst crossings/(m/r) = %.2f, max c1 = %.3g" % (worst, max(c1s)), 120


def check_7():
    rng = random.Random(7)
    pts = set()
    while len(pts) < 2000:
        pts.add((F(rng.randint(0, 10 ** 6), 10 ** 6), F(rng.randint(0, 10 ** 6), 10 ** 6)))
    P = PointSet(2, tuple(sorted(pts)))
    lines = []
    for _ in range(200):
        x1, y1, x2, y2 = [F(rng.randint(0, 1000), 1000) for _ in range(4)]
        if (x1, y1) == (x2, y2):
            x2 += F(1, 1000)
        lines.append(Poly.linear([y2 - y1, x1 - x2], x2 * y1 - x1 * y2))
    ell = 32
    res = partition_low_crossing(P, lines, ell, seed=3, c2=8)
    floor = len(P) // (4 * ell)
    members = [i for part in res.parts for i in part]
    contained = all(c.contains(P[i]) for part, c in zip(res.parts, res.cells) for i in part)
    profile = {j: sum(bool(crosses(g, c)) for c in res.cells) for j, g in enumerate(lines)}
    ok = (len(res.parts) == ell and min(map(len, res.parts)) >= floor == 15 and len(set(members)) == len(members)
          and contained and profile == dict(res.crossing_profile))
    c2 = max(profile.values()) / ell ** 0.75
    ok &= c2 <= 8 and abs(c2 - res.params["c2_min"]) < 1e-9
    return ok, "min part %d >= %d, max crossings %d, c2 = %.3f" % (min(map(len, res.parts)), floor, max(profile.values()), c2), 120


def _transitive_instance(seed):
    rng = random.Random(seed)
    P = PointSet.from_values(sorted({F(rng.randint(0, 4000), 1000) for _ in range(64)}))
    return P, [distance_at_least(1), distance_at_most(F(1, 2))]


def _transitive_in_order(R, P, order) -> bool:
    pts = [P[i] for i in order]
    inside = {(a, b): tuple_in_relation(R, [pts[a], pts[b]]) for a, b in itertools.permutations(range(len(pts)), 2)}
    return all(inside[a, c] for a, b, c in itertools.combinations(range(len(pts)), 3) if inside[a, b] and inside[b, c])


def check_8():
    ok, sizes = True, []
    for seed in range(50):
        P, rels = _transitive_instance(seed)
        V = transitive_subset(P, rels, seed=seed)
        sizes.append(len(V))
        ok &= len(V) >= 1 and all(_transitive_in_order(R, P, V.order) for R in rels)
    return ok, "50 instances, output sizes %d..%d" % (min(sizes), max(sizes)), 60


def check_9():
    ok, sizes = True, []
    for seed in range(50):
        P, rels = _transitive_instance(seed)
        omegas = [clique_number(R, P) for R in rels]
        out = empty_in_all(P, rels, omegas, seed=seed)
        sizes.append(len(out))
        ok &= len(out) >= 1 and not any(tuple_in_relation(R, [P[i], P[j]]) for R in rels for i, j in itertools.combinations(out, 2))
    return ok, "50 instances, output sizes %d..%d" % (min(sizes), max(sizes)), 60


def check_10():
    E = sum_at_least(0)
    successes, ok = 0, True
    for seed in range(50):
        P = generate_instance("symmetric N=60", seed).points
        H = homogeneous_parts(P, E, 3, 3, seed=seed, max_retries=64)
        if H.ok:
            rep = classify_triples(H.parts, E, P)
            good = not rep["bad"] and not rep["mixed"] and len(H.parts) == 3 and all(len(p) == 3 for p in H.parts)
            cross = {tuple_in_relation(E, [P[i] for i in sorted(t)]) for t in itertools.product(*H.parts)}
            good &= len(cross) == 1
            ok &= good
            successes += 1
        else:
            ok &= H.verdict == "refused"
    ok &= successes >= 45
    return ok, "%d/50 successes, every success rechecked" % successes, None


def check_11():
    C = collinearity()
    G = PointSet(2, tuple((i, j) for i in range(5) for j in range(5)))
    out = extract_independent(G, C, 4)
    ok = len(out) >= 4 and not any(tuple_in_relation(C, [G[i] for i in t]) for t in itertools.combinations(out, 3))
    ratios = []
    for seed in range(30):
        P = no_four_collinear(seed)
        out = extract_independent(P, C, 4, seed=seed)
        free = not any(turn(P[a], P[b], P[c]) == 0 for a, b, c in itertools.combinations(out, 3))
        opt = len(max_independent(C, P.subset(range(20))))
        ok &= free and 2 * len(out) >= opt
        ratios.append(opt / len(out))
    return ok, "grid size >= 4, worst optimum/output ratio %.2f over 30 sets" % max(ratios), 600


def check_12():
    ok, found = True, 0
    for seed in range(100):
        rng = random.Random(seed)
        N, m = rng.randint(4, 60), rng.randint(1, 3)
        inst = generate_instance({"kind": "intervals", "N": N, "m": m}, seed)
        S = RelationSystem(inst.points, tuple(inst.relations))
        fast = find_mono_triangle(S, MonoConfig(), seed)
        slow = find_mono_triangle_bruteforce(S)
        ok &= (fast is None) == (slow is None)
        if fast is not None:
            (i, j, k), c = fast
            R = inst.relations[c]
            ok &= all(tuple_in_relation(R, [S.base[a], S.base[b]]) for a, b in ((i, j), (i, k), (j, k)))
            found += 1
    return ok, "100 systems, %d with a triangle, all agree" % found, 120


def check_13():
    ok = True
    for s in range(2, 5):
        for n in range(2, 5):
            H = family_from_sequence(es_extremal_sequence(s, n))
            res = osh_extract(H, s, n)
            ok &= len(H) == (s - 1) * (n - 1) and isinstance(res, NotFound) and res.exhaustive
    rng = random.Random(13)
    verified = 0
    for k in range(500):
        s, n = rng.randint(2, 4), rng.randint(2, 4)
        H = random_line_family(rng, (s - 1) * (n - 1) + 1)
        res = osh_extract(H, s, n)
        good = bool(res) and len(res.indices) == (s if res.side == "above" else n)
        if good:
            for a, b in itertools.combinations(res.indices, 2):
                y = solve2(H.planes[a], H.planes[b])[1]
                good &= (y > 0) if res.side == "above" else (y < 0)
        ok &= good
        verified += good
    return ok, "9 extremal families certified, %d/500 random families verified" % verified, 120


def check_14():
    ok, worst = True, 0.0
    for seed in range(50):
        rng = random.Random(seed)
        d = 1 + seed % 2
        m, t = rng.randint(d, 12), rng.randint(1, 3)
        polys = [random_poly(rng, d, t, 5) for _ in range(m)]
        # samples k/D are read in the integer frame X = D x, where signs are unchanged
        if d == 1:
            D, xs = 64, [(k,) for k in range(-640, 641)]
        else:
            D, xs = 8, [(a, b) for a in range(-48, 49) for b in range(-48, 49)]
        framed_polys = [rescale_poly(p, D) for p in polys]
        patterns = {sign_vector(framed_polys, x) for x in xs}
        bound = milnor_thom_bound(m, d, t)
        ok &= len(patterns) <= bound
        worst = max(worst, len(patterns) / bound)
    return ok, "50 ensembles, worst observed/bound = %.4f" % worst, 60


CRITERIA = [
    (1, "ES tightness", check_1),
    (2, "cups-caps tightness", check_2),
    (3, "Schur anchors", check_3),
    (4, "Schur-to-Ramsey witness", check_4),
    (5, "blow-up construction", check_5),
    (6, "cutting postcondition", check_6),
    (7, "partitioner postcondition", check_7),
    (8, "transitive extraction", check_8),
    (9, "empty in all relations", check_9),
    (10, "homogeneous parts", check_10),
    (11, "independent-set extractor", check_11),
    (12, "mono-triangle equivalence", check_12),
    (13, "one-sided hyperplanes identity", check_13),
    (14, "sign-pattern ceiling", check_14),
]


def run_criterion(fn):
    t0 = time.perf_counter()
    ok, detail, limit = fn()
    elapsed = time.perf_counter() - t0
    in_time = limit is None or elapsed < limit
    return bool(ok) and in_time, "%s (%.1fs%s)" % (detail, elapsed, "" if limit is None else " of %ds" % limit)


def report_line(num, name, passed, detail):
    return "criterion %2d %-32s %s  %s" % (num, name, "PASS" if passed else "FAIL", detail)


@pytest.mark.slow
@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=["c%02d" % c[0] for c in CRITERIA])
def test_criterion(num, name, fn, capsys):
    passed, detail = run_criterion(fn)
    with capsys.disabled():
        print("\n" + report_line(num, name, passed, detail))
    assert passed, detail


if __name__ == "__main__":
    failures = 0
    for num, name, fn in CRITERIA:
        passed, detail = run_criterion(fn)
        failures += not passed
        print(report_line(num, name, passed, detail), flush=True)
    sys.exit(1 if failures else 0)
