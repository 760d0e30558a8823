import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiramsey.algebra import (
    AlgebraError,
    Poly,
    count_roots,
    eval_poly,
    float_sign,
    format_poly,
    isolate_real_roots,
    milnor_thom_bound,
    parse_poly,
    random_poly,
    sign,
    sign_vector,
    sturm_chain,
    sturm_variations,
    substitute_block,
    squarefree,
    coefficients,
)

from conftest import rationals

x = Poly.var(0, 1)
x1, x2 = Poly.var(0, 2), Poly.var(1, 2)


def test_eval_examples():
    assert eval_poly(x * x - 2, [F(3, 2)]) == F(1, 4)
    assert eval_poly(Poly(1), [F(7)]) == 0
    assert eval_poly(x1 * x2 + 1, [2, F(-1, 2)]) == 0


def test_sign_vector_examples():
    assert sign_vector([x, x - 1], [F(1, 2)]) == (1, -1)
    assert sign_vector([x * x + 1], [F(-5, 3)]) == (1,)
    assert sign_vector([x - 1, x - 2, x - 3], [2]) == (1, 0, -1)


def test_substitute_block_examples():
    assert substitute_block(x1 * x2 - 1, [2]) == Poly.linear([2], -1)
    assert substitute_block(x1 * x1, [3]).constant_value() == 9
    y = [Poly.var(i, 3) for i in range(3)]
    assert substitute_block(y[0] + y[1] + y[2], [1, -1]) == Poly.var(0, 1)


def test_isolate_sqrt2():
    roots = isolate_real_roots(x * x - 2)
    assert len(roots) == 2
    for lo, hi in roots.intervals:
        assert lo * lo < 2 < hi * hi or (lo < 0 and lo * lo > 2 > hi * hi)
    assert all(float(r) ** 2 == pytest.approx(2) for r in roots)


def test_isolate_pins_rational_roots():
    p = (x - 1) * (x - 2) * (x - 3)
    assert sorted(isolate_real_roots(p).exact_roots) == [1, 2, 3]
    assert len(isolate_real_roots(x * x + 1)) == 0


def test_degree_cap_refuses():
    with pytest.raises(AlgebraError):
        isolate_real_roots(x ** 9 - 1)


def test_milnor_thom_examples():
    assert milnor_thom_bound(1, 1, 1) == 50
    assert milnor_thom_bound(2, 1, 1) == 100
    # (50 * 4 * 3 / 2)^2 computed by hand
    assert milnor_thom_bound(4, 2, 3) == 300 ** 2


def test_poly_text_round_trip():
    p = x1 * x1 * F(3, 4) - x2 + F(-1, 7)
    assert parse_poly(format_poly(p), 2) == p


coef = st.integers(-6, 6)


@given(st.lists(coef, min_size=1, max_size=6), rationals)
def test_exact_matches_float_when_certain(cs, v):
    p = Poly.univariate(cs)
    s = float_sign(p, [v])
    if s is not None:
        assert s == sign(eval_poly(p, [v]))


@settings(max_examples=150, deadline=None)
@given(st.lists(coef, min_size=2, max_size=7).filter(lambda c: any(c[1:])))
def test_root_intervals_are_isolating(cs):
    p = Poly.univariate(cs)
    roots = isolate_real_roots(p)
    sq = squarefree(coefficients(p))
    chain = sturm_chain(sq)
    ivs = sorted(roots.intervals)
    for (lo, hi), r in zip(ivs, sorted(roots, key=float)):
        if r.is_rational:
            assert eval_poly(p, [r.value]) == 0
        else:
            assert sturm_variations(chain, lo) - sturm_variations(chain, hi) == 1
    for (a, b), (c, d) in zip(ivs, ivs[1:]):
        assert b < c
    # independent count from numpy at a comfortable separation
    numeric = [z.real for z in np.roots(list(reversed(sq))) if abs(z.imag) < 1e-9]
    assert len(roots) == len(numeric)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 3), st.integers(1, 6))
def test_sign_patterns_below_ceiling(seed, d, t, extra):
    rng = random.Random(seed)
    m = d + extra
    polys = [random_poly(rng, d, t, 4) for _ in range(m)]
    pts = [tuple(F(rng.randint(-300, 300), 50) for _ in range(d)) for _ in range(300)]
    assert len({sign_vector(polys, q) for q in pts}) <= milnor_thom_bound(m, d, t)


@given(st.lists(coef, min_size=1, max_size=5), st.lists(coef, min_size=1, max_size=5), rationals)
def test_ring_operations_evaluate_pointwise(a, b, v):
    p, q = Poly.univariate(a), Poly.univariate(b)
    assert eval_poly(p * q, [v]) == eval_poly(p, [v]) * eval_poly(q, [v])
    assert eval_poly(p - q, [v]) == eval_poly(p, [v]) - eval_poly(q, [v])


def test_count_roots_interval():
    chain = sturm_chain(coefficients((x - 1) * (x - 5)))
    assert count_roots(chain, 0, 2) == 1
    assert count_roots(chain, 2, 4) == 0
