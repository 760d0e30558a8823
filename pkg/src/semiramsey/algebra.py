"""Exact rational arithmetic, sparse polynomials, sign patterns and real roots.

Every coordinate and coefficient in the package is a ``fractions.Fraction``.
Polynomials are sparse maps from exponent tuples to nonzero rationals.  Hot
evaluation paths go through a compiled integer form of the polynomial so that
integer points never touch ``Fraction`` arithmetic at all.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import cmp_to_key
from itertools import product
from typing import Iterable, Sequence

Rat = Fraction

#: Univariate inputs above this degree are refused rather than processed slowly.
DEGREE_CAP = 8

_EPS = 2.0 ** -52


class AlgebraError(ValueError):
    """Contract violation inside the algebra core."""


def rat(value) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise AlgebraError("floats are not accepted as exact coordinates: %r" % value)
    return Fraction(value)


def sign(value) -> int:
    return (value > 0) - (value < 0)


# ---------------------------------------------------------------------------
# multivariate polynomials


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples of length ``num_vars`` to nonzero
    Fractions.  Instances are immutable and hashable.
    """

    __slots__ = ("num_vars", "terms", "_hash", "_compiled")

    def __init__(self, num_vars: int, terms: dict | None = None):
        if num_vars < 1:
            raise AlgebraError("num_vars must be positive")
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars or any(e < 0 for e in exps):
                raise AlgebraError("bad exponent vector %r for %d variables" % (exps, num_vars))
            coef = rat(coef)
            if coef:
                clean[exps] = clean.get(exps, 0) + coef
                if not clean[exps]:
                    del clean[exps]
        self.num_vars = num_vars
        self.terms = clean
        self._hash = None
        self._compiled = None

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, value, num_vars: int) -> "Poly":
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def var(cls, index: int, num_vars: int) -> "Poly":
        """The coordinate polynomial ``x_{index+1}`` (zero-based index)."""
        exps = [0] * num_vars
        exps[index] = 1
        return cls(num_vars, {tuple(exps): 1})

    @classmethod
    def linear(cls, coefs: Sequence, constant=0) -> "Poly":
        n = len(coefs)
        terms = {(0,) * n: constant}
        for i, c in enumerate(coefs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    @classmethod
    def univariate(cls, coefs: Sequence) -> "Poly":
        """From ascending coefficients ``[a0, a1, ...]``."""
        return cls(1, {(i,): c for i, c in enumerate(coefs)})

    # structure ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=0)

    def constant_value(self):
        """The value if this polynomial is constant, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            exps, coef = next(iter(self.terms.items()))
            if not any(exps):
                return coef
        return None

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return "Poly(%d, %s)" % (self.num_vars, format_poly(self))

    def __str__(self):
        return format_poly(self)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.num_vars != self.num_vars:
                raise AlgebraError("variable count mismatch %d vs %d" % (self.num_vars, other.num_vars))
            return other
        return Poly.const(other, self.num_vars)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Poly(self.num_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = rat(other)
            return Poly(self.num_vars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Poly(self.num_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Poly.const(1, self.num_vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, *x):
        if len(x) == 1 and isinstance(x[0], (list, tuple)):
            x = x[0]
        return eval_poly(self, x)

    # compiled evaluation ------------------------------------------------------
    def _compile(self):
        """Integer form: ``self = (1/den) * sum(c * x^e)`` with int ``c``."""
        if self._compiled is None:
            den = 1
            for c in self.terms.values():
                den = den * c.denominator // math.gcd(den, c.denominator)
            ints = [(int(c * den), e) for e, c in self.terms.items()]
            names = ["x%d" % i for i in range(self.num_vars)]

            def source(coefs):
                parts = []
                for c, (_, e) in zip(coefs, ints):
                    factors = [repr(c)]
                    for name, k in zip(names, e):
                        if k == 1:
                            factors.append(name)
                        elif k > 1:
                            factors.append("%s**%d" % (name, k))
                    parts.append("*".join(factors))
                return "lambda %s: %s" % (", ".join(names), " + ".join(parts) or "0")

            # sources are built from ints and variable names only
            fn = eval(source([c for c, _ in ints]), {})
            absfn = eval(source([abs(c) for c, _ in ints]), {})
            self._compiled = (den, fn, absfn, len(ints))
        return self._compiled

    def substitute(self, values: Sequence) -> "Poly":
        return substitute_block(self, values)


def eval_poly(p: Poly, x: Sequence) -> Fraction:
    """Exact value of ``p`` at the rational point ``x``."""
    if len(x) != p.num_vars:
        raise AlgebraError("point has %d coordinates, polynomial has %d variables" % (len(x), p.num_vars))
    if not p.terms:
        return Fraction(0)
    den, fn, _, _ = p._compile()
    return Fraction(fn(*x)) / den


def sign_at(p: Poly, x: Sequence) -> int:
    """Sign of ``p(x)``; integer points are evaluated in pure int arithmetic."""
    if len(x) != p.num_vars:
        raise AlgebraError("point has %d coordinates, polynomial has %d variables" % (len(x), p.num_vars))
    if not p.terms:
        return 0
    return sign(p._compile()[1](*x))


def float_sign(p: Poly, x: Sequence):
    """Floating-point sign with a forward error bound, or None if uncertain."""
    if not p.terms:
        return 0
    den, fn, absfn, nterms = p._compile()
    xf = [float(v) for v in x]
    value = fn(*xf)
    magnitude = absfn(*[abs(v) for v in xf])
    bound = 4.0 * (p.degree + nterms + 2) * _EPS * magnitude
    if value > bound:
        return 1
    if value < -bound:
        return -1
    return None


def sign_vector(polys: Sequence[Poly], x: Sequence) -> tuple:
    """Sign pattern of a polynomial family at ``x``."""
    return tuple(sign_at(p, x) for p in polys)


def substitute_block(p: Poly, values: Sequence) -> Poly:
    """Fix the leading ``len(values)`` variables of ``p`` to rationals."""
    k = len(values)
    if k > p.num_vars:
        raise AlgebraError("assignment of %d values to %d variables" % (k, p.num_vars))
    if k == p.num_vars:
        raise AlgebraError("substitution must leave at least one free variable")
    values = [rat(v) for v in values]
    terms: dict = {}
    for exps, coef in p.terms.items():
        c = coef
        for v, e in zip(values, exps[:k]):
            if e:
                c *= v ** e
        if c:
            rest = exps[k:]
            terms[rest] = terms.get(rest, 0) + c
    return Poly(p.num_vars - k, terms)


def substitute_vars(p: Poly, assignment: dict) -> Poly:
    """Fix an arbitrary set of variables ``{index: value}``; remaining keep order."""
    free = [i for i in range(p.num_vars) if i not in assignment]
    if not free:
        raise AlgebraError("substitution must leave at least one free variable")
    terms: dict = {}
    for exps, coef in p.terms.items():
        c = coef
        for i, v in assignment.items():
            if exps[i]:
                c *= rat(v) ** exps[i]
        if c:
            rest = tuple(exps[i] for i in free)
            terms[rest] = terms.get(rest, 0) + c
    return Poly(len(free), terms)


def embed(p: Poly, num_vars: int, mapping: Sequence[int]) -> Poly:
    """Rename variable ``i`` of ``p`` to variable ``mapping[i]`` of a larger ring."""
    terms = {}
    for exps, coef in p.terms.items():
        e = [0] * num_vars
        for i, k in enumerate(exps):
            e[mapping[i]] += k
        terms[tuple(e)] = coef
    return Poly(num_vars, terms)


def determinant(rows: Sequence[Sequence[Poly]]) -> Poly:
    """Leibniz determinant of a square matrix of polynomials."""
    n = len(rows)
    from itertools import permutations

    total = None
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = rows[0][perm[0]]
        for i in range(1, n):
            term = term * rows[i][perm[i]]
        if inversions % 2:
            term = -term
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------------------
# text format

_TERM_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def format_poly(p: Poly) -> str:
    """``c * x1^e1 * ... * xv^ev`` terms joined by `` + ``; ``0`` for zero."""
    if not p.terms:
        return "0"
    order = sorted(p.terms, key=lambda e: (-sum(e), tuple(-k for k in e)))
    out = []
    for exps in order:
        factors = [str(p.terms[exps])]
        for i, k in enumerate(exps):
            if k == 1:
                factors.append("x%d" % (i + 1))
            elif k > 1:
                factors.append("x%d^%d" % (i + 1, k))
        out.append(" * ".join(factors))
    return " + ".join(out)


def parse_poly(text: str, num_vars: int) -> Poly:
    """Inverse of :func:`format_poly`; also accepts `` - `` between terms."""
    src = text.strip()
    if not src:
        raise AlgebraError("empty polynomial text")
    src = re.sub(r"(?<=[\w)])\s+-\s+", " + -", src)
    terms: dict = {}
    for chunk in src.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise AlgebraError("malformed polynomial %r" % text)
        coef = Fraction(1)
        exps = [0] * num_vars
        for factor in (f.strip() for f in chunk.split("*")):
            neg = False
            while factor.startswith("-") and not re.match(r"^-\d", factor):
                neg = not neg
                factor = factor[1:].strip()
            m = _TERM_RE.match(factor)
            if m:
                idx = int(m.group(1)) - 1
                if not 0 <= idx < num_vars:
                    raise AlgebraError("variable x%d out of range" % (idx + 1))
                exps[idx] += int(m.group(2) or 1)
            else:
                try:
                    coef *= Fraction(factor)
                except (ValueError, ZeroDivisionError) as exc:
                    raise AlgebraError("bad factor %r in %r" % (factor, text)) from exc
            if neg:
                coef = -coef
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coef
    return Poly(num_vars, terms)


# ---------------------------------------------------------------------------
# univariate helpers on ascending coefficient lists


def _trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def coefficients(p: Poly) -> list:
    """Ascending Fraction coefficients of a univariate Poly."""
    if p.num_vars != 1:
        raise AlgebraError("expected a univariate polynomial, got %d variables" % p.num_vars)
    c = [Fraction(0)] * (p.degree + 1)
    for (e,), v in p.terms.items():
        c[e] = v
    return _trim(c)


def _ueval(c: Sequence, x):
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _deriv(c: Sequence) -> list:
    return [i * c[i] for i in range(1, len(c))]


def _divmod(a: Sequence, b: Sequence):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        f = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = f
        for i, v in enumerate(b):
            a[i + shift] -= f * v
        a.pop()
        _trim(a)
    return _trim(q), a


def _primitive(c: Sequence) -> list:
    """Scale by a positive rational so coefficients are coprime integers."""
    if not c:
        return []
    den = 1
    for v in c:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in c]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [Fraction(v // g) for v in ints]


def _gcd(a: Sequence, b: Sequence) -> list:
    a, b = _primitive(list(a)), _primitive(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, _primitive(r)
    return _primitive(a)


def squarefree(c: Sequence) -> list:
    c = _trim(list(c))
    if len(c) <= 2:
        return _primitive(c)
    g = _gcd(c, _deriv(c))
    if len(g) <= 1:
        return _primitive(c)
    q, _ = _divmod(c, g)
    return _primitive(q)


def sturm_chain(c: Sequence) -> list:
    """Sturm sequence of a squarefree polynomial, content removed at each step."""
    chain = [_primitive(list(c))]
    d = _deriv(chain[0])
    if d:
        chain.append(_primitive(d))
    while len(chain[-1]) > 1:
        _, r = _divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_primitive([-v for v in r]))
    return chain


def _variations(signs: Iterable[int]) -> int:
    count, last = 0, 0
    for s in signs:
        if s:
            if last and s != last:
                count += 1
            last = s
    return count


def sturm_variations(chain: Sequence, x) -> int:
    """Sign variations of the chain at a rational ``x`` or at ``±inf`` (``None`` ends)."""
    if x == "+inf":
        return _variations(sign(p[-1]) for p in chain)
    if x == "-inf":
        return _variations(sign(p[-1]) * (-1) ** (len(p) - 1) for p in chain)
    return _variations(sign(_ueval(p, x)) for p in chain)


def count_roots(chain: Sequence, lo, hi) -> int:
    """Distinct real roots in ``(lo, hi]``; use ``"-inf"``/``"+inf"`` for open ends."""
    return sturm_variations(chain, lo) - sturm_variations(chain, hi)


def cauchy_bound(c: Sequence) -> Fraction:
    lead = abs(c[-1])
    return 1 + max(abs(v) for v in c[:-1]) / lead if len(c) > 1 else Fraction(1)


# ---------------------------------------------------------------------------
# real roots


class RealRoot:
    """A real algebraic number: exact rational, or an isolating interval.

    In the interval case the root is the unique root of the squarefree
    polynomial ``poly`` (ascending coefficients) in the open interval
    ``(lo, hi)``; neither endpoint is a root.
    """

    __slots__ = ("value", "poly", "chain", "lo", "hi")

    def __init__(self, value=None, poly=None, chain=None, lo=None, hi=None):
        self.value = value
        self.poly = poly
        self.chain = chain
        self.lo = lo
        self.hi = hi

    @property
    def is_rational(self) -> bool:
        return self.value is not None

    def bounds(self):
        if self.value is not None:
            return self.value, self.value
        return self.lo, self.hi

    def refine(self):
        if self.value is not None:
            return
        mid = (self.lo + self.hi) / 2
        s = sign(_ueval(self.poly, mid))
        if s == 0:
            self.value = mid
            self.lo = self.hi = mid
            return
        if s == sign(_ueval(self.poly, self.lo)):
            self.lo = mid
        else:
            self.hi = mid

    def cmp_rational(self, x) -> int:
        """-1, 0, +1 as the root is below, equal to, or above rational ``x``."""
        if self.value is not None:
            return sign(self.value - x)
        if x <= self.lo:
            return 1
        if x >= self.hi:
            return -1
        s = sign(_ueval(self.poly, x))
        if s == 0:
            return 0
        return 1 if s == sign(_ueval(self.poly, self.lo)) else -1

    def __float__(self):
        lo, hi = self.bounds()
        for _ in range(80):
            if hi - lo <= 1e-17 * (1 + abs(lo)):
                break
            self.refine()
            lo, hi = self.bounds()
        return float((lo + hi) / 2)

    def __repr__(self):
        if self.value is not None:
            return "RealRoot(%s)" % self.value
        return "RealRoot(in (%s, %s))" % (self.lo, self.hi)


def compare_roots(a: RealRoot, b: RealRoot) -> int:
    """Exact three-way comparison of two real algebraic numbers."""
    if a.value is not None:
        return -b.cmp_rational(a.value)
    if b.value is not None:
        return a.cmp_rational(b.value)
    shared = None
    while True:
        if a.value is not None or b.value is not None:
            return compare_roots(a, b)
        if a.hi <= b.lo:
            return -1
        if b.hi <= a.lo:
            return 1
        if shared is None:
            shared = squarefree(_gcd(a.poly, b.poly))
        if len(shared) > 1:
            lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
            chain = sturm_chain(shared)
            inside = count_roots(chain, lo, hi) - (1 if _ueval(shared, hi) == 0 else 0)
            if inside:
                return 0
        a.refine()
        b.refine()


root_key = cmp_to_key(compare_roots)


class RootIntervals:
    """Disjoint closed isolating intervals, one per distinct real root."""

    def __init__(self, roots: list, poly: list):
        self.roots = roots
        self.poly = poly

    @property
    def intervals(self) -> list:
        return [r.bounds() for r in self.roots]

    @property
    def exact_roots(self) -> list:
        return [r.value for r in self.roots if r.value is not None]

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __repr__(self):
        return "RootIntervals(%r)" % self.intervals


def _isqrt_exact(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _rational_sqrt(q: Fraction):
    a, b = _isqrt_exact(q.numerator), _isqrt_exact(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def real_roots(c: Sequence, degree_cap: int = DEGREE_CAP) -> list:
    """Sorted RealRoots of the univariate polynomial with ascending coefficients ``c``."""
    c = _trim([rat(v) for v in c])
    if not c:
        raise AlgebraError("the zero polynomial has every real number as a root")
    deg = len(c) - 1
    if deg > degree_cap:
        raise AlgebraError("degree %d exceeds the configured cap %d" % (deg, degree_cap))
    if deg == 0:
        return []
    if deg == 1:
        return [RealRoot(value=-c[0] / c[1])]
    if deg == 2:
        a, b, k = c[2], c[1], c[0]
        disc = b * b - 4 * a * k
        if disc < 0:
            return []
        if disc == 0:
            return [RealRoot(value=-b / (2 * a))]
        s = _rational_sqrt(disc)
        if s is not None:
            r1, r2 = (-b - s) / (2 * a), (-b + s) / (2 * a)
            return [RealRoot(value=min(r1, r2)), RealRoot(value=max(r1, r2))]
    sq = squarefree(c)
    chain = sturm_chain(sq)
    bound = cauchy_bound(sq)
    found = []
    _isolate(sq, chain, -bound, bound, found)
    found.sort(key=root_key)
    _separate(found)
    _pin_rationals(sq, found)
    return found


def _open_count(sq, chain, lo, hi) -> int:
    """Distinct roots strictly inside ``(lo, hi)``."""
    return count_roots(chain, lo, hi) - (1 if _ueval(sq, hi) == 0 else 0)


def _isolate(sq, chain, lo, hi, out):
    count = _open_count(sq, chain, lo, hi)
    if count == 0:
        return
    if count == 1 and _ueval(sq, lo) != 0 and _ueval(sq, hi) != 0:
        out.append(RealRoot(poly=sq, chain=chain, lo=lo, hi=hi))
        return
    mid = (lo + hi) / 2
    if _ueval(sq, mid) == 0:
        out.append(RealRoot(value=mid))
    _isolate(sq, chain, lo, mid, out)
    _isolate(sq, chain, mid, hi, out)


def _separate(roots):
    # make closed intervals pairwise disjoint
    changed = True
    while changed:
        changed = False
        for a, b in zip(roots, roots[1:]):
            if a.bounds()[1] >= b.bounds()[0]:
                a.refine()
                b.refine()
                changed = True


def _pin_rationals(sq, roots, max_lead: int = 10 ** 6):
    lead = abs(int(sq[-1]))
    if lead > max_lead:
        return
    target = Fraction(1, 2 * lead * lead)
    for r in roots:
        if r.value is not None:
            continue
        while r.value is None and r.hi - r.lo >= target:
            r.refine()
        if r.value is not None:
            continue
        guess = ((r.lo + r.hi) / 2).limit_denominator(lead)
        if r.lo < guess < r.hi and _ueval(sq, guess) == 0:
            r.value = guess
            r.lo = r.hi = guess


def isolate_real_roots(p: Poly, degree_cap: int = DEGREE_CAP) -> RootIntervals:
    """Isolate the distinct real roots of a univariate Poly by Sturm sequences."""
    c = coefficients(p)
    if not c:
        raise AlgebraError("the zero polynomial has every real number as a root")
    return RootIntervals(real_roots(c, degree_cap), squarefree(c))


def poly_real_roots(p: Poly, degree_cap: int = DEGREE_CAP) -> list:
    return real_roots(coefficients(p), degree_cap)


# ---------------------------------------------------------------------------
# counting bound


def milnor_thom_bound(m: int, d: int, t: int) -> int:
    """``ceil((50 m t / d)^d)``: sign-pattern ceiling for m polys of degree t in d vars."""
    if not (m >= d >= 1):
        raise AlgebraError("the bound needs m >= d >= 1 (got m=%d, d=%d)" % (m, d))
    if t < 1:
        raise AlgebraError("degree bound t must be >= 1")
    value = Fraction(50 * m * t, d) ** d
    return math.ceil(value)


def random_poly(rng, num_vars: int, degree: int, coef_range: int = 5) -> Poly:
    """Dense random polynomial with integer coefficients; never identically zero."""
    terms = {}
    for exps in product(range(degree + 1), repeat=num_vars):
        if sum(exps) <= degree:
            terms[exps] = rng.randint(-coef_range, coef_range)
    p = Poly(num_vars, terms)
    if p.is_zero():
        return Poly.const(1, num_vars)
    return p
