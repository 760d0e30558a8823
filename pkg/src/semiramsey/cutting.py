"""Cuttings: decompositions of the line or the plane into cells crossed by few surfaces.

A surface ``Z`` crosses a cell when it meets the cell without containing it.
Cells are half-open so that they tile space exactly:

========================  ==============================================
kind                      point set
========================  ==============================================
``interval-1d``           ``lo <= x < hi`` (closedness stored per end)
``trapezoid-2d``          ``xl <= x < xr`` and ``B(x) <= y < T(x)``
``box-2d``                ``x0 <= x < x1`` and ``y0 <= y < y1``
``box-2d`` (outer)        complement of the bounding box
========================  ==============================================

Three backends build cuttings: ``1d`` (exact, any degree up to the cap),
``2d-linear`` (exact, lines only, random sampling plus a trapezoidal map)
and ``2d-subdivision`` (conservative quadtree for curves of any degree).
"""

from __future__ import annotations

import bisect
import json
import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Sequence

import numpy as np

from .algebra import (
    _EPS,
    DEGREE_CAP,
    Poly,
    RealRoot,
    _ueval,
    coefficients,
    compare_roots,
    count_roots,
    float_sign,
    format_poly,
    parse_poly,
    rat,
    real_roots,
    sign,
    sign_at,
    squarefree,
    sturm_chain,
)

BACKENDS = ("1d", "2d-linear", "2d-subdivision")
_KIND = {"1d": "interval-1d", "2d-linear": "trapezoid-2d", "2d-subdivision": "box-2d"}


class UnsupportedBackend(ValueError):
    pass


class CuttingFailure(RuntimeError):
    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


@dataclass
class Surface:
    poly: Poly
    id: object
    weight_exp: int = 0

    @property
    def weight(self) -> int:
        return 1 << self.weight_exp

    @property
    def dim(self) -> int:
        return self.poly.num_vars


def as_surfaces(items) -> list:
    out = []
    for i, s in enumerate(items):
        out.append(s if isinstance(s, Surface) else Surface(s, i))
    return out


def _usable(surfaces) -> list:
    keep = []
    for s in surfaces:
        if s.poly.is_zero():
            warnings.warn("surface %r is identically zero and contains every cell; excluded" % (s.id,))
            continue
        keep.append(s)
    return keep


# ---------------------------------------------------------------------------
# cell geometry


def _cmp_to(x, e) -> int:
    """sign(x - e) for rational x and an endpoint that may be a RealRoot."""
    if isinstance(e, RealRoot):
        return -e.cmp_rational(x)
    return sign(x - e)


def _same_point(a, b) -> bool:
    if isinstance(a, RealRoot) or isinstance(b, RealRoot):
        ra = a if isinstance(a, RealRoot) else RealRoot(value=a)
        rb = b if isinstance(b, RealRoot) else RealRoot(value=b)
        return compare_roots(ra, rb) == 0
    return a == b


@dataclass(frozen=True)
class Interval:
    lo: object = None
    hi: object = None
    lo_closed: bool = True
    hi_closed: bool = False

    kind = "interval-1d"

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.hi is not None and _same_point(self.lo, self.hi)

    def contains(self, p) -> bool:
        x = p[0] if isinstance(p, (tuple, list)) else p
        if self.lo is not None:
            c = _cmp_to(x, self.lo)
            if c < 0 or (c == 0 and not self.lo_closed):
                return False
        if self.hi is not None:
            c = _cmp_to(x, self.hi)
            if c > 0 or (c == 0 and not self.hi_closed):
                return False
        return True


class Line:
    """Non-vertical line ``y = m x + k`` with a cached integer form ``(M x + K) / D``."""

    __slots__ = ("m", "k", "M", "K", "D", "_h")

    def __init__(self, m, k):
        self.m, self.k = rat(m), rat(k)
        D = self.m.denominator * self.k.denominator // math.gcd(self.m.denominator, self.k.denominator)
        self.M, self.K, self.D = int(self.m * D), int(self.k * D), D
        self._h = hash((self.M, self.K, self.D))

    def __getitem__(self, i):
        return (self.m, self.k)[i]

    def __iter__(self):
        return iter((self.m, self.k))

    def __eq__(self, other):
        if isinstance(other, Line):
            return (self.M, self.K, self.D) == (other.M, other.K, other.D)
        return NotImplemented

    def __lt__(self, other):
        return (self.m, self.k) < (other.m, other.k)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "Line(%s, %s)" % (self.m, self.k)


@dataclass(frozen=True)
class Trapezoid:
    """Bottom and top are Lines (or ``(slope, intercept)`` pairs); None means unbounded."""

    xl: object = None
    xr: object = None
    bottom: tuple | None = None
    top: tuple | None = None

    kind = "trapezoid-2d"

    def contains(self, p) -> bool:
        x, y = p
        if self.xl is not None and x < self.xl:
            return False
        if self.xr is not None and x >= self.xr:
            return False
        if self.bottom is not None and y < self.bottom[0] * x + self.bottom[1]:
            return False
        if self.top is not None and y >= self.top[0] * x + self.top[1]:
            return False
        return True


@dataclass(frozen=True)
class Box:
    x0: Fraction
    x1: Fraction
    y0: Fraction
    y1: Fraction
    outer: bool = False

    kind = "box-2d"

    def contains(self, p) -> bool:
        x, y = p
        inside = self.x0 <= x < self.x1 and self.y0 <= y < self.y1
        return inside != self.outer


@dataclass
class Cell:
    geometry: object
    id: int

    @property
    def kind(self) -> str:
        return self.geometry.kind

    def contains(self, p) -> bool:
        return self.geometry.contains(p)


@dataclass
class Cutting:
    cells: list
    crossing: list
    params: dict = field(default_factory=dict)
    _index: object = field(default=None, repr=False, compare=False)

    def locate(self, point) -> int:
        """Position of the cell containing ``point``."""
        if self._index is None:
            self._index = _make_index(self)
        return self._index(point)

    def bounded_positions(self) -> list:
        """Cells subject to the crossing bound (everything except an outer box)."""
        return [i for i, c in enumerate(self.cells) if not getattr(c.geometry, "outer", False)]


# ---------------------------------------------------------------------------
# exact crossing tests


def _line_abc(poly: Poly):
    if poly.num_vars != 2 or poly.degree > 1:
        raise UnsupportedBackend("trapezoid cells support linear surfaces in the plane only")
    t = poly.terms
    return t.get((1, 0), Fraction(0)), t.get((0, 1), Fraction(0)), t.get((0, 0), Fraction(0))


def _interval_crosses(poly: Poly, iv: Interval, chain_cache=None) -> bool:
    if poly.num_vars != 1:
        raise UnsupportedBackend("interval cells need univariate surfaces")
    if iv.is_point:
        return False  # a surface through a single point contains that cell
    c = coefficients(poly)
    if len(c) <= 1:
        return False
    ends = (iv.lo, iv.hi)
    if any(isinstance(e, RealRoot) for e in ends):
        return any(_interval_has_root(iv, root) for root in real_roots(c))
    if chain_cache is not None and poly in chain_cache:
        sq, chain = chain_cache[poly]
    else:
        sq = squarefree(c)
        chain = sturm_chain(sq)
        if chain_cache is not None:
            chain_cache[poly] = (sq, chain)
    lo = "-inf" if iv.lo is None else iv.lo
    hi = "+inf" if iv.hi is None else iv.hi
    n = count_roots(chain, lo, hi)
    if iv.hi is not None and not iv.hi_closed and _ueval(sq, iv.hi) == 0:
        n -= 1
    if iv.lo is not None and iv.lo_closed and _ueval(sq, iv.lo) == 0:
        n += 1
    return n > 0


def _cmp_root(r: RealRoot, e) -> int:
    if isinstance(e, RealRoot):
        return compare_roots(r, e)
    return r.cmp_rational(e)


def _interval_has_root(iv: Interval, r: RealRoot) -> bool:
    if iv.lo is not None:
        c = _cmp_root(r, iv.lo)
        if c < 0 or (c == 0 and not iv.lo_closed):
            return False
    if iv.hi is not None:
        c = _cmp_root(r, iv.hi)
        if c > 0 or (c == 0 and not iv.hi_closed):
            return False
    return True


def _trapezoid_crosses(abc, tz: Trapezoid) -> bool:
    """Exact: is there an x in [xl, xr) with B(x) <= L(x) < T(x)?"""
    a, b, c = abc
    if a == 0 and b == 0:
        return False
    if b == 0:
        x0 = -c / a
        if (tz.xl is not None and x0 < tz.xl) or (tz.xr is not None and x0 >= tz.xr):
            return False
        if tz.bottom is None or tz.top is None:
            return True
        return tz.bottom[0] * x0 + tz.bottom[1] < tz.top[0] * x0 + tz.top[1]
    m, k = -a / b, -c / b
    lowers, uppers = [], []
    if tz.xl is not None:
        lowers.append((tz.xl, True))
    if tz.xr is not None:
        uppers.append((tz.xr, False))
    if tz.bottom is not None:
        al, be = m - tz.bottom[0], k - tz.bottom[1]
        if al > 0:
            lowers.append((-be / al, True))
        elif al < 0:
            uppers.append((-be / al, True))
        elif be < 0:
            return False
    if tz.top is not None:
        al, be = tz.top[0] - m, tz.top[1] - k
        if al > 0:
            lowers.append((-be / al, False))
        elif al < 0:
            uppers.append((-be / al, False))
        elif be <= 0:
            return False
    for lv, lc in lowers:
        for uv, uc in uppers:
            if lv > uv or (lv == uv and not (lc and uc)):
                return False
    return True


def _pow_range(lo, hi, e):
    if e == 0:
        return Fraction(1), Fraction(1)
    if e % 2 or lo >= 0:
        return lo ** e, hi ** e
    if hi <= 0:
        return hi ** e, lo ** e
    return Fraction(0), max(lo ** e, hi ** e)


def poly_range(poly: Poly, ranges) -> tuple:
    """Interval-arithmetic enclosure of ``poly`` over a box given as ``[(lo, hi), ...]``."""
    tlo = thi = Fraction(0)
    for exps, coef in poly.terms.items():
        lo = hi = coef
        for (a, b), e in zip(ranges, exps):
            if e:
                plo, phi = _pow_range(a, b, e)
                cands = (lo * plo, lo * phi, hi * plo, hi * phi)
                lo, hi = min(cands), max(cands)
        tlo += lo
        thi += hi
    return tlo, thi


@lru_cache(maxsize=4096)
def _float_terms(poly: Poly) -> tuple:
    return tuple((e[0], e[1], float(c)) for e, c in poly.terms.items()), poly.degree + len(poly.terms) + 2


def _fpow(lo: float, hi: float, e: int):
    if e == 0:
        return 1.0, 1.0
    if e % 2 or lo >= 0:
        return lo ** e, hi ** e
    if hi <= 0:
        return hi ** e, lo ** e
    return 0.0, max(lo ** e, hi ** e)


def _float_enclosure(poly: Poly, x0, x1, y0, y1):
    """Where the exact enclosure sits: "out" (excludes zero), "in" (contains zero) or None (undecided)."""
    terms, ops = _float_terms(poly)
    fx0, fx1, fy0, fy1 = float(x0), float(x1), float(y0), float(y1)
    mx, my = max(abs(fx0), abs(fx1)), max(abs(fy0), abs(fy1))
    tlo = thi = mag = 0.0
    for ex, ey, c in terms:
        plo, phi = _fpow(fx0, fx1, ex)
        qlo, qhi = _fpow(fy0, fy1, ey)
        cands = (plo * qlo, plo * qhi, phi * qlo, phi * qhi)
        lo, hi = min(cands), max(cands)
        lo, hi = (c * lo, c * hi) if c >= 0 else (c * hi, c * lo)
        tlo += lo
        thi += hi
        mag += abs(c) * mx ** ex * my ** ey
    slack = 8.0 * ops * _EPS * mag + 1e-300
    if tlo > slack or thi < -slack:
        return "out"
    if tlo < -slack and thi > slack:
        return "in"
    return None


def _corner_sign(poly: Poly, x, y) -> int:
    s = float_sign(poly, (x, y))
    return sign_at(poly, (x, y)) if s is None else s


def _box_may_cross(poly, x0, x1, y0, y1, depth) -> bool:
    where = _float_enclosure(poly, x0, x1, y0, y1)
    if where == "out":
        return False
    if where is None:
        lo, hi = poly_range(poly, ((x0, x1), (y0, y1)))
        if lo > 0 or hi < 0:
            return False
    signs = {_corner_sign(poly, x, y) for x in (x0, x1) for y in (y0, y1)}
    if 1 in signs and -1 in signs:
        return True
    if depth <= 0:
        return True
    xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
    return any(
        _box_may_cross(poly, a, b, c, d, depth - 1)
        for a, b in ((x0, xm), (xm, x1))
        for c, d in ((y0, ym), (ym, y1))
    )


def _box_crosses(poly: Poly, box: Box, depth: int = 2) -> bool:
    if poly.num_vars != 2:
        raise UnsupportedBackend("box cells need bivariate surfaces")
    if poly.constant_value() is not None:
        return False
    if box.outer:
        return True
    return _box_may_cross(poly, box.x0, box.x1, box.y0, box.y1, depth)


def crosses(Z, c) -> bool:
    """Does surface ``Z`` (Surface or Poly) cross cell ``c`` (Cell or geometry)?

    Exact for intervals and for lines against trapezoids; conservative for boxes.
    """
    poly = Z.poly if isinstance(Z, Surface) else Z
    geom = c.geometry if isinstance(c, Cell) else c
    if poly.is_zero():
        raise UnsupportedBackend("the zero polynomial contains every cell")
    if isinstance(geom, Interval):
        return _interval_crosses(poly, geom)
    if isinstance(geom, Trapezoid):
        return _trapezoid_crosses(_line_abc(poly), geom)
    if isinstance(geom, Box):
        return _box_crosses(poly, geom)
    raise UnsupportedBackend("unknown cell kind %r" % (geom,))


# ---------------------------------------------------------------------------
# helpers shared by the backends


def _threshold_ok(weight: int, total: int, r: Fraction) -> bool:
    return r * weight <= total


def _weights_of(rows, weights) -> list:
    return [sum(weights[j] for j in row) for row in rows]


def _simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Simplest rational strictly inside (a, b), a < b."""
    if a < 0 < b:
        return Fraction(0)
    if b <= 0:
        return -_simplest_between(-b, -a)
    fl = math.floor(a)
    if fl + 1 < b:
        return Fraction(fl + 1)
    lo_inv = 1 / (b - fl)
    if a == fl:
        return fl + 1 / Fraction(math.floor(lo_inv) + 1)
    return fl + 1 / _simplest_between(lo_inv, 1 / (a - fl))


def _separator(a: RealRoot, b: RealRoot) -> Fraction:
    """A rational strictly between two distinct roots a < b."""
    while True:
        ahi = a.bounds()[1]
        blo = b.bounds()[0]
        if ahi < blo:
            return _simplest_between(ahi, blo)
        if a.is_rational and b.is_rational:
            return _simplest_between(a.value, b.value)
        a.refine()
        b.refine()


# ---------------------------------------------------------------------------
# 1-D backend


def _distinct_roots(surfaces) -> list:
    """Sorted distinct roots, each with the positions of the surfaces vanishing there."""
    tagged = []
    for pos, s in enumerate(surfaces):
        if s.poly.num_vars != 1:
            raise UnsupportedBackend("the 1d backend needs univariate surfaces")
        for r in real_roots(coefficients(s.poly)):
            tagged.append((r, pos))
    if all(r.value is not None for r, _ in tagged):
        tagged.sort(key=lambda u: u[0].value)
        out = []
        for r, pos in tagged:
            if out and out[-1][0].value == r.value:
                out[-1][1].add(pos)
            else:
                out.append((r, {pos}))
        return out
    tagged.sort(key=cmp_to_key(lambda u, v: compare_roots(u[0], v[0])))
    out = []
    for r, pos in tagged:
        if out and compare_roots(out[-1][0], r) == 0:
            out[-1][1].add(pos)
        else:
            out.append((r, {pos}))
    return out


def _endpoint(r: RealRoot):
    return r.value if r.is_rational else r


def _build_1d(surfaces, r: Fraction):
    weights = [s.weight for s in surfaces]
    total = sum(weights)
    roots = _distinct_roots(surfaces)
    cells, rows = [], []
    lo, lo_closed = None, False
    current: set = set()
    cur_w = 0
    prev = None
    for root, members in roots:
        w_root = sum(weights[j] for j in members)
        if not _threshold_ok(w_root, total, r):
            # heavy root: isolate it as a point cell, which nobody crosses
            at = _endpoint(root)
            cells.append(Interval(lo, at, lo_closed, False))
            rows.append(sorted(current))
            cells.append(Interval(at, at, True, True))
            rows.append([])
            lo, lo_closed, current, cur_w, prev = at, False, set(), 0, root
            continue
        fresh = [j for j in members if j not in current]
        w_new = cur_w + sum(weights[j] for j in fresh)
        if _threshold_ok(w_new, total, r):
            current.update(fresh)
            cur_w = w_new
        else:
            sep = _separator(prev, root)
            cells.append(Interval(lo, sep, lo_closed, False))
            rows.append(sorted(current))
            lo, lo_closed, current, cur_w = sep, True, set(members), w_root
        prev = root
    cells.append(Interval(lo, None, lo_closed, False))
    rows.append(sorted(current))
    return cells, rows, {"distinct_roots": len(roots)}


# ---------------------------------------------------------------------------
# 2-D linear backend


def _slope_form(abc):
    a, b, c = abc
    return Line(-a / b, -c / b)


def _int_form(mk):
    if isinstance(mk, Line):
        return mk.M, mk.K, mk.D
    m, k = mk
    D = m.denominator * k.denominator // math.gcd(m.denominator, k.denominator)
    return int(m * D), int(k * D), D


def _trapezoidal_map(lines: list, verticals: list) -> list:
    """Vertical decomposition of an arrangement of non-vertical and vertical lines.

    ``lines`` are distinct ``(slope, intercept)`` pairs.  Returns Trapezoid geometries.
    """
    n = len(lines)
    xs = set(verticals)
    for i in range(n):
        mi, ki = lines[i]
        for j in range(i + 1, n):
            mj, kj = lines[j]
            if mi != mj:
                xs.add((kj - ki) / (mi - mj))
    xs = sorted(xs)
    vertical_set = set(verticals)
    ints = [_int_form(mk) for mk in lines]
    order = sorted(range(n), key=lambda i: (-lines[i][0], lines[i][1]))

    def pairs(seq):
        if not seq:
            return [(None, None)]
        return [(None, seq[0])] + list(zip(seq, seq[1:])) + [(seq[-1], None)]

    def make(pair, xl, xr):
        b, t = pair
        return Trapezoid(xl, xr, None if b is None else lines[b], None if t is None else lines[t])

    out = []
    open_at = {pr: None for pr in pairs(order)}
    for X in xs:
        p, q = X.numerator, X.denominator
        nums = [ints[i][0] * p + ints[i][1] * q for i in order]
        dens = [ints[i][2] for i in order]
        new = []
        i = 0
        while i < n:
            j = i
            while j + 1 < n and nums[j + 1] * dens[i] == nums[i] * dens[j + 1]:
                j += 1
            new.extend(reversed(order[i : j + 1]))
            i = j + 1
        new_pairs = pairs(new)
        if X in vertical_set:
            for pr, xl in open_at.items():
                out.append(make(pr, xl, X))
            open_at = {pr: X for pr in new_pairs}
        else:
            fresh = set(new_pairs)
            for pr in [pr for pr in open_at if pr not in fresh]:
                out.append(make(pr, open_at.pop(pr), X))
            for pr in new_pairs:
                if pr not in open_at:
                    open_at[pr] = X
        order = new
    for pr, xl in open_at.items():
        out.append(make(pr, xl, None))
    return out


def _mag(values) -> int:
    return max((abs(int(v)) for v in values), default=0)


def _array(values, wide: bool):
    return np.array(values, dtype=object if wide else np.int64)


class _LineSet:
    """Integer forms of test surfaces for vectorized exact predicates."""

    def __init__(self, surfaces):
        self.abc = [_line_abc(s.poly) for s in surfaces]
        self.nonvertical = [j for j, (a, b, c) in enumerate(self.abc) if b != 0]
        self.vertical = [j for j, (a, b, c) in enumerate(self.abc) if b == 0 and a != 0]
        ints = []
        for a, b, c in self.abc:
            den = math.lcm(a.denominator, b.denominator, c.denominator)
            A, B, C = int(a * den), int(b * den), int(c * den)
            g = math.gcd(A, B, C) or 1
            ints.append((A // g, B // g, C // g))
        self.ints = ints
        self.mkd = [_int_form(_slope_form(self.abc[j])) for j in self.nonvertical]


def _corner_matrix(cells: list, lineset: _LineSet):
    """Build-side test for bounded trapezoids: signs of each line at the four corners.

    Returns (crossing, ambiguous) boolean matrices over (cell, non-vertical line).
    """
    XN, YN, DN = [], [], []
    for tz in cells:
        row = ([], [], [])
        for x in (tz.xl, tz.xr):
            p, q = x.numerator, x.denominator
            for line in (tz.bottom, tz.top):
                M, K, D = _int_form(line)
                row[0].append(p * D)
                row[1].append(M * p + K * q)
                row[2].append(D * q)
        XN.append(row[0])
        YN.append(row[1])
        DN.append(row[2])
    A = [lineset.ints[j][0] for j in lineset.nonvertical]
    B = [lineset.ints[j][1] for j in lineset.nonvertical]
    C = [lineset.ints[j][2] for j in lineset.nonvertical]
    big = max(_mag(v for r in XN for v in r), _mag(v for r in YN for v in r), _mag(v for r in DN for v in r))
    wide = 3 * big * max(_mag(A), _mag(B), _mag(C), 1) >= 2 ** 62
    XN, YN, DN = (_array(v, wide) for v in (XN, YN, DN))
    A, B, C = (_array(v, wide) for v in (A, B, C))
    S = XN[:, :, None] * A + YN[:, :, None] * B + DN[:, :, None] * C
    pos = (S > 0).any(axis=1)
    neg = (S < 0).any(axis=1)
    zero = S == 0
    # corners: 0 = (xl, B), 1 = (xl, T), 2 = (xr, B), 3 = (xr, T).  A line touching the
    # closed trapezoid only in zero corners meets the half-open cell exactly when the
    # touched face is the bottom-left corner or the bottom edge.
    touch = zero[:, 0] & (~zero[:, 1] | zero[:, 2])
    crossing = (pos & neg) | (~(pos & neg) & touch)
    ambiguous = zero.all(axis=1)
    return crossing, ambiguous


def _interval_matrix(cells: list, lineset: _LineSet):
    """Verification-side test: exact feasibility of B(x) <= L(x) < T(x) on [xl, xr).

    Boolean matrix over (cell, non-vertical line), computed with integer cross products.
    """
    nc = len(cells)
    hxl, pl, ql, hxr, pr, qr = [], [], [], [], [], []
    hB, MB, KB, DB, hT, MT, KT, DT = [], [], [], [], [], [], [], []
    for tz in cells:
        for x, has, P, Q in ((tz.xl, hxl, pl, ql), (tz.xr, hxr, pr, qr)):
            has.append(x is not None)
            P.append(0 if x is None else x.numerator)
            Q.append(1 if x is None else x.denominator)
        for line, has, M, K, D in ((tz.bottom, hB, MB, KB, DB), (tz.top, hT, MT, KT, DT)):
            has.append(line is not None)
            mkd = (0, 0, 1) if line is None else _int_form(line)
            M.append(mkd[0])
            K.append(mkd[1])
            D.append(mkd[2])
    ML = [v[0] for v in lineset.mkd]
    KL = [v[1] for v in lineset.mkd]
    DL = [v[2] for v in lineset.mkd]
    cl = max(_mag(ML), _mag(KL), _mag(DL), 1)
    cb = max(_mag(MB), _mag(KB), _mag(DB), _mag(MT), _mag(KT), _mag(DT), 1)
    cx = max(_mag(pl), _mag(ql), _mag(pr), _mag(qr), 1)
    wide = max(2 * cl * cb, cx) ** 2 >= 2 ** 62
    col = lambda v: _array(v, wide)[:, None]
    row = lambda v: _array(v, wide)[None, :]
    hxl, hxr, hB, hT = (np.array(v, dtype=bool)[:, None] for v in (hxl, hxr, hB, hT))
    pl, ql, pr, qr = col(pl), col(ql), col(pr), col(qr)
    MB, KB, DB, MT, KT, DT = col(MB), col(KB), col(DB), col(MT), col(KT), col(DT)
    ML, KL, DL = row(ML), row(KL), row(DL)
    shape = (nc, len(lineset.mkd))

    a1 = ML * DB - MB * DL
    b1 = KL * DB - KB * DL
    a2 = MT * DL - ML * DT
    b2 = KT * DL - KL * DT
    one = np.ones(shape, dtype=bool)
    lowers = [
        (np.broadcast_to(pl, shape), np.broadcast_to(ql, shape), True, hxl & one),
        (-b1, a1, True, hB & (a1 > 0)),
        (-b2, a2, False, hT & (a2 > 0)),
    ]
    uppers = [
        (np.broadcast_to(pr, shape), np.broadcast_to(qr, shape), False, hxr & one),
        (b1, -a1, True, hB & (a1 < 0)),
        (b2, -a2, False, hT & (a2 < 0)),
    ]
    bad = (hB & (a1 == 0) & (b1 < 0)) | (hT & (a2 == 0) & (b2 <= 0))
    for ln, ld, lc, lp in lowers:
        for un, ud, uc, up in uppers:
            both = lp & up
            lhs = ln * ud
            rhs = un * ld
            if lc and uc:
                viol = lhs > rhs
            else:
                viol = lhs >= rhs
            bad |= both & viol
    return ~bad


def _vertical_column(cells: list, lineset: _LineSet, j: int) -> list:
    return [_trapezoid_crosses(lineset.abc[j], tz) for tz in cells]


def _trapezoid_rows(cells: list, surfaces, method: str) -> list:
    """Crossing positions for each trapezoid, by the corner method or the interval method."""
    lineset = _LineSet(surfaces)
    nc = len(cells)
    matrix = np.zeros((nc, len(surfaces)), dtype=bool)
    nv = lineset.nonvertical
    if nv and nc:
        if method == "corner":
            bounded = [i for i, tz in enumerate(cells) if None not in (tz.xl, tz.xr, tz.bottom, tz.top)]
            unbounded = sorted(set(range(nc)) - set(bounded))
            if bounded:
                sub = [cells[i] for i in bounded]
                cross, amb = _corner_matrix(sub, lineset)
                for a, b in zip(*np.nonzero(amb)):
                    cross[a, b] = _trapezoid_crosses(lineset.abc[nv[b]], sub[a])
                matrix[np.ix_(bounded, nv)] = cross
            if unbounded:
                matrix[np.ix_(unbounded, nv)] = _interval_matrix([cells[i] for i in unbounded], lineset)
        else:
            for start in range(0, nc, 2048):
                block = cells[start : start + 2048]
                matrix[start : start + len(block), nv] = _interval_matrix(block, lineset)
    for j in lineset.vertical:
        matrix[:, j] = _vertical_column(cells, lineset, j)
    return [list(np.nonzero(row)[0]) for row in matrix]


def _weighted_sample(rng: random.Random, count: int, weights: list, size: int) -> list:
    if size >= count:
        return list(range(count))
    top = max(weights)
    fw = [2.0 ** (w.bit_length() - top.bit_length()) for w in weights]
    chosen: set = set()
    draws = 0
    while len(chosen) < size and draws < 50 * size:
        chosen.add(rng.choices(range(count), weights=fw)[0])
        draws += 1
    return sorted(chosen)


def _build_2d_linear(surfaces, r: Fraction, seed: int, retries: int):
    weights = [s.weight for s in surfaces]
    total = sum(weights)
    lines_abc = [_line_abc(s.poly) for s in surfaces]
    candidates = [j for j, (a, b, c) in enumerate(lines_abc) if a != 0 or b != 0]
    if not candidates:
        return [Trapezoid()], [[]], {"sample_size": 0, "attempts": 1}
    rf = float(r)
    base = max(1, math.ceil(rf * math.log(rf + 1)))
    cap = max(base, math.ceil(4 * rf * math.log(rf + 1)))
    sizes = []
    s = float(base)
    while s < cap:
        sizes.append(int(s))
        s *= 1.25
    sizes += [cap] * max(1, retries - len(sizes))
    sizes.append(len(candidates))  # final attempt: the whole arrangement
    rng = random.Random(seed)
    worst = None
    for attempt, size in enumerate(sizes, 1):
        picked = _weighted_sample(rng, len(candidates), [weights[j] for j in candidates], size)
        lines, verticals = set(), set()
        for idx in picked:
            a, b, c = lines_abc[candidates[idx]]
            if b == 0:
                verticals.add(-c / a)
            else:
                lines.add(_slope_form((a, b, c)))
        cells = _trapezoidal_map(sorted(lines), sorted(verticals))
        rows = _trapezoid_rows(cells, surfaces, "corner")
        loads = _weights_of(rows, weights)
        bad = [i for i, w in enumerate(loads) if not _threshold_ok(w, total, r)]
        if not bad:
            return cells, rows, {"sample_size": len(picked), "attempts": attempt}
        worst = cells[max(bad, key=lambda i: loads[i])]
    raise CuttingFailure("no sample met the crossing bound after %d attempts; worst cell %r" % (len(sizes), worst), worst)


# ---------------------------------------------------------------------------
# 2-D subdivision backend


def _bbox_from(points, bbox):
    if bbox is not None:
        return tuple(rat(v) for v in bbox)
    if points is None or len(points) == 0:
        return (Fraction(-1), Fraction(1), Fraction(-1), Fraction(1))
    xs = [rat(p[0]) for p in points]
    ys = [rat(p[1]) for p in points]
    return (min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1)


def _build_2d_box(surfaces, r: Fraction, bbox, max_depth: int):
    weights = [s.weight for s in surfaces]
    total = sum(weights)
    x0, x1, y0, y1 = bbox
    cells, rows = [], []
    stack = [(x0, x1, y0, y1, 0, list(range(len(surfaces))))]
    while stack:
        a, b, c, d, depth, cand = stack.pop()
        hit = [j for j in cand if _box_crosses(surfaces[j].poly, Box(a, b, c, d))]
        if _threshold_ok(sum(weights[j] for j in hit), total, r):
            cells.append(Box(a, b, c, d))
            rows.append(hit)
            continue
        if depth >= max_depth:
            raise CuttingFailure("depth cap %d reached at box %r" % (max_depth, (a, b, c, d)), Box(a, b, c, d))
        xm, ym = (a + b) / 2, (c + d) / 2
        for u, v in ((a, xm), (xm, b)):
            for w, z in ((c, ym), (ym, d)):
                stack.append((u, v, w, z, depth + 1, hit))
    outer = Box(x0, x1, y0, y1, outer=True)
    cells.append(outer)
    rows.append([j for j, s in enumerate(surfaces) if s.poly.constant_value() is None])
    return cells, rows, {"bbox": [str(v) for v in bbox]}


# ---------------------------------------------------------------------------
# public builder


def choose_backend(surfaces, dim: int | None = None) -> str:
    surfaces = as_surfaces(surfaces)
    d = dim if dim is not None else (surfaces[0].dim if surfaces else 1)
    if d == 1:
        return "1d"
    if d == 2:
        if all(s.poly.degree <= 1 for s in surfaces):
            return "2d-linear"
        return "2d-subdivision"
    raise UnsupportedBackend("cuttings are implemented for d = 1 and d = 2 only (got d = %d)" % d)


def build_cutting(
    surfaces,
    r,
    backend: str = "auto",
    seed: int = 0,
    *,
    dim: int | None = None,
    c1=8,
    points=None,
    bbox=None,
    max_depth: int = 12,
    retries: int = 20,
    check_r: bool = True,
) -> Cutting:
    """Cutting whose every bounded cell has weighted crossing load at most W / r."""
    surfaces = _usable(as_surfaces(surfaces))
    dims = {s.dim for s in surfaces}
    if len(dims) > 1:
        raise UnsupportedBackend("surfaces live in different dimensions: %s" % sorted(dims))
    d = dims.pop() if dims else (dim or 1)
    if dim is not None and d != dim:
        raise UnsupportedBackend("surfaces have dimension %d, expected %d" % (d, dim))
    r = Fraction(r)
    if check_r and (r < 1 or (surfaces and r > len(surfaces))):
        raise ValueError("need 1 <= r <= |surfaces| (r = %s, |surfaces| = %d)" % (float(r), len(surfaces)))
    if backend == "auto":
        backend = choose_backend(surfaces, d)
    if backend not in BACKENDS:
        raise UnsupportedBackend("unknown backend %r" % backend)
    for s in surfaces:
        if s.poly.degree > DEGREE_CAP:
            raise UnsupportedBackend("degree %d exceeds the cap %d" % (s.poly.degree, DEGREE_CAP))
    if backend == "1d":
        if d != 1:
            raise UnsupportedBackend("the 1d backend needs d = 1")
        cells, rows, extra = _build_1d(surfaces, r)
    elif backend == "2d-linear":
        if d != 2 or any(s.poly.degree > 1 for s in surfaces):
            raise UnsupportedBackend("the 2d-linear backend needs lines in the plane")
        cells, rows, extra = _build_2d_linear(surfaces, r, seed, retries)
    else:
        if d != 2:
            raise UnsupportedBackend("the 2d-subdivision backend needs d = 2")
        cells, rows, extra = _build_2d_box(surfaces, r, _bbox_from(points, bbox), max_depth)
    crossing = [[surfaces[j].id for j in row] for row in rows]
    bounded = [i for i, g in enumerate(cells) if not getattr(g, "outer", False)]
    params = {
        "d": d,
        "r": float(r),
        "r_exact": str(r),
        "backend": backend,
        "surfaces": len(surfaces),
        "total_weight": sum(s.weight for s in surfaces),
        "cells": len(cells),
        "bounded_cells": len(bounded),
        "c1": float(c1),
        "c1_min": len(bounded) / float(r) ** (2 * d),
        "seed": seed,
    }
    params["c1_ok"] = params["c1_min"] <= float(c1)
    params.update(extra)
    return Cutting([Cell(g, i) for i, g in enumerate(cells)], crossing, params)


# ---------------------------------------------------------------------------
# point location


class _SlabIndex:
    """Elementary x-slabs, each holding its trapezoids ordered bottom to top."""

    def __init__(self, cells: list):
        geoms = [c.geometry for c in cells]
        self.cells = geoms
        self.breaks = sorted({g.xl for g in geoms if g.xl is not None} | {g.xr for g in geoms if g.xr is not None})
        nslabs = len(self.breaks) + 1
        by_slab: list = [dict() for _ in range(nslabs)]
        self.problems: list = []
        for pos, g in enumerate(geoms):
            if g.xl is not None and g.xr is not None and not g.xl < g.xr:
                self.problems.append("cell %d has empty x-range" % pos)
                continue
            first = 0 if g.xl is None else bisect.bisect_left(self.breaks, g.xl) + 1
            last = nslabs - 1 if g.xr is None else bisect.bisect_left(self.breaks, g.xr)
            for s in range(first, last + 1):
                if g.bottom in by_slab[s]:
                    self.problems.append("cells %d and %d share a bottom in slab %d" % (by_slab[s][g.bottom], pos, s))
                by_slab[s][g.bottom] = pos
        self.chains = []
        for s, table in enumerate(by_slab):
            chain = []
            key = None
            while key in table and len(chain) <= len(table):
                chain.append(table[key])
                key = geoms[table[key]].top
                if key is None:
                    break
            if len(chain) != len(table) or (chain and geoms[chain[-1]].top is not None) or not chain:
                self.problems.append("slab %d is not tiled by a bottom-to-top chain" % s)
            self.chains.append(chain)

    def __call__(self, point) -> int:
        x, y = rat(point[0]), rat(point[1])
        chain = self.chains[bisect.bisect_right(self.breaks, x)]
        lo, hi = 0, len(chain) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            b = self.cells[chain[mid]].bottom
            if b is None or b[0] * x + b[1] <= y:
                lo = mid
            else:
                hi = mid - 1
        return chain[lo]


def _make_index(K: Cutting):
    kind = K.cells[0].kind if K.cells else None
    if kind == "trapezoid-2d":
        return _SlabIndex(K.cells)

    def scan(point):
        for i, c in enumerate(K.cells):
            if c.contains(point):
                return i
        raise CuttingFailure("point %r lies in no cell" % (point,))

    return scan


# ---------------------------------------------------------------------------
# verification


def _check_1d_tiling(cells) -> list:
    problems = []
    geoms = [c.geometry for c in cells]

    def key(u, v):
        a, b = geoms[u].lo, geoms[v].lo
        if a is None or b is None:
            return (a is not None) - (b is not None)
        if _same_point(a, b):
            return (not geoms[u].lo_closed) - (not geoms[v].lo_closed)
        ra = a if isinstance(a, RealRoot) else RealRoot(value=a)
        rb = b if isinstance(b, RealRoot) else RealRoot(value=b)
        return compare_roots(ra, rb)

    order = sorted(range(len(geoms)), key=cmp_to_key(key))
    if not order:
        return ["no cells"]
    if geoms[order[0]].lo is not None:
        problems.append("leftmost cell is bounded below")
    if geoms[order[-1]].hi is not None:
        problems.append("rightmost cell is bounded above")
    for u in order:
        g = geoms[u]
        if g.lo is not None and g.hi is not None:
            if _same_point(g.lo, g.hi):
                if not (g.lo_closed and g.hi_closed):
                    problems.append("cell %d is empty" % u)
            elif _cmp_pts(g.lo, g.hi) > 0:
                problems.append("cell %d has lo > hi" % u)
    for u, v in zip(order, order[1:]):
        a, b = geoms[u], geoms[v]
        if a.hi is None or b.lo is None or not _same_point(a.hi, b.lo) or a.hi_closed == b.lo_closed:
            problems.append("cells %d and %d do not abut exactly" % (u, v))
    return problems


def _cmp_pts(a, b) -> int:
    ra = a if isinstance(a, RealRoot) else RealRoot(value=a)
    rb = b if isinstance(b, RealRoot) else RealRoot(value=b)
    return compare_roots(ra, rb)


def _check_box_tiling(cells) -> list:
    problems = []
    inner = [(i, c.geometry) for i, c in enumerate(cells) if not c.geometry.outer]
    outer = [c.geometry for c in cells if c.geometry.outer]
    if len(outer) != 1:
        return ["expected exactly one outer cell, found %d" % len(outer)]
    o = outer[0]
    area = sum((g.x1 - g.x0) * (g.y1 - g.y0) for _, g in inner)
    if area != (o.x1 - o.x0) * (o.y1 - o.y0):
        problems.append("inner boxes do not have the bounding-box area")
    inner.sort(key=lambda t: t[1].x0)
    for a in range(len(inner)):
        i, g = inner[a]
        if not (o.x0 <= g.x0 < g.x1 <= o.x1 and o.y0 <= g.y0 < g.y1 <= o.y1):
            problems.append("box %d leaves the bounding box" % i)
        for b in range(a + 1, len(inner)):
            j, h = inner[b]
            if h.x0 >= g.x1:
                break
            if h.y0 < g.y1 and g.y0 < h.y1:
                problems.append("boxes %d and %d overlap" % (i, j))
    return problems


def _recompute_rows(cells, surfaces, kind, depth: int = 2) -> list:
    if kind == "trapezoid-2d":
        return _trapezoid_rows([c.geometry for c in cells], surfaces, "interval")
    cache: dict = {}
    rows = []
    for c in cells:
        if kind == "interval-1d":
            rows.append([j for j, s in enumerate(surfaces) if _interval_crosses(s.poly, c.geometry, cache)])
        else:
            rows.append([j for j, s in enumerate(surfaces) if _box_crosses(s.poly, c.geometry, depth)])
    return rows


def verify_cutting(surfaces, K: Cutting, P=None, r=None) -> dict:
    """Independent check of tiling, point coverage, crossing lists and the m/r bound."""
    surfaces = _usable(as_surfaces(surfaces))
    r = Fraction(K.params.get("r_exact", K.params.get("r", 1))) if r is None else Fraction(r)
    report: dict = {"cells": len(K.cells), "problems": []}
    if not K.cells:
        report["problems"].append("cutting has no cells")
        report["ok"] = False
        return report
    kind = K.cells[0].kind
    if any(c.kind != kind for c in K.cells):
        report["problems"].append("mixed cell kinds")
    if kind == "interval-1d":
        tiling = _check_1d_tiling(K.cells)
    elif kind == "trapezoid-2d":
        index = _SlabIndex(K.cells)
        tiling = index.problems
        K._index = index if not tiling else None
    else:
        tiling = _check_box_tiling(K.cells)
    report["disjoint"] = not tiling
    report["problems"] += tiling

    if P is not None:
        uncovered, multiple = [], []
        for pi, p in enumerate(P):
            if kind == "trapezoid-2d" and not tiling:
                count = sum(K.cells[c].contains(p) for c in K._index.chains[bisect.bisect_right(K._index.breaks, rat(p[0]))])
            else:
                count = sum(c.contains(p) for c in K.cells)
            if count == 0:
                uncovered.append(pi)
            elif count > 1:
                multiple.append(pi)
        report["coverage"] = not uncovered and not multiple
        if uncovered:
            report["problems"].append("points in no cell: %s" % uncovered[:10])
        if multiple:
            report["problems"].append("points in several cells: %s" % multiple[:10])

    ids = [s.id for s in surfaces]
    truth = _recompute_rows(K.cells, surfaces, kind)
    spurious, missing = [], []
    for pos, (listed, row) in enumerate(zip(K.crossing, truth)):
        want = {ids[j] for j in row}
        have = set(listed)
        for sid in sorted(have - want, key=str):
            spurious.append((pos, sid))
        for sid in sorted(want - have, key=str):
            missing.append((pos, sid))
    report["complete"] = not missing
    report["sound"] = not spurious and not missing
    if kind == "box-2d":
        # box lists are conservative: over-reporting relative to a deeper test is allowed
        report["sound"] = True
        report["spurious_conservative"] = len(spurious)
    elif spurious:
        report["problems"].append("listed but not crossing: %s" % spurious[:10])
    if missing:
        report["problems"].append("crossing but not listed: %s" % missing[:10])

    weight = {s.id: s.weight for s in surfaces}
    total = sum(weight.values())
    bounded = K.bounded_positions()
    loads = [sum(weight.get(sid, 0) for sid in K.crossing[i]) for i in bounded]
    counts = [len(K.crossing[i]) for i in bounded]
    report["max_crossings"] = max(counts, default=0)
    report["max_weighted"] = max(loads, default=0)
    report["bound"] = float(Fraction(total) / r) if r else None
    report["bound_ok"] = all(_threshold_ok(w, total, r) for w in loads)
    if not report["bound_ok"]:
        report["problems"].append("a cell exceeds the crossing bound m/r")
    d = K.params.get("d", 1)
    report["c1_min"] = len(bounded) / float(r) ** (2 * d)
    report["ok"] = bool(
        report["disjoint"] and report.get("coverage", True) and report["sound"] and report["complete"] and report["bound_ok"]
    )
    return report


# ---------------------------------------------------------------------------
# low-crossing partition


@dataclass
class PartitionResult:
    parts: list
    cells: list
    crossing_profile: dict
    params: dict
    pools: list = field(default_factory=list)


def partition_low_crossing(
    P,
    surfaces,
    ell: int,
    backend: str = "auto",
    seed: int = 0,
    *,
    c1=8,
    c2=4,
    r=None,
    bbox=None,
    check_range: bool = True,
    min_part=None,
) -> PartitionResult:
    """Split ``ell`` parts off P, each inside one cell, doubling the surfaces that cross it."""
    N = len(P)
    surfaces = [Surface(s.poly, s.id, 0) for s in _usable(as_surfaces(surfaces))]
    m = len(surfaces)
    if check_range and not ((m == 0 or math.log2(m) < ell) and ell < N / 10):
        raise ValueError("need log2(m) < ell < N/10 (m = %d, ell = %d, N = %d)" % (m, ell, N))
    if ell < 1:
        raise ValueError("ell must be positive")
    d = P.dim if hasattr(P, "dim") else len(P[0])
    points = list(P.points) if hasattr(P, "points") else list(P)
    if r is None:
        r_used = (ell / float(c1)) ** (1.0 / (2 * d))
    else:
        r_used = float(r)
    r_used = min(max(1.0, r_used), float(max(m, 1)))
    r_exact = Fraction(r_used)
    floor_size = N // (4 * ell) if min_part is None else min_part
    remaining = list(range(N))
    profile = {s.id: 0 for s in surfaces}
    parts, cells, schedule, pools = [], [], [], []
    fixed = None
    if m == 0:
        fixed = build_cutting([], 1, "auto" if backend == "auto" else backend, seed, dim=d, points=points, bbox=bbox)
    by_id = {s.id: s for s in surfaces}
    rebuilds = 0
    for j in range(1, ell + 1):
        target = math.floor(Fraction(N, ell) * (1 - Fraction(1, ell)) ** (j - 1))
        if fixed is not None:
            K = fixed
        else:
            K = build_cutting(surfaces, r_exact, backend, seed + j, dim=d, points=points, bbox=bbox, c1=c1)
            rebuilds += 1
        groups: dict = {}
        for i in remaining:
            groups.setdefault(K.locate(points[i]), []).append(i)
        eligible = [pos for pos in K.bounded_positions() if pos in groups]
        if not eligible:
            raise CuttingFailure("round %d: no bounded cell holds a remaining point" % j)
        best = max(eligible, key=lambda pos: (len(groups[pos]), -pos))
        size = min(target, len(groups[best]))
        if size < floor_size or size == 0:
            raise CuttingFailure(
                "round %d: the fullest cell holds %d points, below the floor %d" % (j, len(groups[best]), floor_size),
                K.cells[best],
            )
        part = groups[best][:size]
        pools.append(list(groups[best]))
        chosen = set(part)
        remaining = [i for i in remaining if i not in chosen]
        parts.append(part)
        cells.append(K.cells[best])
        schedule.append(target)
        for sid in K.crossing[best]:
            by_id[sid].weight_exp += 1
            profile[sid] += 1
    kappa = max(profile.values(), default=0)
    scale = ell ** (1 - 1 / (2 * d))
    c2_min = kappa / scale
    growth = (1 + 1 / r_used) ** ell
    doubling_ok = all(2 ** k <= max(m, 1) * growth * (1 + 1e-9) for k in profile.values())
    params = {
        "ell": ell,
        "N": N,
        "m": m,
        "d": d,
        "r": r_used,
        "backend": backend,
        "floor": floor_size,
        "schedule": schedule,
        "rebuilds": rebuilds,
        "max_crossings": kappa,
        "c2": float(c2),
        "c2_min": c2_min,
        "c2_ok": c2_min <= float(c2),
        "doubling_identity_ok": doubling_ok,
    }
    return PartitionResult(parts, cells, profile, params, pools)


# ---------------------------------------------------------------------------
# files


def _point_json(v):
    if v is None:
        return None
    if isinstance(v, RealRoot):
        if v.is_rational:
            return str(v.value)
        return {"poly": [str(c) for c in v.poly], "lo": str(v.lo), "hi": str(v.hi)}
    return str(v)


def _point_from(v):
    if v is None:
        return None
    if isinstance(v, dict):
        poly = [Fraction(c) for c in v["poly"]]
        return RealRoot(poly=poly, chain=sturm_chain(poly), lo=Fraction(v["lo"]), hi=Fraction(v["hi"]))
    return Fraction(v)


def _line_json(line):
    return None if line is None else [str(line[0]), str(line[1])]


def _line_from(v):
    return None if v is None else Line(Fraction(v[0]), Fraction(v[1]))


def cutting_to_json(K: Cutting) -> str:
    cells = []
    for c, row in zip(K.cells, K.crossing):
        g = c.geometry
        entry = {"id": c.id, "kind": c.kind}
        if isinstance(g, Interval):
            entry.update(lo=_point_json(g.lo), hi=_point_json(g.hi), lo_closed=g.lo_closed, hi_closed=g.hi_closed)
        elif isinstance(g, Trapezoid):
            entry.update(xl=_point_json(g.xl), xr=_point_json(g.xr), bottom=_line_json(g.bottom), top=_line_json(g.top))
        else:
            entry.update(x0=str(g.x0), x1=str(g.x1), y0=str(g.y0), y1=str(g.y1), outer=g.outer)
        entry["crossing"] = list(row)
        cells.append(entry)
    return json.dumps({"schema_version": 1, "params": K.params, "cells": cells}, indent=1, default=str)


def cutting_from_json(text: str) -> Cutting:
    data = json.loads(text)
    cells, rows = [], []
    for entry in data["cells"]:
        kind = entry["kind"]
        if kind == "interval-1d":
            g = Interval(_point_from(entry["lo"]), _point_from(entry["hi"]), entry["lo_closed"], entry["hi_closed"])
        elif kind == "trapezoid-2d":
            g = Trapezoid(_point_from(entry["xl"]), _point_from(entry["xr"]), _line_from(entry["bottom"]), _line_from(entry["top"]))
        elif kind == "box-2d":
            g = Box(*(Fraction(entry[k]) for k in ("x0", "x1", "y0", "y1")), outer=entry["outer"])
        else:
            raise UnsupportedBackend("unknown cell kind %r" % kind)
        cells.append(Cell(g, entry["id"]))
        rows.append(list(entry["crossing"]))
    return Cutting(cells, rows, data.get("params", {}))


def format_surfaces(surfaces) -> str:
    surfaces = as_surfaces(surfaces)
    d = surfaces[0].dim if surfaces else 1
    return "%d %d\n" % (d, len(surfaces)) + "".join(format_poly(s.poly) + "\n" for s in surfaces)


def parse_surfaces(text: str) -> list:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    d, m = (int(v) for v in rows[0].split())
    if len(rows) - 1 != m:
        raise ValueError("header announces %d surfaces, found %d" % (m, len(rows) - 1))
    return [Surface(parse_poly(t, d), i) for i, t in enumerate(rows[1:])]
