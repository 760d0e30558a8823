from fractions import Fraction

from hypothesis import strategies as st

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def frac_points(dim: int, min_size: int = 1, max_size: int = 12):
    return st.lists(st.tuples(*[rationals] * dim), min_size=min_size, max_size=max_size, unique=True)


def half(x) -> Fraction:
    return Fraction(x) / 2
