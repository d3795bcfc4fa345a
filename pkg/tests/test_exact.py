from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slopelab import exact
from slopelab.errors import InputError, NumericalError
from slopelab.rational import decimal_string, format_rational, parse_rational, rational_fields

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def square(n):
    return st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=n, max_size=n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_det_matches_float(a):
    ref = np.linalg.det(np.array(a, dtype=float))
    assert abs(float(exact.det(a)) - ref) <= 1e-8 * max(1.0, abs(ref))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_inverse_roundtrip(a):
    if exact.det(a) == 0:
        with pytest.raises(NumericalError):
            exact.inverse(a)
        return
    inv = exact.inverse(a)
    n = len(a)
    assert exact.matmul(a, inv) == [[int(i == j) for j in range(n)] for i in range(n)]


def test_rank_and_det_int():
    assert exact.rank([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2
    assert exact.det_int([[2, 1], [1, 2]]) == 3
    assert exact.det([[F(1, 2), F(1, 3)], [F(1, 4), F(1, 5)]]) == F(1, 10) - F(1, 12)
    assert exact.leading_minors_positive([[2, 1], [1, 2]])
    assert not exact.leading_minors_positive([[1, 2], [2, 1]])


@given(fractions)
def test_rational_roundtrip(x):
    assert parse_rational(format_rational(x)) == x


def test_parse_rejects():
    for bad in ["1.5", "1/0", "abc", 1.5, True, None]:
        with pytest.raises(InputError):
            parse_rational(bad)


def test_decimal_fields():
    assert decimal_string(F(1, 3)) == "0.33333333333333333"
    assert decimal_string(F(0)) == "0"
    assert rational_fields("x", F(5, 18)) == {"x": "5/18", "x_decimal": "0.27777777777777778"}
