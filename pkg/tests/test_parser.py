import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symdiff3.errors import ParseError
from symdiff3.parser import format_complex, format_series, parse_expression, tokenize
from symdiff3.series import W, Z, Series2

from strategies import series


def test_polynomial_example():
    s = parse_expression("1 + z*w - 0.5*w^2", 6)
    z, w = Series2.var(Z, 6), Series2.var(W, 6)
    assert s == 1 + z * w - 0.5 * w * w


def test_complex_coefficient():
    s = parse_expression("(2+3i)*z", 6)
    assert s[1, 0] == 2 + 3j
    assert s.constant == 0


def test_dangling_caret_position():
    with pytest.raises(ParseError) as info:
        parse_expression("z^")
    assert info.value.position == 2
    assert info.value.expected == {"uint"}


@pytest.mark.parametrize(
    "text,pos",
    [("(z", 2), ("z+*w", 2), ("3 z", 2), ("z^1.5", 2), ("z $ w", 2), ("", 0), ("w)", 1)],
)
def test_error_positions(text, pos):
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert info.value.position == pos
    assert info.value.expected


def test_whitespace_is_insignificant():
    assert parse_expression(" ( 1 +z ) ^ 2 ") == parse_expression("(1+z)^2")


def test_leading_sign_and_exponents():
    s = parse_expression("-(1.5e-3 - 2i)*(z+w)^2", 4)
    assert s[2, 0] == pytest.approx(-0.0015 + 2j)
    assert s[1, 1] == pytest.approx(2 * (-0.0015 + 2j))
    assert parse_expression("+z") == parse_expression("z")


def test_truncates_to_order():
    s = parse_expression("(1+z)^10", 3)
    assert s.max_order == 3
    assert s[3, 0] == 120


def test_tokens_carry_positions():
    toks = tokenize("z + 12.5i")
    assert [(t.kind, t.pos) for t in toks] == [("z", 0), ("+", 2), ("number", 4), ("i", 8), ("end", 9)]


def test_format_complex_digits():
    assert format_complex(0.1 + 0.2j) == "(0.10000000000000001+0.20000000000000001i)"
    assert format_complex(-1 - 0j) == "(-1+0i)"
    assert format_complex(-0.0 + 2.5j) == "(0+2.5i)"


def test_format_zero_series():
    assert format_series(Series2.zero(4)) == "0"


@settings(max_examples=300)
@given(series(n=5, bound=1e6))
def test_round_trip_exact(s):
    back = parse_expression(format_series(s), 5)
    assert (back.coeffs == s.coeffs).all()


@settings(max_examples=200)
@given(st.floats(allow_nan=False, allow_infinity=False), st.floats(allow_nan=False, allow_infinity=False))
def test_round_trip_extreme_floats(re_, im):
    s = Series2.const(complex(re_, im), 2)
    assert parse_expression(format_series(s), 2).constant == complex(re_, im) + 0.0
