import mpmath
import numpy as np
import pytest

from steklov_shell.precision import BINARY64, EXTENDED, get_arith


def test_profiles_by_name():
    assert get_arith("binary64") is BINARY64
    assert get_arith("extended") is EXTENDED
    assert get_arith(EXTENDED) is EXTENDED
    with pytest.raises(ValueError):
        get_arith("quad")


def test_extended_carries_at_least_30_digits():
    assert EXTENDED.eps < 1e-30
    assert EXTENDED.digits == 30
    third = EXTENDED.num(1) / 3
    assert abs(third * 3 - 1) <= EXTENDED.eps


def test_decimal_inputs_are_exact_in_extended():
    # 0.2 must mean the decimal, not the nearest double
    assert EXTENDED.num(0.2) == EXTENDED.ctx.mpf("0.2")
    assert EXTENDED.num(0.2) != EXTENDED.ctx.mpf(0.2)


def test_extended_context_is_isolated():
    before = mpmath.mp.dps
    EXTENDED.sqrt(EXTENDED.num(2))
    assert mpmath.mp.dps == before


def test_array_functions_are_elementwise():
    x = EXTENDED.linspace(0, 1, 5)
    y = EXTENDED.exp(x)
    assert y.dtype == object and len(y) == 5
    assert abs(y[-1] - EXTENDED.ctx.e) < 1e-33
    np.testing.assert_allclose(BINARY64.exp(np.array([0.0, 1.0])), [1, np.e])


def test_fmt_significant_digits():
    assert BINARY64.fmt(1 / 3) == "0.333333333333333"
    assert EXTENDED.fmt(EXTENDED.num(1) / 3) == "0." + "3" * 30
    assert BINARY64.fmt(None) == ""
