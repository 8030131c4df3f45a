import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov_shell.geometry import ShellConfig, derive_frame
from steklov_shell.operator import (TridiagonalMatrix, assemble, coupling_c,
                                    coupling_c_squared_minus_one, diag_d, offdiag_w)
from steklov_shell.trideig import sturm_count

# 40-digit oracle for the Example-1 frame
EX1_C0 = 1.495348781221220541911899
EX1_L00 = 1 / 3
EX1_L01 = -math.sqrt(2) / 6


def _oracle_entries(n, r1, r2, t, N, dps=40):
    """Entries from the textbook formulas evaluated at high precision."""
    with mpmath.workdps(dps):
        r1, r2, t = (mpmath.mpf(repr(v)) for v in (r1, r2, t))
        al = mpmath.sqrt(((r2 + r1) ** 2 - t ** 2) * ((r2 - r1) ** 2 - t ** 2)) / (2 * t)
        x1, x2 = mpmath.asinh(al / r1), mpmath.asinh(al / r2)
        c = [mpmath.tanh((m + mpmath.mpf(n) / 2) * (x1 - x2)) ** -0.5 for m in range(N)]
        d = [((n + 2 * k) * c[k] ** 2 * mpmath.cosh(x2) - n * mpmath.sinh(x2)) / (2 * al)
             for k in range(N)]
        off = [-mpmath.sqrt((k + n - 1) * k) * c[k - 1] * c[k] / (2 * al) for k in range(1, N)]
        return [float(v) for v in d], [float(v) for v in off]


def test_example1_entries(ex1_frame):
    assert coupling_c(ex1_frame, 1, 0) == pytest.approx(EX1_C0, rel=1e-15)
    L = assemble(ex1_frame, 1, 4)
    assert L.diag[0] == pytest.approx(EX1_L00, rel=1e-15)
    assert L.offdiag[0] == pytest.approx(EX1_L01, rel=1e-15)
    sinh2 = ex1_frame.alpha / 3
    assert diag_d(ex1_frame, 1, 0) == pytest.approx(EX1_C0 ** 2 * 1.5 - sinh2, rel=1e-15)


@pytest.mark.parametrize("n, t", [(1, 1.0), (2, 0.8), (3, 1.9), (1, 0.01)])
def test_entries_against_oracle(n, t):
    fr = derive_frame(ShellConfig(n, 1.0, 3.0, t))
    L = assemble(fr, n, 40)
    d, off = _oracle_entries(n, 1.0, 3.0, t, 40)
    np.testing.assert_allclose(L.diag, d, rtol=1e-13)
    np.testing.assert_allclose(L.offdiag, off, rtol=1e-13)


def test_extended_entries_against_oracle(ex1_frame_ext):
    L = assemble(ex1_frame_ext, 1, 12)
    with mpmath.workdps(40):
        third = mpmath.mpf(1) / 3
        assert abs(L.diag[0] - third) < 1e-33
        assert abs(L.offdiag[0] + mpmath.sqrt(2) / 6) < 1e-33


def test_coupling_c_limits(ex1_frame):
    cs = [coupling_c(ex1_frame, 1, m) for m in range(65)]
    assert all(a > b > 1 for a, b in zip(cs[:16], cs[1:16]))
    # beyond that c rounds to 1 but never increases
    assert all(a >= b >= 1 for a, b in zip(cs, cs[1:]))
    assert coupling_c(ex1_frame, 1, 1024) - 1 < 1e-10
    # no overflow or cancellation far out
    assert 0 < coupling_c_squared_minus_one(ex1_frame, 1, 100) < 1e-80
    assert coupling_c_squared_minus_one(ex1_frame, 1, 5000) == 0.0


def test_diag_lower_bound_and_growth(ex1_frame):
    fr = ex1_frame
    for n in (1, 2):
        for k in range(256):
            c2 = coupling_c(fr, n, k) ** 2
            bound = c2 * (k * math.exp(fr.xi2) + (k + n) * math.exp(-fr.xi2))
            assert diag_d(fr, n, k) >= bound * (1 - 4e-16)
    assert diag_d(fr, 1, 512) / 512 == pytest.approx(2 * math.cosh(fr.xi2), rel=0.01)


def test_offdiag_w():
    assert offdiag_w(1, 1) == 1
    assert offdiag_w(2, 3) == pytest.approx(math.sqrt(12))
    assert all(offdiag_w(1, k) == k for k in range(1, 50))


def test_small_sections(ex1_frame):
    L1 = assemble(ex1_frame, 1, 1)
    assert L1.size == 1 and len(L1.offdiag) == 0
    assert L1.diag[0] == pytest.approx(diag_d(ex1_frame, 1, 0) / (2 * ex1_frame.alpha))
    assert sturm_count(assemble(ex1_frame, 1, 3), 0.0) == 0
    with pytest.raises(ValueError):
        assemble(ex1_frame, 1, 0)


def test_nested_truncation(ex1_frame):
    big = assemble(ex1_frame, 2, 8)
    small = assemble(ex1_frame, 2, 4)
    assert np.array_equal(big.leading(4).diag, small.diag)
    assert np.array_equal(big.leading(4).offdiag, small.offdiag)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.floats(0.02, 0.98), st.integers(1, 200))
def test_signs_and_positive_definiteness(n, ratio, N):
    fr = derive_frame(ShellConfig.from_ratio(n, 1.0, 3.0, ratio))
    L = assemble(fr, n, N)
    assert np.all(L.diag > 0)
    assert np.all(L.offdiag < 0)
    assert sturm_count(L, 0.0) == 0


def test_matrix_is_immutable(ex1_frame):
    L = assemble(ex1_frame, 1, 5)
    with pytest.raises(ValueError):
        L.diag[0] = 1.0
    with pytest.raises(ValueError):
        TridiagonalMatrix(np.ones(3), np.ones(3))


def test_dense_and_matvec(ex1_frame):
    L = assemble(ex1_frame, 1, 6)
    v = np.arange(1.0, 7.0)
    np.testing.assert_allclose(L.matvec(v), L.to_dense() @ v, rtol=1e-14)
