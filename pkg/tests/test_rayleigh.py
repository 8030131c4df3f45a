import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from steklov_shell.geometry import ShellConfig, derive_frame, scale_factor
from steklov_shell.gegenbauer import gegenbauer_table
from steklov_shell.operator import assemble, diag_d
from steklov_shell.quadrature import clear_theta_cache
from steklov_shell.rayleigh import (boundary_normal_series, eval_gradient, evaluate,
                                    rayleigh_quotient, rayleigh_quotient_2d,
                                    truncated_eigenfunction, validation_gap)
from steklov_shell.trideig import smallest_eigenvalues

# 40-digit dense oracles, Example-1 frame
EX1_SIGMA8 = 0.1381985632116614348803694
EX1_SIGMA8_RANK2 = 0.4540172303194578627029149
EX1_SIGMA32 = 0.1381922339002268227738193

CONFIGS = [(n, ratio) for n in (1, 2, 3) for ratio in (0.2, 0.5, 0.8)]


def _frame(n, ratio):
    return derive_frame(ShellConfig.from_ratio(n, 1.0, 3.0, ratio))


def _sigma_ref(frame, n):
    return smallest_eigenvalues(assemble(frame, n, 512), 1, vectors=False)[0].value


def test_single_term(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 1)
    assert u.sigma == pytest.approx(diag_d(ex1_frame, 1, 0) / (2 * ex1_frame.alpha), rel=1e-15)
    np.testing.assert_array_equal(u.vector, [1.0])
    assert u.coeffs.shape == (1,) and u.coeffs[0] > 0


def test_sigma_against_dense_oracle(ex1_frame):
    assert truncated_eigenfunction(ex1_frame, 1, 8).sigma == pytest.approx(EX1_SIGMA8, rel=1e-14)
    assert truncated_eigenfunction(ex1_frame, 1, 8, rank=2).sigma == pytest.approx(EX1_SIGMA8_RANK2,
                                                                                  rel=1e-14)
    s16 = truncated_eigenfunction(ex1_frame, 1, 16).sigma
    assert EX1_SIGMA32 < s16 < EX1_SIGMA8


def test_rank_two(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 64, rank=2)
    second = smallest_eigenvalues(assemble(ex1_frame, 1, 64), 2, vectors=False)[1].value
    assert u.sigma == second
    assert u.rank == 2
    with pytest.raises(ValueError):
        truncated_eigenfunction(ex1_frame, 1, 4, rank=5)
    with pytest.raises(ValueError):
        truncated_eigenfunction(ex1_frame, 1, 0)


def test_eigenfunction_is_immutable(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 8)
    with pytest.raises(ValueError):
        u.coeffs[0] = 2.0
    with pytest.raises(AttributeError):
        u.sigma = 1.0


@pytest.mark.parametrize("n, ratio", CONFIGS)
def test_coefficients(n, ratio):
    fr = _frame(n, ratio)
    u = truncated_eigenfunction(fr, n, 32)
    assert np.all(u.coeffs > 0)
    assert u.coeffs[-1] / u.coeffs[0] < 1
    assert np.sum(u.vector ** 2) == pytest.approx(1.0, rel=1e-14)
    L = assemble(fr, n, 32)
    assert np.max(np.abs(L.matvec(u.vector) - u.sigma * u.vector)) <= 64 * 2.0 ** -53 * L.norm_inf()


def test_vanishes_on_inner_sphere(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 32)
    theta = np.linspace(0, math.pi, 100)
    interior = np.abs(evaluate(u, ex1_frame.xi2, theta)).max()
    assert np.abs(evaluate(u, ex1_frame.xi1, theta)).max() <= 1e-14 * interior


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trace_on_outer_sphere(ex1_frame, n):
    u = truncated_eigenfunction(ex1_frame, n, 24)
    theta = np.linspace(0.05, math.pi, 40)
    s = np.cos(theta)
    direct = (np.cosh(ex1_frame.xi2) - s) ** (n / 2) * (u.coeffs @ gegenbauer_table(n / 2, 23, s))
    np.testing.assert_allclose(evaluate(u, ex1_frame.xi2, theta), direct, rtol=1e-13)


@pytest.mark.parametrize("n, ratio", CONFIGS)
def test_positive_inside(n, ratio):
    fr = _frame(n, ratio)
    u = truncated_eigenfunction(fr, n, 32)
    rng = np.random.default_rng(n * 10 + int(ratio * 10))
    xi = rng.uniform(fr.xi2, fr.xi1, 200)
    theta = rng.uniform(0, math.pi, 200)
    inside = xi < fr.xi1
    assert np.all(evaluate(u, xi[inside], theta[inside]) > 0)


def test_scalar_and_array_evaluation(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 8)
    v = evaluate(u, 1.2, 0.7)
    assert np.ndim(v) == 0
    assert evaluate(u, np.array([1.2, 1.3]), 0.7)[0] == pytest.approx(v, rel=1e-15)


@pytest.mark.parametrize("n", [1, 2])
def test_gradient_finite_differences(ex1_frame, n):
    fr = ex1_frame
    u = truncated_eigenfunction(fr, n, 16)
    rng = np.random.default_rng(3)
    h = 1e-6
    xi = rng.uniform(fr.xi2 + 2 * h, fr.xi1 - 2 * h, 50)
    theta = rng.uniform(0.05, math.pi - 0.05, 50)
    d_xi, d_theta = eval_gradient(u, xi, theta)
    fd_xi = (evaluate(u, xi + h, theta) - evaluate(u, xi - h, theta)) / (2 * h)
    fd_theta = (evaluate(u, xi, theta + h) - evaluate(u, xi, theta - h)) / (2 * h)
    scale = np.hypot(d_xi, d_theta)
    assert np.all(np.abs(d_xi - fd_xi) <= 1e-7 * scale)
    assert np.all(np.abs(d_theta - fd_theta) <= 1e-7 * scale)


def test_gradient_on_axis_and_inner_sphere(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 2, 16)
    xi = np.linspace(ex1_frame.xi2, ex1_frame.xi1, 7)
    for theta in (0.0, math.pi):
        assert np.abs(eval_gradient(u, xi, theta)[1]).max() < 1e-15
    theta = np.linspace(0, math.pi, 9)
    d_xi, d_theta = eval_gradient(u, ex1_frame.xi1, theta)
    assert np.abs(d_theta).max() <= 1e-14 * np.abs(d_xi).max()


def _fd_normal_derivative(u, theta, h=1e-6):
    fr = u.frame
    # one-sided second-order stencil pointing into the shell
    x = fr.xi2
    d_xi = (-3 * evaluate(u, x, theta) + 4 * evaluate(u, x + h, theta) - evaluate(u, x + 2 * h, theta)) / (2 * h)
    return -d_xi / scale_factor(fr, x, theta)


@pytest.mark.parametrize("n, m", [(1, 1), (1, 8), (2, 16), (3, 8)])
def test_normal_series_finite_differences(ex1_frame, n, m):
    u = truncated_eigenfunction(ex1_frame, n, m)
    D = boundary_normal_series(u)
    assert len(D) == m + 1
    theta = np.linspace(0.1, math.pi - 0.1, 20)
    s = np.cos(theta)
    series = (np.cosh(ex1_frame.xi2) - s) ** (n / 2) * (D @ gegenbauer_table(n / 2, m, s))
    fd = _fd_normal_derivative(u, theta)
    assert np.all(np.abs(series - fd) <= 1e-7 * np.abs(fd).max())


def test_normal_series_gradient_route(ex1_frame):
    # the analytic xi-derivative gives an independent normal derivative
    u = truncated_eigenfunction(ex1_frame, 1, 32)
    theta = np.linspace(0.02, math.pi, 50)
    s = np.cos(theta)
    D = boundary_normal_series(u)
    series = (np.cosh(ex1_frame.xi2) - s) ** 0.5 * (D @ gegenbauer_table(0.5, 32, s))
    d_xi = eval_gradient(u, ex1_frame.xi2, theta)[0]
    direct = -d_xi / scale_factor(ex1_frame, ex1_frame.xi2, theta)
    np.testing.assert_allclose(series, direct, rtol=1e-10, atol=1e-10 * np.abs(direct).max())


def test_normal_series_is_sigma_times_trace(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 24)
    D = boundary_normal_series(u)
    np.testing.assert_allclose(D[:-1], u.sigma * u.coeffs, rtol=1e-11,
                               atol=1e-14 * u.coeffs[0])
    # the defect sits entirely in the last slot and never vanishes
    assert D[-1] != 0


@pytest.mark.parametrize("n, ratio", [(1, 1 / 3), (2, 0.5), (3, 0.8)])
def test_sandwich(n, ratio):
    fr = _frame(n, ratio)
    ref = _sigma_ref(fr, n)
    for m in (4, 8, 16, 32, 64):
        u = truncated_eigenfunction(fr, n, m)
        rq = rayleigh_quotient(u)
        assert ref - 1e-10 <= rq <= u.sigma + 1e-12


def test_large_m_quotient_matches_sigma(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 512)
    assert abs(rayleigh_quotient(u) - u.sigma) < 1e-10


@pytest.mark.parametrize("m", [1, 4, 16])
def test_two_routes_agree(ex1_frame, m):
    u = truncated_eigenfunction(ex1_frame, 1, m)
    green = rayleigh_quotient(u)
    area = rayleigh_quotient_2d(u)
    assert area == pytest.approx(green, rel=1e-10 if m == 1 else 1e-8)


def test_two_routes_agree_n2():
    fr = _frame(2, 0.5)
    u = truncated_eigenfunction(fr, 2, 12)
    assert rayleigh_quotient_2d(u) == pytest.approx(rayleigh_quotient(u), rel=1e-8)


def test_scaling_invariance(ex1_frame):
    u = truncated_eigenfunction(ex1_frame, 1, 16)
    assert rayleigh_quotient(u.scaled(7)) == pytest.approx(rayleigh_quotient(u), rel=1e-14)
    assert rayleigh_quotient_2d(u.scaled(7), 1e-11) == pytest.approx(rayleigh_quotient_2d(u, 1e-11),
                                                                   rel=1e-10)


def test_validation_gap_decreases_to_floor():
    cfg = ShellConfig(1, 1.0, 3.0, 1.2)
    fr = derive_frame(cfg)
    ref = smallest_eigenvalues(assemble(fr, 1, 128), 1, vectors=False)[0].value
    gaps = [validation_gap(fr, 1, m, ref) for m in (2, 4, 8, 16, 32, 64)]
    assert all(g >= 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps[:4], gaps[1:5]))
    assert min(gaps) <= 1e-9


def test_concurrent_quotients_match_serial(ex1_frame):
    clear_theta_cache()
    us = [truncated_eigenfunction(ex1_frame, 1, m) for m in (4, 8, 12, 16, 24, 32)]
    with ThreadPoolExecutor(4) as pool:
        parallel = list(pool.map(rayleigh_quotient, us))
    clear_theta_cache()
    serial = [rayleigh_quotient(u) for u in us]
    assert parallel == serial


def test_extended_quotient(ex1_frame_ext):
    u = truncated_eigenfunction(ex1_frame_ext, 1, 64)
    gap = abs(rayleigh_quotient(u) - u.sigma)
    assert gap < 1e-25
    assert rayleigh_quotient(u) <= u.sigma + u.arith.eps * 64
