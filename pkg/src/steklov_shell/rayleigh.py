"""Truncated eigenfunctions and their Rayleigh quotients.

The ``m``-term eigenfunction is

    u(xi, theta) = F^(n/2) * sum_k C_k R_k(xi) G_k(cos theta),
    F = cosh xi - cos theta,
    R_k(xi) = sinh(a_k (xi1 - xi)) / sinh(a_k (xi1 - xi2)),  a_k = k + n/2,

with ``G_k`` the Gegenbauer polynomials of parameter ``n/2``.  The series
coefficients ``C_k`` are the eigenvector of the finite section mapped out of
the orthonormalised basis: ``C_k = v_k s_k / c_k`` where
``s_k = prod_{j<=k} sqrt(j / (j + n - 1))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gegenbauer import folded_cos_coefficients, gegenbauer_table
from .geometry import BisphericalFrame
from .operator import assemble, coupling_c, coupling_c_squared_minus_one, diag_d
from .quadrature import default_tol, integrate_1d, integrate_2d, theta_integral_table
from .trideig import smallest_eigenvalues


@dataclass(frozen=True)
class TruncatedEigenfunction:
    """Rank-``rank`` eigenpair of the ``m x m`` finite section as a function.

    ``vector`` is the unit eigenvector of the finite section (positive first
    entry); ``coeffs`` are the series coefficients ``C_k`` used by
    :func:`evaluate`.  Both have length ``m``.
    """

    frame: BisphericalFrame
    n: int
    m: int
    sigma: object
    coeffs: np.ndarray
    vector: np.ndarray = field(repr=False)
    rank: int = 1

    def __post_init__(self):
        for arr in (self.coeffs, self.vector):
            arr.setflags(write=False)

    @property
    def arith(self):
        return self.frame.arith

    def scaled(self, factor) -> "TruncatedEigenfunction":
        """Same function multiplied by ``factor`` (the quotient ignores this)."""
        f = self.arith.num(factor)
        return TruncatedEigenfunction(self.frame, self.n, self.m, self.sigma,
                                      self.coeffs * f, self.vector * f, self.rank)


def basis_scaling(n: int, m: int, arith) -> np.ndarray:
    """``s_k = prod_{j=1..k} sqrt(j / (j + n - 1))`` for ``k < m``."""
    out = arith.zeros(m)
    out[0] = arith.num(1)
    for k in range(1, m):
        out[k] = out[k - 1] * arith.sqrt(arith.num(k) / (k + n - 1))
    return out


def truncated_eigenfunction(frame: BisphericalFrame, n: int, m: int, rank: int = 1,
                            rel_tol=None) -> TruncatedEigenfunction:
    """Assemble the ``m x m`` section and wrap its ``rank``-th smallest eigenpair."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 1 <= rank <= m:
        raise ValueError(f"rank must be in [1, m={m}], got {rank}")
    ar = frame.arith
    pair = smallest_eigenvalues(assemble(frame, n, m), rank, rel_tol)[-1]
    c = ar.array([coupling_c(frame, n, k) for k in range(m)])
    coeffs = pair.vector * basis_scaling(n, m, ar) / c
    return TruncatedEigenfunction(frame, n, m, pair.value, coeffs, pair.vector, rank)


# ---------------------------------------------------------------------------
# pointwise evaluation

def _radial(u: TruncatedEigenfunction, xi, derivative: bool = False):
    """Rows ``R_k(xi)`` (or ``R_k'(xi)``) for ``k < m``, overflow-free."""
    ar = u.arith
    fr = u.frame
    xi = np.asarray(xi)
    a = (np.arange(u.m) + ar.num(u.n) / 2).astype(ar.dtype).reshape((-1,) + (1,) * xi.ndim)
    decay = ar.exp(-a * (xi - fr.xi2))
    inner = -2 * a * (fr.xi1 - xi)
    denom = ar.expm1(-2 * a * (fr.xi1 - fr.xi2))
    if not derivative:
        return decay * ar.expm1(inner) / denom
    return a * decay * (1 + ar.exp(inner)) / denom


def _angular(u: TruncatedEigenfunction, s, derivative: bool = False):
    ar = u.arith
    lam = ar.num(u.n) / 2
    if not derivative:
        return gegenbauer_table(lam, u.m - 1, s)
    out = np.zeros((u.m,) + np.shape(s), dtype=ar.dtype)
    out[...] = 0 * np.asarray(s)
    if u.m > 1:
        out[1:] = 2 * lam * gegenbauer_table(lam + 1, u.m - 2, s)
    return out


def _series(coeffs, rows):
    return np.tensordot(coeffs, rows, axes=(0, 0))


def _as_result(val):
    val = np.asarray(val)
    return val[()] if val.ndim == 0 else val


def evaluate(u: TruncatedEigenfunction, xi, theta):
    """``u(xi, theta)``; broadcasts over array arguments."""
    ar = u.arith
    xi, theta = np.broadcast_arrays(ar.array(np.asarray(xi)), ar.array(np.asarray(theta)))
    s = ar.cos(theta)
    F = ar.cosh(xi) - s
    total = _series(u.coeffs, _radial(u, xi) * _angular(u, s))
    return _as_result(F ** (ar.num(u.n) / 2) * total)


eval = evaluate  # noqa: A001 - operation name used throughout the docs


def eval_gradient(u: TruncatedEigenfunction, xi, theta):
    """``(du/dxi, du/dtheta)`` by term-wise differentiation of the series."""
    ar = u.arith
    xi, theta = np.broadcast_arrays(ar.array(np.asarray(xi)), ar.array(np.asarray(theta)))
    s = ar.cos(theta)
    sin_t = ar.sin(theta)
    F = ar.cosh(xi) - s
    half_n = ar.num(u.n) / 2
    R = _radial(u, xi)
    G = _angular(u, s)
    S = _series(u.coeffs, R * G)
    S_xi = _series(u.coeffs, _radial(u, xi, derivative=True) * G)
    S_s = _series(u.coeffs, R * _angular(u, s, derivative=True))
    Fp = F ** half_n
    Fm = F ** (half_n - 1)
    d_xi = half_n * Fm * ar.sinh(xi) * S + Fp * S_xi
    d_theta = half_n * Fm * sin_t * S - Fp * sin_t * S_s
    return _as_result(d_xi), _as_result(d_theta)


# ---------------------------------------------------------------------------
# boundary quantities and quotients

def boundary_normal_series(u: TruncatedEigenfunction) -> np.ndarray:
    """Coefficients ``D_0 .. D_m`` of the outward normal derivative on the outer sphere:

        du/dn = F^(n/2) * sum_k D_k G_k(cos theta),  F = cosh xi2 - cos theta.

    For ``k < m`` this reproduces ``sigma * C_k`` up to the eigenvector
    residual; ``D_m`` is the truncation defect.
    """
    ar = u.arith
    fr, n, m = u.frame, u.n, u.m
    C = list(u.coeffs) + [ar.num(0), ar.num(0)]
    c2 = [1 + coupling_c_squared_minus_one(fr, n, k) for k in range(m + 2)]
    out = ar.zeros(m + 1)
    for k in range(m + 1):
        val = diag_d(fr, n, k) * C[k] - (n + k) * c2[k + 1] * C[k + 1]
        if k:
            val = val - k * c2[k - 1] * C[k - 1]
        out[k] = val / (2 * fr.alpha)
    return out


def _product_matrix(table, rows: int, cols: int):
    """``M[p, q] = (I_{p+q} + I_{|p-q|}) / 2`` from the theta-integral table."""
    p = np.arange(rows)[:, None]
    q = np.arange(cols)[None, :]
    return (table[p + q] + table[np.abs(p - q)]) / 2


def rayleigh_quotient(u: TruncatedEigenfunction, rel_tol=None):
    """Rayleigh quotient of ``u`` with the numerator taken as a boundary
    integral (Green's identity).

    Both integrals reduce to cosine sums against the tabulated
    ``theta_integral(p, k=1)``; the constant angular and ``alpha`` factors cancel.
    """
    ar = u.arith
    lam = ar.num(u.n) / 2
    a = folded_cos_coefficients(lam, u.coeffs, ar)
    b = folded_cos_coefficients(lam, boundary_normal_series(u), ar)
    table = theta_integral_table(u.frame, u.n, 2 * u.m, 1, rel_tol)
    num = a.dot(_product_matrix(table, len(a), len(b)).dot(b))
    den = a.dot(_product_matrix(table, len(a), len(a)).dot(a))
    return num / den


def rayleigh_quotient_2d(u: TruncatedEigenfunction, rel_tol=None):
    """Rayleigh quotient with the gradient energy integrated over the
    ``(xi, theta)`` rectangle; an independent check on :func:`rayleigh_quotient`."""
    ar = u.arith
    fr, n = u.frame, u.n
    if rel_tol is None:
        rel_tol = max(default_tol(ar), ar.num(1e-11)) if not ar.is_extended else default_tol(ar)

    def energy(xi, theta):
        d_xi, d_theta = eval_gradient(u, xi, theta)
        return (d_xi ** 2 + d_theta ** 2) * ar.sin(theta) ** n / (ar.cosh(xi) - ar.cos(theta)) ** n

    def trace(theta):
        val = evaluate(u, fr.xi2, theta)
        return val ** 2 * ar.sin(theta) ** n / (fr.cosh_xi2 - ar.cos(theta)) ** (n + 1)

    split = [min(ar.pi / 8, 8 * fr.xi2)]
    num = integrate_2d(energy, (fr.xi2, fr.xi1), (0, ar.pi), rel_tol, arith=ar, y_breakpoints=split)
    den = integrate_1d(trace, 0, ar.pi, rel_tol, arith=ar, breakpoints=split)
    return num.value / (fr.alpha * den.value)


def validation_gap(frame: BisphericalFrame, n: int, m: int, sigma_ref, rel_tol=None):
    """``E_{m,N} = |sigma_ref - RQ(u_m)|`` for the first mode."""
    return abs(sigma_ref - rayleigh_quotient(truncated_eigenfunction(frame, n, m), rel_tol))
