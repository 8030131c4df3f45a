"""Gegenbauer (ultraspherical) polynomials in the unnormalised convention
``G_0 = 1``, ``G_1 = 2 lambda s``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .precision import BINARY64, Arith


def gegenbauer_table(lam, m_max: int, s) -> np.ndarray:
    """Evaluate ``G_0 ... G_{m_max}`` at ``s`` by the three-term recurrence.

    Returns an array of shape ``(m_max + 1,) + shape(s)``.  Works for float
    and object (mpf) inputs alike.
    """
    s = np.asarray(s)
    out = np.empty((m_max + 1,) + s.shape, dtype=s.dtype if s.dtype == object else float)
    out[0] = s * 0 + 1
    if m_max >= 1:
        out[1] = 2 * lam * s
    for m in range(2, m_max + 1):
        out[m] = (2 * (m + lam - 1) * s * out[m - 1] - (m + 2 * lam - 2) * out[m - 2]) / m
    return out


def gegenbauer_eval(lam, m: int, s):
    """``G_m^(lam)(s)``."""
    val = gegenbauer_table(lam, m, s)[m]
    return val[()] if isinstance(val, np.ndarray) and val.ndim == 0 else val


def gegenbauer_deriv(lam, m: int, s):
    """``d/ds G_m^(lam)(s) = 2 lam G_{m-1}^(lam+1)(s)``."""
    if m == 0:
        return np.asarray(s) * 0 if isinstance(s, np.ndarray) else 0 * s
    return 2 * lam * gegenbauer_eval(lam + 1, m - 1, s)


def rising_factorial_ratios(lam, k_max: int, arith: Arith = BINARY64) -> np.ndarray:
    """``lam^(k) / k!`` for ``k = 0 .. k_max``, built by ratio updates."""
    lam = arith.num(lam)
    out = arith.zeros(k_max + 1)
    out[0] = arith.num(1)
    for k in range(k_max):
        out[k + 1] = out[k] * (lam + k) / (k + 1)
    return out


@dataclass(frozen=True)
class CosExpansion:
    """``G_m^(lam)(cos theta) = sum coeff * cos(p theta)`` over the ``m + 1``
    frequencies ``p = m, m - 2, ..., -m``."""

    order: int
    terms: tuple

    def evaluate(self, theta, arith: Arith = BINARY64):
        total = 0
        for p, coeff in self.terms:
            total = total + coeff * arith.cos(p * theta)
        return total


def cos_expansion(lam, m: int, arith: Arith = BINARY64) -> CosExpansion:
    r = rising_factorial_ratios(lam, m, arith)
    return CosExpansion(m, tuple((m - 2 * k, r[k] * r[m - k]) for k in range(m + 1)))


def folded_cos_coefficients(lam, coeffs, arith: Arith = BINARY64) -> np.ndarray:
    """Cosine-series coefficients of ``sum_k coeffs[k] G_k^(lam)(cos theta)``.

    Returns ``a`` with ``sum_p a[p] cos(p theta)`` for ``p = 0 .. len(coeffs)-1``;
    the ``+p`` and ``-p`` terms of each expansion are merged.
    """
    m = len(coeffs)
    r = rising_factorial_ratios(lam, max(m - 1, 0), arith)
    out = arith.zeros(max(m, 1))
    for k in range(m):
        ck = coeffs[k]
        # term j has frequency |k - 2j|
        prod = r[: k + 1] * r[k::-1] * ck
        freqs = np.abs(k - 2 * np.arange(k + 1))
        np.add.at(out, freqs, prod)
    return out
