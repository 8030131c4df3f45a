"""Finite sections of the Dirichlet-to-Neumann operator on the outer sphere.

In the orthonormalised Gegenbauer basis the operator is symmetric
tridiagonal; its leading ``N x N`` block is

    L_N = (diag(d_0, ..., d_{N-1}) - T_N) / (2 alpha)

with ``T_N`` carrying ``w_k c_{k-1} c_k`` on the off-diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BisphericalFrame
from .precision import BINARY64, Arith


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix; ``offdiag[i]`` couples rows i and i+1."""

    diag: np.ndarray
    offdiag: np.ndarray
    arith: Arith = field(default=BINARY64, repr=False)

    def __post_init__(self):
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must have exactly len(diag) - 1 entries")
        for arr in (self.diag, self.offdiag):
            arr.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.diag)

    def leading(self, k: int) -> "TridiagonalMatrix":
        return TridiagonalMatrix(self.diag[:k].copy(), self.offdiag[: max(k - 1, 0)].copy(), self.arith)

    def norm_inf(self):
        rows = [abs(x) for x in self.diag]
        for i, b in enumerate(self.offdiag):
            rows[i] = rows[i] + abs(b)
            rows[i + 1] = rows[i + 1] + abs(b)
        return max(rows)

    def matvec(self, v) -> np.ndarray:
        out = self.diag * v
        out[:-1] = out[:-1] + self.offdiag * v[1:]
        out[1:] = out[1:] + self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        """Float copy as a dense array (for oracles and debugging)."""
        a = np.diag(np.asarray(self.diag, dtype=float))
        b = np.asarray(self.offdiag, dtype=float)
        return a + np.diag(b, 1) + np.diag(b, -1)


def _half_index(frame: BisphericalFrame, n: int, m):
    return (m + frame.arith.num(n) / 2) * (frame.xi1 - frame.xi2)


def coupling_c_squared_minus_one(frame: BisphericalFrame, n: int, m: int):
    """``c_m^2 - 1 = coth(x) - 1 = 2 e^{-2x} / (1 - e^{-2x})``, free of
    cancellation and of overflow for large ``m``."""
    ar = frame.arith
    two_x = 2 * _half_index(frame, n, m)
    return -2 * ar.exp(-two_x) / ar.expm1(-two_x)


def coupling_c(frame: BisphericalFrame, n: int, m: int):
    """``c_m = tanh((m + n/2)(xi1 - xi2))^(-1/2)``; decreases to 1 in ``m``."""
    return frame.arith.sqrt(1 + coupling_c_squared_minus_one(frame, n, m))


def diag_d(frame: BisphericalFrame, n: int, k: int):
    """``d_k = (n + 2k) c_k^2 cosh xi2 - n sinh xi2``.

    Evaluated as ``2k c_k^2 cosh xi2 + n((c_k^2 - 1) cosh xi2 + e^{-xi2})``,
    which is the same number without the cosh/sinh cancellation at small t.
    """
    ar = frame.arith
    c2m1 = coupling_c_squared_minus_one(frame, n, k)
    cosh2 = frame.cosh_xi2
    return 2 * k * (1 + c2m1) * cosh2 + n * (c2m1 * cosh2 + ar.exp(-frame.xi2))


def offdiag_w(n: int, k: int, arith: Arith = BINARY64):
    """``w_k = sqrt((k + n - 1) k)``."""
    return arith.sqrt(arith.num((k + n - 1) * k))


def assemble(frame: BisphericalFrame, n: int, N: int) -> TridiagonalMatrix:
    """Finite section ``L_N`` of size ``N`` for the shell in R^(n+2)."""
    if N < 1:
        raise ValueError(f"truncation size must be >= 1, got {N}")
    ar = frame.arith
    two_alpha = 2 * frame.alpha
    c = [coupling_c(frame, n, k) for k in range(N)]
    diag = ar.array([diag_d(frame, n, k) / two_alpha for k in range(N)])
    off = ar.array([-offdiag_w(n, k, ar) * c[k - 1] * c[k] / two_alpha for k in range(1, N)])
    return TridiagonalMatrix(diag, off, ar)
