"""Smallest eigenpairs of symmetric tridiagonal matrices.

Eigenvalues come from bisection on the Sturm count of the pivot recurrence
(the LDL^T pivots of ``T - lam I``); eigenvectors from inverse iteration
started at the all-ones vector.  Both work unchanged in the extended
precision profile.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EigenSolverError
from .operator import TridiagonalMatrix

log = logging.getLogger(__name__)

MAX_INVERSE_ITERATIONS = 50


@dataclass(frozen=True)
class EigenPair:
    value: object
    vector: np.ndarray
    index: int  # 1-based rank among ascending eigenvalues


def _pivot_floor(T: TridiagonalMatrix):
    norm = T.norm_inf()
    return T.arith.eps * norm if norm != 0 else T.arith.eps


def sturm_count(T: TridiagonalMatrix, lam) -> int:
    """Number of eigenvalues of ``T`` strictly below ``lam``."""
    floor = _pivot_floor(T)
    a = T.diag.tolist()
    b2 = [x * x for x in T.offdiag.tolist()]
    lam = T.arith.num(lam)
    count = 0
    q = a[0] - lam
    for i in range(len(a)):
        if i:
            q = a[i] - lam - b2[i - 1] / q
        if abs(q) < floor:
            # keep the sign, drop the magnitude: standard tiny-pivot substitution
            q = -floor if q < 0 else floor
        if q < 0:
            count += 1
    return count


def gershgorin_bounds(T: TridiagonalMatrix):
    a = T.diag.tolist()
    r = [0 * x for x in a]
    for i, b in enumerate(T.offdiag.tolist()):
        r[i] += abs(b)
        r[i + 1] += abs(b)
    lo = min(x - y for x, y in zip(a, r))
    hi = max(x + y for x, y in zip(a, r))
    return lo, hi


def bisect_eigenvalue(T: TridiagonalMatrix, index: int, rel_tol, bracket=None):
    """Bracket the ``index``-th (0-based) eigenvalue to relative width ``rel_tol``.

    Returns ``(lo, hi)`` with ``sturm_count(lo) <= index < sturm_count(hi)``.
    """
    ar = T.arith
    lo, hi = bracket if bracket is not None else gershgorin_bounds(T)
    spread = max(abs(lo), abs(hi))
    pad = spread * ar.eps * 4 + _pivot_floor(T)
    lo, hi = lo - pad, hi + pad
    abs_floor = _pivot_floor(T) * ar.eps
    for _ in range(4 * int(-np.log2(float(ar.eps))) + 200):
        width = hi - lo
        if width <= rel_tol * max(abs(lo), abs(hi)) or width <= abs_floor:
            break
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        if sturm_count(T, mid) > index:
            hi = mid
        else:
            lo = mid
    return lo, hi


def eigenvector_inverse_iteration(T: TridiagonalMatrix, lam, componentwise: bool = False) -> np.ndarray:
    """Unit eigenvector for the eigenvalue closest to ``lam``.

    Solves ``(T - lam I) x = b`` by unpivoted elimination, starting from the
    all-ones vector.  The sign is fixed so the first nonzero entry is positive.

    With ``componentwise=True`` iteration continues past the residual test
    until every entry is stable to a few ulps, so exponentially small tail
    entries are resolved too.  Only meaningful when ``lam`` lies below the
    spectrum (then all iterates are sign-definite).
    """
    ar = T.arith
    N = T.size
    lam = ar.num(lam)
    a = [x - lam for x in T.diag.tolist()]
    b = T.offdiag.tolist()
    floor = _pivot_floor(T)
    # LDL^T-style factorisation of T - lam I with tiny-pivot substitution
    piv = [a[0]]
    mult = []
    for i in range(1, N):
        p = piv[-1]
        if abs(p) < floor:
            p = piv[-1] = -floor if p < 0 else floor
        mult.append(b[i - 1] / p)
        piv.append(a[i] - mult[-1] * b[i - 1])
    if abs(piv[-1]) < floor:
        piv[-1] = -floor if piv[-1] < 0 else floor

    tol = 64 * floor
    x = [ar.num(1)] * N
    resid_ok = False
    for _ in range(MAX_INVERSE_ITERATIONS):
        y = list(x)
        for i in range(1, N):
            y[i] = y[i] - mult[i - 1] * y[i - 1]
        y[N - 1] = y[N - 1] / piv[N - 1]
        for i in range(N - 2, -1, -1):
            y[i] = (y[i] - b[i] * y[i + 1]) / piv[i]
        scale = max(abs(v) for v in y)
        y = [v / scale for v in y]
        norm = ar.sqrt(sum(v * v for v in y))
        y = [v / norm for v in y]
        if y[0] * x[0] < 0:
            y = [-v for v in y]
        vec = ar.array(y)
        resid_ok = max(abs(r) for r in T.matvec(vec) - lam * vec) <= tol
        stable = not componentwise or all(
            abs(u - v) <= 16 * ar.eps * abs(u) for u, v in zip(y, x) if u != 0)
        x = y
        if resid_ok and stable:
            break
    else:
        if not resid_ok:
            raise EigenSolverError(
                f"inverse iteration did not converge in {MAX_INVERSE_ITERATIONS} steps")
        log.debug("componentwise refinement stopped at the iteration cap")
    first = next((v for v in x if v != 0), 1)
    if first < 0:
        vec = -vec
    return vec


def smallest_eigenvalues(T: TridiagonalMatrix, count: int = 1, rel_tol=None,
                         vectors: bool = True) -> list[EigenPair]:
    """The ``count`` smallest eigenpairs of ``T``, ascending."""
    ar = T.arith
    if not 1 <= count <= T.size:
        raise ValueError(f"count must be in [1, {T.size}], got {count}")
    if rel_tol is None:
        rel_tol = 4 * ar.eps
    if rel_tol < ar.eps:
        raise EigenSolverError(f"rel_tol={rel_tol} is below the unit roundoff {ar.eps}")
    rel_tol = max(ar.num(rel_tol), 4 * ar.eps)
    pairs = []
    lo0, hi0 = gershgorin_bounds(T)
    for index in range(count):
        lo, hi = bisect_eigenvalue(T, index, rel_tol, (lo0, hi0))
        value = (lo + hi) / 2
        vec = None
        if vectors:
            # below the first eigenvalue T - lo I is an M-matrix, so elimination
            # has no cancellation and every component keeps its relative accuracy
            vec = (eigenvector_inverse_iteration(T, lo, componentwise=True) if index == 0
                   else eigenvector_inverse_iteration(T, value))
        pairs.append(EigenPair(value, vec, index + 1))
        lo0 = lo
    return pairs
