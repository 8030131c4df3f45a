"""Adaptive Gauss-Kronrod quadrature and the reduced theta-integrals.

The Gauss-Kronrod rules are generated at the working precision (Gauss nodes
as Legendre roots, Kronrod nodes as roots of the Stieltjes polynomial,
weights from the moment equations), so the same
integrator serves binary64 and the extended profile.

Integrands are vectorised: ``f(x)`` receives an array of nodes and returns
either an array of the same length or an array of shape ``(len(x), M)`` for
``M`` simultaneous integrands.
"""

from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np

from .errors import QuadratureError
from .geometry import BisphericalFrame
from .precision import BINARY64, Arith, get_arith

DEFAULT_TOL = {"binary64": 1e-13, "extended": 1e-28}
GAUSS_ORDER = {"binary64": 10, "extended": 20}
MAX_INTERVALS = 20000


@dataclass(frozen=True)
class QuadResult:
    value: object
    est_error: object
    evaluations: int


def default_tol(arith: Arith):
    return arith.num(DEFAULT_TOL[arith.name])


# ---------------------------------------------------------------------------
# rule construction

def _legendre_coeffs(n: int) -> list[Fraction]:
    """Monomial coefficients of P_n, lowest degree first."""
    p0, p1 = [Fraction(1)], [Fraction(0), Fraction(1)]
    if n == 0:
        return p0
    for k in range(1, n):
        nxt = [Fraction(0)] * (k + 2)
        for i, c in enumerate(p1):
            nxt[i + 1] += Fraction(2 * k + 1, k + 1) * c
        for i, c in enumerate(p0):
            nxt[i] -= Fraction(k, k + 1) * c
        p0, p1 = p1, nxt
    return p1


def _moment(j: int) -> Fraction:
    return Fraction(0) if j % 2 else Fraction(2, j + 1)


def _stieltjes_coeffs(n: int) -> list[Fraction]:
    """Monic E_{n+1} orthogonal to x^k P_n for k = 0..n."""
    pn = _legendre_coeffs(n)
    deg = n + 1
    free = [deg - 2 * j for j in range(1, deg // 2 + 1)]
    rows = [k for k in range(n + 1) if (k + n + deg) % 2 == 0]
    assert len(rows) == len(free)

    def inner(power, k):
        return sum(c * _moment(i + power + k) for i, c in enumerate(pn))

    A = [[inner(p, k) for p in free] for k in rows]
    rhs = [-inner(deg, k) for k in rows]
    # exact Gaussian elimination over the rationals
    size = len(rows)
    for col in range(size):
        piv = next(r for r in range(col, size) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for r in range(size):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                rhs[r] -= f * rhs[col]
    coeffs = [Fraction(0)] * (deg + 1)
    coeffs[deg] = Fraction(1)
    for i, p in enumerate(free):
        coeffs[p] = rhs[i] / A[i][i]
    return coeffs


def _real_roots(ctx, coeffs):
    mono = [ctx.mpf(c.numerator) / c.denominator for c in reversed(coeffs)]
    deriv = [c * (len(mono) - 1 - i) for i, c in enumerate(mono[:-1])]
    roots = ctx.polyroots(mono, maxsteps=400, extraprec=4 * ctx.prec)
    out = []
    for r in roots:
        x = ctx.re(r)
        for _ in range(100):  # polish; the roots are simple
            step = ctx.polyval(mono, x) / ctx.polyval(deriv, x)
            x -= step
            if abs(step) <= ctx.eps * 4:
                break
        out.append(x)
    return out


@lru_cache(maxsize=None)
def _kronrod_rule(n: int, dps: int):
    """Nodes, Kronrod weights and embedded Gauss weights on [-1, 1] as mpf."""
    ctx = mpmath.MPContext()
    ctx.dps = dps + 20

    def poly(coeffs, x):
        return ctx.polyval([ctx.mpf(c.numerator) / c.denominator for c in reversed(coeffs)], x)

    pn = _legendre_coeffs(n)
    dpn = [i * c for i, c in enumerate(pn)][1:]
    gauss = _real_roots(ctx, pn)
    en = _stieltjes_coeffs(n)
    kron = _real_roots(ctx, en)
    nodes = sorted(gauss + kron)
    size = len(nodes)
    V = ctx.matrix(size, size)
    for j in range(size):
        for i, x in enumerate(nodes):
            V[j, i] = x ** j
    mom = ctx.matrix([ctx.mpf(_moment(j).numerator) / _moment(j).denominator for j in range(size)])
    wk = ctx.lu_solve(V, mom)
    wg = []
    for x in nodes:
        if any(abs(x - g) < ctx.mpf(10) ** (-dps) for g in gauss):
            wg.append(2 / ((1 - x * x) * poly(dpn, x) ** 2))
        else:
            wg.append(ctx.mpf(0))
    return nodes, [wk[i] for i in range(size)], wg


@lru_cache(maxsize=None)
def gauss_kronrod(arith_name: str, n: int | None = None):
    """``(nodes, kronrod_weights, gauss_weights)`` arrays in the profile."""
    arith = get_arith(arith_name)
    n = GAUSS_ORDER[arith.name] if n is None else n
    dps = 20 if arith.dtype is float else arith.ctx.dps
    nodes, wk, wg = _kronrod_rule(n, dps)
    conv = (lambda v: float(v)) if arith.dtype is float else (lambda v: arith.num(str(v)))
    return (arith.array([conv(x) for x in nodes]), arith.array([conv(x) for x in wk]),
            arith.array([conv(x) for x in wg]))


# ---------------------------------------------------------------------------
# adaptive integration

def _norm(v):
    a = np.abs(np.asarray(v))
    return a.max() if a.size else 0


class _Panel:
    __slots__ = ("a", "b", "value", "err", "frozen")

    def __init__(self, a, b, value, err, frozen):
        self.a, self.b, self.value, self.err, self.frozen = a, b, value, err, frozen

    def key(self):
        # frozen panels sort last; among the rest, largest error first
        return (self.frozen, -float(self.err))


def integrate_1d(f: Callable, a, b, rel_tol=None, abs_tol=0, arith: Arith | str = BINARY64,
                 breakpoints=(), max_intervals: int = MAX_INTERVALS) -> QuadResult:
    """Globally adaptive Gauss-Kronrod integration of ``f`` over ``[a, b]``.

    Stops when the summed ``|K - G|`` estimate is at most
    ``max(abs_tol, rel_tol * |value|)`` (max-norm for vector integrands).
    Panels whose estimate is already at roundoff level are not split; their
    contribution to ``est_error`` is the roundoff bound.

    Raises
    ------
    QuadratureError
        When ``max_intervals`` panels do not suffice; ``.result`` carries the
        best estimate.
    """
    ar = get_arith(arith)
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    rel_tol = default_tol(ar) if rel_tol is None else ar.num(rel_tol)
    abs_tol = ar.num(abs_tol)
    x, wk, wg = gauss_kronrod(ar.name)
    evaluations = 0
    roundoff = 50 * ar.eps

    def panel(lo, hi):
        nonlocal evaluations
        half = (hi - lo) / 2
        mid = (hi + lo) / 2
        fx = np.asarray(f(mid + half * x))
        evaluations += len(x)
        wkv = wk.reshape((-1,) + (1,) * (fx.ndim - 1))
        wgv = wg.reshape((-1,) + (1,) * (fx.ndim - 1))
        k = (wkv * fx).sum(axis=0) * half
        g = (wgv * fx).sum(axis=0) * half
        resabs = (wkv * np.abs(fx)).sum(axis=0) * abs(half)
        err = _norm(k - g)
        floor = roundoff * _norm(resabs)
        return _Panel(lo, hi, k, max(err, floor), bool(err <= floor))

    cuts = sorted({ar.num(a), ar.num(b)} | {ar.num(p) for p in breakpoints if a < p < b})
    panels = [panel(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:])]
    heap = [(p.key(), i, p) for i, p in enumerate(panels)]
    heapq.heapify(heap)
    counter = len(heap)
    total = sum((p.value for p in panels[1:]), panels[0].value)
    total_err = sum((p.err for p in panels[1:]), panels[0].err)

    while True:
        tol = max(abs_tol, rel_tol * _norm(total))
        if total_err <= tol or heap[0][2].frozen:
            return QuadResult(total, total_err, evaluations)
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"adaptive quadrature hit {max_intervals} panels with error {float(total_err):.3g} "
                f"> tolerance {float(tol):.3g}", QuadResult(total, total_err, evaluations))
        _, _, worst = heapq.heappop(heap)
        mid = (worst.a + worst.b) / 2
        left, right = panel(worst.a, mid), panel(mid, worst.b)
        total = total - worst.value + left.value + right.value
        total_err = total_err - worst.err + left.err + right.err
        for p in (left, right):
            heapq.heappush(heap, (p.key(), counter, p))
            counter += 1


def integrate_2d(f: Callable, x_range, y_range, rel_tol=None, arith: Arith | str = BINARY64,
                 y_breakpoints=()) -> QuadResult:
    """Nested adaptive integration of ``f(x, y_array)`` over a rectangle.

    The outer variable is ``x``; each outer node triggers an inner adaptive
    integral in ``y`` at a quarter of the outer tolerance.
    """
    ar = get_arith(arith)
    rel_tol = default_tol(ar) if rel_tol is None else ar.num(rel_tol)
    inner_evals = 0

    def outer(xs):
        nonlocal inner_evals
        out = []
        for xv in xs:
            res = integrate_1d(lambda ys: f(xv, ys), y_range[0], y_range[1], rel_tol / 4,
                               arith=ar, breakpoints=y_breakpoints)
            inner_evals += res.evaluations
            out.append(res.value)
        return ar.array(out)

    res = integrate_1d(outer, x_range[0], x_range[1], rel_tol / 2, arith=ar)
    return QuadResult(res.value, res.est_error, inner_evals)


# ---------------------------------------------------------------------------
# theta-integrals  int_0^pi sin^n(t) cos(p t) / (cosh xi2 - cos t)^k dt

def _theta_breakpoints(frame: BisphericalFrame, p_max: int):
    ar = frame.arith
    split = min(ar.pi / 8, 8 * frame.xi2)
    pieces = max(1, -(-p_max // 4))
    step = (ar.pi - split) / pieces
    near = max(1, -(-p_max // 16))
    return ([split * i / near for i in range(1, near)] + [split]
            + [split + step * i for i in range(1, pieces)])


def _cos_multiples(t, cos_t, freqs):
    """Columns ``cos(p t)`` for ``p`` in ``freqs``, shape ``(len(t), len(freqs))``."""
    if t.dtype != object:
        return np.cos(np.outer(t, freqs))
    # Chebyshev recurrence: one multiply-add per frequency instead of a cosine
    rows = [cos_t * 0 + 1, cos_t]
    for _ in range(2, max(freqs) + 1):
        rows.append(2 * cos_t * rows[-1] - rows[-2])
    return np.stack([rows[p] for p in freqs], axis=1)


def _theta_integrand(frame: BisphericalFrame, n: int, k: int, freqs):
    ar = frame.arith
    c = frame.cosh_xi2
    freqs = [0] + list(freqs)

    def f(t):
        cos_t = ar.cos(t)
        weight = ar.sin(t) ** n / (c - cos_t) ** k
        return weight[:, None] * _cos_multiples(t, cos_t, freqs)
    return f


def theta_integral(frame: BisphericalFrame, n: int, p: int, k: int, rel_tol=None):
    """``int_0^pi sin^n t cos(p t) / (cosh xi2 - cos t)^k dt`` for ``k`` in {1, 2}.

    Accurate to ``rel_tol`` relative to the weight mass (the ``p = 0``
    value), which bounds ``|value|`` for every ``p``.
    """
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    p = abs(int(p))
    ar = frame.arith
    res = integrate_1d(_theta_integrand(frame, n, k, [p]), 0, ar.pi, rel_tol, arith=ar,
                       breakpoints=_theta_breakpoints(frame, p))
    return res.value[1]


_TABLE_CACHE: dict = {}
_TABLE_LOCK = threading.Lock()


def theta_integral_table(frame: BisphericalFrame, n: int, p_max: int, k: int = 1,
                         rel_tol=None) -> np.ndarray:
    """All theta-integrals for ``p = 0 .. p_max`` from a single adaptive pass.

    Results are cached per ``(frame, n, k, tolerance)``; a cached table is
    reused when it already reaches ``p_max``.
    """
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    ar = frame.arith
    tol = default_tol(ar) if rel_tol is None else ar.num(rel_tol)
    key = (frame, n, k, tol)
    with _TABLE_LOCK:
        cached = _TABLE_CACHE.get(key)
    if cached is not None and len(cached) > p_max:
        return cached[: p_max + 1]
    # round up so neighbouring requests share one pass
    p_top = max(8, 1 << (p_max - 1).bit_length())
    res = integrate_1d(_theta_integrand(frame, n, k, range(p_top + 1)), 0, ar.pi, tol,
                       arith=ar, breakpoints=_theta_breakpoints(frame, p_top))
    table = np.asarray(res.value)[1:]
    table.setflags(write=False)
    with _TABLE_LOCK:
        _TABLE_CACHE[key] = table
    return table[: p_max + 1]


def clear_theta_cache() -> None:
    with _TABLE_LOCK:
        _TABLE_CACHE.clear()
