"""Eccentric spherical shells and their bispherical coordinate frame.

The shell is ``B2 \\ closure(B1)`` in R^(n+2).  Both boundary spheres are
level sets of the bispherical coordinate ``xi``: the inner sphere is
``xi = xi1`` and the outer sphere is ``xi = xi2`` with ``xi1 > xi2 > 0``.
The outer sphere is centred at ``(t0, 0, ..., 0)`` and the inner one at
``(t0 - t, 0, ..., 0)`` in the frame's Cartesian coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateFrameError, GeometryError, TouchingBoundariesError
from .precision import BINARY64, Arith, get_arith


@dataclass(frozen=True)
class ShellConfig:
    """Physical problem: dimension parameter ``n`` (space is R^(n+2)),
    inner radius ``r1``, outer radius ``r2`` and centre offset ``t``."""

    n: int
    r1: float
    r2: float
    t: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GeometryError(f"n must be a positive integer, got {self.n!r}")
        if not (0 < self.r1 < self.r2):
            raise GeometryError(f"need 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.t < 0:
            raise GeometryError(f"t must be nonnegative, got {self.t}")
        if self.t >= self.r2 - self.r1:
            raise TouchingBoundariesError(
                f"boundaries touch: t={self.t} >= r2 - r1={self.r2 - self.r1}")

    @classmethod
    def from_ratio(cls, n: int, r1: float, r2: float, t_ratio: float) -> "ShellConfig":
        """Build a config from ``t_ratio = t / (r2 - r1)``."""
        if t_ratio >= 1:
            raise TouchingBoundariesError(f"boundaries touch: t_ratio={t_ratio} >= 1")
        return cls(n, r1, r2, t_ratio * (r2 - r1))

    @property
    def t_ratio(self) -> float:
        return self.t / (self.r2 - self.r1)


@dataclass(frozen=True)
class BisphericalFrame:
    """Coordinate scale ``alpha``, boundary levels ``xi1 > xi2 > 0`` and the
    x1-position ``t0`` of the outer centre.  Scalars live in ``arith``."""

    alpha: object
    xi1: object
    xi2: object
    t0: object
    arith: Arith = field(default=BINARY64, repr=False)

    @property
    def cosh_xi2(self):
        return self.arith.cosh(self.xi2)

    @property
    def sinh_xi2(self):
        return self.arith.sinh(self.xi2)


@dataclass(frozen=True)
class BisphericalPoint:
    """A point ``(xi, theta, phi_1, ..., phi_n)``."""

    xi: float
    theta: float
    phis: Sequence[float] = ()

    def __post_init__(self):
        if not 0 <= self.theta <= math.pi:
            raise GeometryError(f"theta must lie in [0, pi], got {self.theta}")
        phis = list(self.phis)
        for phi in phis[:-1]:
            if not 0 <= phi <= math.pi:
                raise GeometryError(f"inner angles must lie in [0, pi], got {phi}")
        if phis and not 0 <= phis[-1] < 2 * math.pi:
            raise GeometryError(f"last angle must lie in [0, 2pi), got {phis[-1]}")


def derive_frame(cfg: ShellConfig, arith: Arith | str = BINARY64) -> BisphericalFrame:
    """Bispherical frame in which the shell boundaries are ``xi``-level sets.

    Raises
    ------
    DegenerateFrameError
        For the concentric case ``t = 0`` (``alpha`` diverges).
    TouchingBoundariesError
        For ``t >= r2 - r1``.
    """
    ar = get_arith(arith)
    if cfg.t == 0:
        raise DegenerateFrameError("t = 0 has no bispherical frame; use the concentric closed form")
    if cfg.t >= cfg.r2 - cfg.r1:
        raise TouchingBoundariesError(f"boundaries touch: t={cfg.t} >= r2 - r1")
    r1, r2, t = ar.num(cfg.r1), ar.num(cfg.r2), ar.num(cfg.t)
    alpha = ar.sqrt(((r2 + r1) ** 2 - t ** 2) * ((r2 - r1) ** 2 - t ** 2)) / (2 * t)
    xi1 = ar.asinh(alpha / r1)
    xi2 = ar.asinh(alpha / r2)
    t0 = alpha * ar.cosh(xi2) / ar.sinh(xi2)
    return BisphericalFrame(alpha, xi1, xi2, t0, ar)


def _denominator(arith, xi, theta):
    return arith.cosh(xi) - arith.cos(theta)


def scale_factor(frame: BisphericalFrame, xi, theta):
    """Metric scale factor ``h = alpha / (cosh xi - cos theta)``."""
    ar = frame.arith
    den = _denominator(ar, xi, theta)
    if np.any(np.asarray(den) <= np.finfo(float).tiny):
        raise GeometryError("scale factor undefined at the degenerate point xi = 0, theta = 0")
    return frame.alpha / den


def to_cartesian(frame: BisphericalFrame, p: BisphericalPoint) -> np.ndarray:
    """Map a bispherical point to Cartesian coordinates in R^(n+2)."""
    ar = frame.arith
    phis = list(p.phis)
    if not phis:
        raise GeometryError("need at least one angle phi_1 (n >= 1)")
    den = _denominator(ar, p.xi, p.theta)
    if den <= 0:
        raise GeometryError("degenerate point xi = 0, theta = 0")
    radial = frame.alpha * ar.sin(p.theta) / den
    coords = [frame.alpha * ar.sinh(p.xi) / den,
              radial * ar.cos(phis[0]), radial * ar.sin(phis[0])]
    for phi in phis[1:]:
        last = coords.pop()
        coords.extend([last * ar.cos(phi), last * ar.sin(phi)])
    return np.array(coords, dtype=ar.dtype)


def from_cartesian_axisym(frame: BisphericalFrame, x1, rho):
    """Recover ``(xi, theta)`` from the axial coordinate ``x1`` and the
    distance ``rho >= 0`` to the x1-axis."""
    ar = frame.arith
    a = frame.alpha
    near = (x1 - a) ** 2 + rho ** 2
    far = (x1 + a) ** 2 + rho ** 2
    if np.any(np.asarray(near) == 0) or np.any(np.asarray(far) == 0):
        raise GeometryError("bispherical coordinates are singular at the foci (+-alpha, 0)")
    xi = ar.log(far / near) / 2
    theta = ar.atan2(2 * a * rho, x1 ** 2 + rho ** 2 - a ** 2)
    return xi, theta


def axisym_volume_weight(frame: BisphericalFrame, n: int, xi, theta):
    """Volume Jacobian with the azimuthal angle factors stripped:
    ``alpha^(n+2) sin^n(theta) / (cosh xi - cos theta)^(n+2)``."""
    ar = frame.arith
    return frame.alpha ** (n + 2) * ar.sin(theta) ** n / _denominator(ar, xi, theta) ** (n + 2)


def surface_weight(frame: BisphericalFrame, n: int, theta):
    """Surface element on the outer sphere, azimuthal factors stripped:
    ``alpha^(n+1) sin^n(theta) / (cosh xi2 - cos theta)^(n+1)``."""
    ar = frame.arith
    return frame.alpha ** (n + 1) * ar.sin(theta) ** n / (frame.cosh_xi2 - ar.cos(theta)) ** (n + 1)


def wallis(k: int) -> float:
    """``int_0^pi sin^k(phi) dphi``."""
    w = math.pi if k % 2 == 0 else 2.0
    for j in range(k % 2 + 2, k + 1, 2):
        w *= (j - 1) / j
    return w


def angular_constant(n: int) -> float:
    """Integral of the stripped angular factors over phi_1 ... phi_n.

    Never needed for eigenvalues (it cancels in every ratio); used for
    sanity checks against closed-form sphere areas.
    """
    const = 2 * math.pi
    for j in range(1, n):
        const *= wallis(n - j)
    return const
