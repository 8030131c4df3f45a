"""Scalar arithmetic profiles.

Every numeric routine in the package takes an :class:`Arith` and does its
elementary operations through it, so the same code runs in IEEE binary64 and
in an extended-precision profile backed by an isolated mpmath context.

Array-valued inputs are numpy arrays: ``float64`` for binary64 and ``object``
arrays of ``mpf`` for the extended profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import mpmath
import numpy as np

EXTENDED_DPS = 36


@dataclass(frozen=True)
class Arith:
    """Bundle of scalar/array operations for one floating-point format."""

    name: str
    eps: Any
    digits: int
    num: Callable[[Any], Any]
    sqrt: Callable
    exp: Callable
    expm1: Callable
    log: Callable
    sinh: Callable
    cosh: Callable
    tanh: Callable
    asinh: Callable
    sin: Callable
    cos: Callable
    atan2: Callable
    pi: Any
    dtype: Any
    ctx: Any = field(default=None, repr=False, compare=False)

    @property
    def is_extended(self) -> bool:
        return self.name == "extended"

    def array(self, values) -> np.ndarray:
        """Convert a sequence (or array) of numbers into this profile."""
        if self.dtype is float:
            return np.asarray(values, dtype=float)
        flat = np.asarray(values, dtype=object)
        out = np.empty(flat.shape, dtype=object)
        for idx, v in np.ndenumerate(flat):
            out[idx] = self.num(v)
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is float:
            return np.zeros(shape)
        out = np.empty(shape, dtype=object)
        out.fill(self.num(0))
        return out

    def linspace(self, a, b, count: int) -> np.ndarray:
        a, b = self.num(a), self.num(b)
        if count == 1:
            return self.array([a])
        step = (b - a) / (count - 1)
        return self.array([a + i * step for i in range(count)])

    def fmt(self, x) -> str:
        """Format a scalar with the profile's significant-digit count."""
        if x is None:
            return ""
        if self.dtype is float:
            return f"{float(x):.{self.digits}g}"
        return mpmath.nstr(self.num(x), self.digits, strip_zeros=False,
                           min_fixed=-5, max_fixed=self.digits)


def _decimal(ctx):
    def convert(x):
        # floats go through repr so 0.2 means the decimal 0.2, not its binary neighbour
        if isinstance(x, (float, np.floating)):
            return ctx.mpf(repr(float(x)))
        if isinstance(x, (int, np.integer)):
            return ctx.mpf(int(x))
        return ctx.mpf(x)
    return convert


def _lift(fn):
    vec = np.frompyfunc(fn, 1, 1)

    def apply(x):
        if isinstance(x, np.ndarray):
            return vec(x)
        return fn(x)
    return apply


def _lift2(fn):
    vec = np.frompyfunc(fn, 2, 1)

    def apply(y, x):
        if isinstance(y, np.ndarray) or isinstance(x, np.ndarray):
            return vec(y, x)
        return fn(y, x)
    return apply


BINARY64 = Arith(
    name="binary64",
    eps=float(np.finfo(float).eps) / 2,
    digits=15,
    num=float,
    sqrt=np.sqrt,
    exp=np.exp,
    expm1=np.expm1,
    log=np.log,
    sinh=np.sinh,
    cosh=np.cosh,
    tanh=np.tanh,
    asinh=np.arcsinh,
    sin=np.sin,
    cos=np.cos,
    atan2=np.arctan2,
    pi=math.pi,
    dtype=float,
)


def _make_extended(dps: int = EXTENDED_DPS) -> Arith:
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return Arith(
        name="extended",
        eps=ctx.mpf(2) ** (-ctx.prec),
        digits=30,
        num=_decimal(ctx),
        sqrt=_lift(ctx.sqrt),
        exp=_lift(ctx.exp),
        expm1=_lift(ctx.expm1),
        log=_lift(ctx.log),
        sinh=_lift(ctx.sinh),
        cosh=_lift(ctx.cosh),
        tanh=_lift(ctx.tanh),
        asinh=_lift(ctx.asinh),
        sin=_lift(ctx.sin),
        cos=_lift(ctx.cos),
        atan2=_lift2(ctx.atan2),
        pi=+ctx.pi,
        dtype=object,
        ctx=ctx,
    )


EXTENDED = _make_extended()

PROFILES = {"binary64": BINARY64, "extended": EXTENDED}


def get_arith(precision: str | Arith) -> Arith:
    """Look up a profile by tag (``"binary64"`` or ``"extended"``)."""
    if isinstance(precision, Arith):
        return precision
    try:
        return PROFILES[precision]
    except KeyError:
        raise ValueError(f"unknown precision {precision!r}; "
                         f"expected one of {sorted(PROFILES)}") from None
