"""Two-step computation protocol, closed-form references and sweeps.

Step 1 doubles the truncation size ``N = 2^k`` until the relative change
``eta_k = |sigma_{N/2} - sigma_N| / sigma_N`` drops below a tolerance.
Step 2 certifies the converged value with the gap ``E_{m,N}`` between it and
the Rayleigh quotient of the ``m``-term eigenfunction.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import SteklovError
from .geometry import ShellConfig, derive_frame
from .operator import assemble
from .precision import BINARY64, Arith, get_arith
from .rayleigh import validation_gap
from .trideig import bisect_eigenvalue, gershgorin_bounds

log = logging.getLogger(__name__)

DEFAULT_ETA_TOL = 1e-12
DEFAULT_K_MAX = 12
DEFAULT_CERT_TOL = {"binary64": 1e-9, "extended": 1e-12}
HIGHER_MODE_LABEL = "axisymmetric-restricted"

# t_ratio -> the two k values listed for it (same for n = 1, 2), r1 = 1, r2 = 3
TABLE1_LAYOUT = {0.2: (4, 5), 0.4: (4, 5), 0.6: (5, 6), 0.8: (6, 7), 0.98: (8, 9)}
TABLE1_REFERENCE = {
    (1, 0.2, 4): 3.31462e-11, (1, 0.2, 5): 9.03987e-24,
    (1, 0.4, 4): 1.54664e-06, (1, 0.4, 5): 3.02385e-14,
    (1, 0.6, 5): 1.16885e-08, (1, 0.6, 6): 8.26812e-19,
    (1, 0.8, 6): 3.78168e-10, (1, 0.8, 7): 5.78756e-22,
    (1, 0.98, 8): 8.13368e-11, (1, 0.98, 9): 2.03221e-23,
    (2, 0.2, 4): 8.73447e-11, (2, 0.2, 5): 3.20532e-23,
    (2, 0.4, 4): 4.99850e-06, (2, 0.4, 5): 1.37935e-13,
    (2, 0.6, 5): 6.48547e-08, (2, 0.6, 6): 7.01700e-18,
    (2, 0.8, 6): 3.45133e-09, (2, 0.8, 7): 8.56115e-21,
    (2, 0.98, 8): 1.17712e-09, (2, 0.98, 9): 4.98230e-22,
}


# ---------------------------------------------------------------------------
# closed forms

def _check_radii(r1, r2):
    if not 0 < r1 < r2:
        raise ValueError(f"need 0 < r1 < r2, got r1={r1}, r2={r2}")


def concentric_exact(n: int, r1, r2, arith: Arith | str = BINARY64):
    """First eigenvalue of the concentric shell, ``n r1^n / (r2 (r2^n - r1^n))``."""
    _check_radii(r1, r2)
    ar = get_arith(arith)
    r1, r2 = ar.num(r1), ar.num(r2)
    return n * r1 ** n / (r2 * (r2 ** n - r1 ** n))


class LowerBound(NamedTuple):
    value: float
    informative: bool


def eccentric_lower_bound(n: int, r1, r2, arith: Arith | str = BINARY64) -> LowerBound:
    """Limit lower bound ``((n+1) r1 - n r2) / (2 r2 (r2 - r1))`` as the
    boundaries approach contact; uninformative when not positive."""
    _check_radii(r1, r2)
    ar = get_arith(arith)
    r1, r2 = ar.num(r1), ar.num(r2)
    value = ((n + 1) * r1 - n * r2) / (2 * r2 * (r2 - r1))
    return LowerBound(value, bool(value > 0))


# ---------------------------------------------------------------------------
# step 1

@dataclass(frozen=True)
class ConvergenceStep:
    k: int
    N: int
    sigma: object
    eta: object


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of the doubling loop.

    ``status`` is ``"converged"`` (eta below tolerance), ``"floor"`` (eta
    stalled at the arithmetic's noise level above the tolerance) or
    ``"max_k"`` (ran out of doublings).
    """

    config: ShellConfig
    rank: int
    records: tuple
    final_N: int
    converged: bool
    status: str
    eta_tol: float
    precision: str

    @property
    def sigma(self):
        return self.records[-1].sigma

    @property
    def eta_final(self):
        return self.records[-1].eta


def _sigma_at(frame, n: int, N: int, rank: int, upper=None):
    """``rank``-th smallest eigenvalue of the ``N x N`` section."""
    T = assemble(frame, n, N)
    ar = frame.arith
    lo, hi = gershgorin_bounds(T)
    if upper is not None:
        # interlacing: the eigenvalue can only drop as N grows
        hi = min(hi, upper + abs(upper) * 64 * ar.eps)
    lo, hi = bisect_eigenvalue(T, rank - 1, 4 * ar.eps, (lo, hi))
    return (lo + hi) / 2


def _start_k(rank: int) -> int:
    k = 1
    while 2 ** (k - 1) < rank:
        k += 1
    return k


def eta_noise_floor(arith: Arith):
    """Smallest eta distinguishable from rounding noise in the eigenvalue."""
    return 64 * arith.eps


def converge_sigma(cfg: ShellConfig, rank: int = 1, eta_tol=DEFAULT_ETA_TOL,
                   k_max: int = DEFAULT_K_MAX, arith: Arith | str = BINARY64) -> ConvergenceReport:
    """Double ``N`` from ``2^(k0-1)`` until ``eta_k < eta_tol`` or ``k = k_max``."""
    ar = get_arith(arith)
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    if not eta_tol > 0:
        raise ValueError(f"eta_tol must be positive, got {eta_tol}")
    frame = derive_frame(cfg, ar)
    k = _start_k(rank)
    if k > k_max:
        raise ValueError(f"k_max={k_max} too small for rank {rank}")
    prev = _sigma_at(frame, cfg.n, 2 ** (k - 1), rank)
    records = []
    status = "max_k"
    tol = ar.num(eta_tol)
    for k in range(k, k_max + 1):
        N = 2 ** k
        sigma = _sigma_at(frame, cfg.n, N, rank, upper=prev)
        eta = abs((prev - sigma) / sigma)
        records.append(ConvergenceStep(k, N, sigma, eta))
        log.debug("k=%d N=%d sigma=%s eta=%s", k, N, sigma, eta)
        if eta < tol:
            status = "converged"
            break
        if eta <= eta_noise_floor(ar):
            status = "floor"
            break
        prev = sigma
    return ConvergenceReport(cfg, rank, tuple(records), records[-1].N, status == "converged",
                             status, float(eta_tol), ar.name)


def eta_at(cfg: ShellConfig, k: int, rank: int = 1, arith: Arith | str = BINARY64):
    """``eta_k`` for one ``k`` without running the whole loop."""
    ar = get_arith(arith)
    frame = derive_frame(cfg, ar)
    prev = _sigma_at(frame, cfg.n, 2 ** (k - 1), rank)
    sigma = _sigma_at(frame, cfg.n, 2 ** k, rank, upper=prev)
    return abs((prev - sigma) / sigma)


@dataclass(frozen=True)
class Table1Row:
    n: int
    t_ratio: float
    k: int
    eta: object
    reference: float


def table1(precision: Arith | str = BINARY64) -> list[Table1Row]:
    """The 20-row eta table for ``r1 = 1, r2 = 3``, ``n`` in {1, 2}."""
    ar = get_arith(precision)
    rows = []
    for n in (1, 2):
        for ratio, ks in TABLE1_LAYOUT.items():
            cfg = ShellConfig.from_ratio(n, 1.0, 3.0, ratio)
            frame = derive_frame(cfg, ar)
            sig = {N: None for N in (2 ** (ks[0] - 1), 2 ** ks[0], 2 ** ks[1])}
            prev = None
            for N in sig:
                sig[N] = prev = _sigma_at(frame, n, N, 1, upper=prev)
            for k in ks:
                eta = abs((sig[2 ** (k - 1)] - sig[2 ** k]) / sig[2 ** k])
                rows.append(Table1Row(n, ratio, k, eta, TABLE1_REFERENCE[(n, ratio, k)]))
    return rows


# ---------------------------------------------------------------------------
# step 2

@dataclass(frozen=True)
class ValidationReport:
    config: ShellConfig
    N: int
    sigma: object
    records: tuple  # of (m, E)
    certified: bool
    cert_tol: float
    precision: str

    @property
    def best(self):
        return min(self.records, key=lambda r: r[1])


def default_m_schedule(N: int, step: int = 4) -> list[int]:
    return list(range(step, N + 1, step)) or [N]


def validate_sigma(cfg: ShellConfig, report: ConvergenceReport | None = None, m_schedule=None,
                   cert_tol=None, N: int | None = None, quad_tol=None,
                   arith: Arith | str | None = None) -> ValidationReport:
    """Certify ``sigma_N`` through ``E_{m,N}`` over ``m_schedule``.

    ``sigma_N`` comes from ``report`` (its final ``N``) unless ``N`` is
    given, in which case it is recomputed at that size.
    """
    ar = get_arith(arith or (report.precision if report else BINARY64))
    if report is not None and report.rank != 1:
        raise ValueError("validation applies to the first eigenvalue only")
    frame = derive_frame(cfg, ar)
    if N is None:
        if report is None:
            raise ValueError("need a convergence report or an explicit N")
        if not report.converged:
            log.warning("validating an unconverged report (status %s)", report.status)
        N, sigma = report.final_N, report.sigma
    else:
        sigma = _sigma_at(frame, cfg.n, N, 1)
    cert_tol = DEFAULT_CERT_TOL[ar.name] if cert_tol is None else cert_tol
    if not cert_tol > 0:
        raise ValueError(f"cert_tol must be positive, got {cert_tol}")
    schedule = list(m_schedule) if m_schedule is not None else default_m_schedule(N)
    records = []
    for m in schedule:
        E = validation_gap(frame, cfg.n, m, sigma, quad_tol)
        records.append((m, E))
    certified = any(E < cert_tol for _, E in records)
    return ValidationReport(cfg, N, sigma, tuple(records), certified, float(cert_tol), ar.name)


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepRecord:
    n: int
    r1: float
    r2: float
    t_ratio: float
    rank: int
    sigma: object = None
    final_N: int | None = None
    eta_final: object = None
    E_final: object = None
    converged: bool = False
    label: str = ""
    error: str = ""


SWEEP_FIELDS = ("n", "r1", "r2", "t_ratio", "rank", "sigma", "final_N", "eta_final", "E_final",
                "converged", "label", "error")


@dataclass(frozen=True)
class SweepGrid:
    n: Sequence[int] = (1,)
    r1: Sequence[float] = (1.0,)
    r2: Sequence[float] = (3.0,)
    t_ratio: Sequence[float] = (0.0,)
    rank: Sequence[int] = (1,)

    def points(self):
        """Grid points in deterministic order, ``t_ratio`` varying fastest."""
        return [dict(n=n, r1=r1, r2=r2, rank=rank, t_ratio=t)
                for n, r1, r2, rank, t in itertools.product(self.n, self.r1, self.r2, self.rank,
                                                            self.t_ratio)]

    @classmethod
    def from_dict(cls, spec: dict) -> "SweepGrid":
        unknown = set(spec) - {"n", "r1", "r2", "t_ratio", "rank"}
        if unknown:
            raise ValueError(f"unknown grid keys: {sorted(unknown)}")

        def listed(key, cast):
            val = spec.get(key, getattr(cls, key))
            if isinstance(val, dict):  # {"start", "stop", "count"}
                val = np.linspace(val["start"], val["stop"], int(val["count"])).round(12).tolist()
            elif not isinstance(val, (list, tuple)):
                val = [val]
            return tuple(cast(v) for v in val)
        grid = cls(listed("n", int), listed("r1", float), listed("r2", float),
                   listed("t_ratio", float), listed("rank", int))
        for t in grid.t_ratio:
            if not 0 <= t < 1:
                raise ValueError(f"t_ratio must lie in [0, 1), got {t}")
        if any(r < 1 for r in grid.rank):
            raise ValueError("rank must be >= 1")
        return grid


def _ratio_grid(start: float = 0.0) -> tuple:
    return tuple(round(0.02 * i, 2) for i in range(50) if 0.02 * i >= start - 1e-12)


EXAMPLE_GRIDS = {
    "example1": SweepGrid(n=(1,), r1=(1.0,), r2=(3.0,), t_ratio=_ratio_grid()),
    "example2": SweepGrid(n=(1, 2), r1=(0.2, 0.4, 0.6, 0.8), r2=(1.0,), t_ratio=_ratio_grid()),
    "example3": SweepGrid(n=(1, 2, 3, 4, 5, 6), r1=(0.4, 0.6), r2=(1.0,), t_ratio=_ratio_grid()),
    # higher modes have no concentric closed form here, so t = 0 is left out
    "example4": SweepGrid(n=(1,), r1=(0.2, 0.4, 0.6, 0.8), r2=(1.0,), t_ratio=_ratio_grid(0.02),
                          rank=(2, 3)),
}


@dataclass(frozen=True)
class SweepOptions:
    eta_tol: float = DEFAULT_ETA_TOL
    k_max: int = DEFAULT_K_MAX
    validate: bool = False
    cert_tol: float | None = None
    quad_tol: float | None = None
    precision: str = "binary64"


def sweep_point(point: dict, opts: SweepOptions = SweepOptions()) -> SweepRecord:
    """One grid point; failures are captured in the record."""
    ar = get_arith(opts.precision)
    n, r1, r2, t_ratio, rank = (point[k] for k in ("n", "r1", "r2", "t_ratio", "rank"))
    label = HIGHER_MODE_LABEL if rank > 1 else ""
    base = dict(n=n, r1=r1, r2=r2, t_ratio=t_ratio, rank=rank, label=label)
    try:
        if t_ratio == 0:
            if rank > 1:
                raise ValueError("no concentric reference for rank > 1 at t = 0")
            sigma = concentric_exact(n, r1, r2, ar)
            return SweepRecord(**base, sigma=sigma, converged=True)
        cfg = ShellConfig.from_ratio(n, r1, r2, t_ratio)
        rep = converge_sigma(cfg, rank, opts.eta_tol, opts.k_max, ar)
        E = None
        if opts.validate and rank == 1:
            val = validate_sigma(cfg, rep, cert_tol=opts.cert_tol, quad_tol=opts.quad_tol, arith=ar)
            E = val.best[1]
        return SweepRecord(**base, sigma=rep.sigma, final_N=rep.final_N, eta_final=rep.eta_final,
                           E_final=E, converged=rep.converged)
    except (SteklovError, ValueError, ArithmeticError) as exc:
        log.warning("sweep point %s failed: %s", point, exc)
        return SweepRecord(**base, error=str(exc))


def _sweep_worker(args):
    return sweep_point(*args)


def sweep(grid: SweepGrid | dict, opts: SweepOptions = SweepOptions(),
          workers: int | None = None) -> list[SweepRecord]:
    """Run every grid point; output order is the grid order for any ``workers``."""
    if isinstance(grid, dict):
        grid = SweepGrid.from_dict(grid)
    points = grid.points()
    if workers and workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_worker, [(p, opts) for p in points]))
    return [sweep_point(p, opts) for p in points]


def modes(cfg: ShellConfig, count: int, eta_tol=DEFAULT_ETA_TOL, k_max: int = DEFAULT_K_MAX,
          arith: Arith | str = BINARY64) -> list[ConvergenceReport]:
    """Converged reports for the ``count`` smallest axisymmetric eigenvalues."""
    return [converge_sigma(cfg, r, eta_tol, k_max, arith) for r in range(1, count + 1)]
