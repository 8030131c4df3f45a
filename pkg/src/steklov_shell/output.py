"""Tabular views of reports and their CSV / JSON serialisation.

Numbers are written with the precision profile's significant-digit count.
In JSON, binary64 values are numbers and extended values are strings (a
JSON number would be read back as a double and lose the extra digits).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from numbers import Integral
from dataclasses import dataclass, field
from typing import Any, Sequence

from .driver import SWEEP_FIELDS, ConvergenceReport, SweepRecord, Table1Row, ValidationReport
from .precision import Arith, get_arith
from .rayleigh import TruncatedEigenfunction, boundary_normal_series


@dataclass(frozen=True)
class Table:
    kind: str
    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)


def _config_meta(cfg) -> dict:
    return {"n": cfg.n, "r1": cfg.r1, "r2": cfg.r2, "t": cfg.t, "t_ratio": cfg.t_ratio}


def convergence_table(rep: ConvergenceReport) -> Table:
    rows = [(s.k, s.N, s.sigma, s.eta) for s in rep.records]
    meta = dict(_config_meta(rep.config), rank=rep.rank, precision=rep.precision,
                sigma=rep.sigma, final_N=rep.final_N, converged=rep.converged,
                status=rep.status, eta_tol=rep.eta_tol)
    return Table("convergence", ("k", "N", "sigma", "eta"), rows, meta)


def validation_table(rep: ValidationReport) -> Table:
    meta = dict(_config_meta(rep.config), precision=rep.precision, N=rep.N, sigma=rep.sigma,
                certified=rep.certified, cert_tol=rep.cert_tol)
    return Table("validation", ("m", "E"), [tuple(r) for r in rep.records], meta)


def sweep_table(records: Sequence[SweepRecord], precision: str = "binary64") -> Table:
    rows = [tuple(getattr(r, f) for f in SWEEP_FIELDS) for r in records]
    return Table("sweep", SWEEP_FIELDS, rows, {"precision": precision})


def table1_table(rows: Sequence[Table1Row], precision: str = "binary64") -> Table:
    return Table("table1", ("n", "t_ratio", "k", "eta", "reference"),
                 [(r.n, r.t_ratio, r.k, r.eta, r.reference) for r in rows], {"precision": precision})


def modes_table(reports: Sequence[ConvergenceReport]) -> Table:
    rows = [(r.rank, r.sigma, r.final_N, r.eta_final, r.converged,
             "axisymmetric-restricted" if r.rank > 1 else "") for r in reports]
    meta = dict(_config_meta(reports[0].config), precision=reports[0].precision)
    return Table("modes", ("rank", "sigma", "final_N", "eta_final", "converged", "label"), rows, meta)


def eigenfunction_table(u: TruncatedEigenfunction, cfg=None) -> Table:
    normal = boundary_normal_series(u)
    rows = [(k, u.coeffs[k] if k < u.m else None, normal[k]) for k in range(u.m + 1)]
    meta = dict(_config_meta(cfg) if cfg is not None else {}, m=u.m, rank=u.rank,
                sigma=u.sigma, precision=u.arith.name)
    return Table("eigenfunction", ("k", "coeff", "normal_coeff"), rows, meta)


# ---------------------------------------------------------------------------

def _csv_cell(v, ar: Arith) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Integral):
        return str(int(v))
    if isinstance(v, str):
        return v
    return ar.fmt(v)


def _json_value(v, ar: Arith) -> Any:
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, Integral):
        return int(v)
    text = ar.fmt(v)
    if ar.is_extended:
        return text
    return float(text)


def format_csv(table: Table, arith: Arith | str = "binary64") -> str:
    ar = get_arith(arith)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(v, ar) for v in row])
    return buf.getvalue()


def to_json_obj(table: Table, arith: Arith | str = "binary64") -> dict:
    ar = get_arith(arith)
    obj = {"kind": table.kind}
    obj.update({k: _json_value(v, ar) for k, v in table.meta.items()})
    obj["records"] = [{c: _json_value(v, ar) for c, v in zip(table.columns, row)}
                      for row in table.rows]
    return obj


def format_json(table: Table, arith: Arith | str = "binary64") -> str:
    return json.dumps(to_json_obj(table, arith), indent=2) + "\n"


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    elif hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def emit_csv(table: Table, out=None, arith: Arith | str = "binary64") -> None:
    """Header row plus one line per record; ``out`` is a path, a stream or stdout."""
    _write(format_csv(table, arith), out)


def emit_json(table: Table, out=None, arith: Arith | str = "binary64") -> None:
    _write(format_json(table, arith), out)
