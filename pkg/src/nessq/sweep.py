"""Parameter sweeps over cycle reports and steady states."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from nessq import analytic
from nessq.config import RunConfig, SweepSpec
from nessq.cycle import CycleError, ScheduleError, find_ness, simulate
from nessq.dynamics import IntegrationError
from nessq.linalg import LinalgError
from nessq.model import TWO_QUBIT, ModelError
from nessq.thermo import ergotropy

log = logging.getLogger(__name__)

CYCLE_COLUMNS = (
    "W", "Q_d_H", "Q_r_H", "Q_C", "ergotropy_oss", "eta", "eta_over_eta_sc",
    "power", "operating_flag", "error",
)
NUMERIC_ERRORS = (CycleError, IntegrationError, LinalgError, ModelError, ScheduleError)


def eta_sc(run: RunConfig) -> float:
    """Ideal short-cycle efficiency; independent of the period."""
    return analytic.short_cycle(run.kind, run.params(), 1.0)["eta_SC"]


def evaluate_cycle(run: RunConfig) -> dict:
    row = {c: math.nan for c in CYCLE_COLUMNS}
    row["operating_flag"] = False
    row["error"] = ""
    try:
        model = run.model()
        report = simulate(model, run.cycle_schedule(), run.step_scale)
    except NUMERIC_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(
        W=report.W, Q_d_H=report.Q_d_H, Q_r_H=report.Q_r_H, Q_C=report.Q_C,
        ergotropy_oss=report.ergotropy_oss, eta=report.efficiency,
        power=report.power, operating_flag=report.operating,
    )
    row["eta_over_eta_sc"] = report.efficiency / eta_sc(run)
    return row


def ness_columns(kind: str, labels) -> tuple:
    cols = tuple(f"p_{lab}" for lab in labels) + ("ergotropy_ness",)
    if kind == TWO_QUBIT:
        cols += ("E_NESS_closed_form", "E_NESS_kernel", "population_deviation", "active")
    return cols + ("error",)


def evaluate_ness(run: RunConfig) -> dict:
    model = None
    try:
        model = run.model()
        rho = find_ness(model)
    except NUMERIC_ERRORS as exc:
        labels = model.labels if model is not None else ()
        row = {c: math.nan for c in ness_columns(run.kind, labels)}
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    pops = np.diag(rho).real
    row = {f"p_{lab}": float(p) for lab, p in zip(model.labels, pops)}
    row["ergotropy_ness"] = ergotropy(rho, model.energies).ergotropy
    if run.kind == TWO_QUBIT:
        p = run.params()
        ref = analytic.two_qubit_ness(p)
        row["E_NESS_closed_form"] = ref["E_NESS"]
        row["E_NESS_kernel"] = 2.0 * p.lam * (pops[2] - pops[1])
        row["population_deviation"] = float(np.max(np.abs(pops - np.array(ref.populations()))))
        row["active"] = ref.active
    row["error"] = ""
    return row


def _evaluate(args):
    target, run = args
    return evaluate_cycle(run) if target == "cycle" else evaluate_ness(run)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list:
    """Rows in grid order; per-point failures land in the error column."""
    points = spec.points()
    jobs = [(spec.target, spec.base.with_values(pt)) for pt in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, jobs))
    else:
        results = [_evaluate(j) for j in jobs]
    rows = []
    for pt, res in zip(points, results):
        if res["error"]:
            log.info("point %s: %s", pt, res["error"])
        rows.append({**{k: float(v) for k, v in pt.items()}, **res})
    if len(rows) != len(points):
        raise RuntimeError("sweep lost grid points")
    return rows


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def to_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in header])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, str):
        return v
    v = float(v)
    return v if math.isfinite(v) else None


def to_json(rows: list) -> str:
    return json.dumps([{k: _json_value(v) for k, v in r.items()} for r in rows], indent=1)


def render(rows: list, fmt: str) -> str:
    return to_csv(rows) if fmt == "csv" else to_json(rows) + "\n"
