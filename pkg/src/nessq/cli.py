"""Command-line front end: ``nessq simulate | sweep | ness | validate``.

Exit codes: 0 ok, 2 configuration error, 3 numeric failure (including an
inactive working fluid), 4 validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from nessq import analytic, sweep, validate
from nessq.config import ConfigError, load
from nessq.cycle import CycleError, ScheduleError, carnot_limit, find_ness, simulate
from nessq.dynamics import IntegrationError, write_trace_csv
from nessq.linalg import LinalgError
from nessq.model import TWO_QUBIT, ModelError
from nessq.thermo import ergotropy
from nessq.tolerances import TOL

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("nessq")


class InactiveFluid(RuntimeError):
    pass


def _setup_logging():
    level = os.environ.get("NESSQ_LOG", "quiet").strip().lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(payload, out):
    text = json.dumps(_clean(payload), indent=1) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cfg = load(args.config, args.step_scale)
    run = cfg.run
    model = run.model()
    schedule = run.cycle_schedule()
    # the fuel is the undriven steady state; a passive one cannot run an engine
    fuel = ergotropy(find_ness(model), model.energies).ergotropy
    if fuel <= TOL.active_ergotropy:
        raise InactiveFluid(f"inactive working fluid: steady-state ergotropy {fuel:.3e}")
    report = simulate(model, schedule, run.step_scale)
    eta_sc = sweep.eta_sc(run)
    payload = {"fluid_kind": run.kind, **report.to_dict()}
    payload["eta_sc"] = eta_sc
    payload["eta_over_eta_sc"] = report.efficiency / eta_sc
    try:
        payload["carnot_bound"] = carnot_limit(model)
    except (ValueError, ModelError):
        payload["carnot_bound"] = None
    payload["first_law_residual"] = report.first_law_residual()
    trace = args.trace or cfg.trace
    if trace:
        write_trace_csv(trace, [report.details["discharge"], report.details["recharge"]])
    _emit(payload, args.out or cfg.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load(args.config, args.step_scale)
    if cfg.sweep is None:
        raise ConfigError("sweep needs a [sweep] section")
    fmt = args.format or cfg.fmt
    rows = sweep.run_sweep(cfg.sweep, workers=args.workers)
    text = sweep.render(rows, fmt)
    out = args.out or cfg.out
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = sum(1 for r in rows if r["error"])
    if failed:
        log.warning("%d of %d grid points recorded an error", failed, len(rows))
    return EXIT_OK


def cmd_ness(args) -> int:
    cfg = load(args.config, args.step_scale)
    run = cfg.run
    model = run.model()
    rho = find_ness(model)
    pops = np.diag(rho).real
    payload = {
        "fluid_kind": run.kind,
        "populations": dict(zip(model.labels, pops.tolist())),
        "ergotropy": ergotropy(rho, model.energies).ergotropy,
    }
    if run.kind == TWO_QUBIT:
        p = run.params()
        ref = analytic.two_qubit_ness(p)
        payload["closed_form"] = ref.to_dict()
        payload["E_NESS_closed_form"] = ref["E_NESS"]
        payload["E_NESS_kernel"] = 2.0 * p.lam * (pops[2] - pops[1])
        payload["population_deviation"] = float(
            np.max(np.abs(pops - np.array(ref.populations())))
        )
    _emit(payload, args.out or cfg.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    summary = validate.run_validation(args.section)
    _emit(summary, args.out)
    return EXIT_OK if summary["passed"] else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nessq", description="Two-stroke quantum heat engines")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True,
                           help="config file path or bundled example name")
        p.add_argument("--out", help="output path (default: stdout or [output] path)")
        p.add_argument("--step-scale", type=float, default=1.0,
                       help="multiplies the default integrator step")

    p = sub.add_parser("simulate", help="find the OSS and run one cycle")
    common(p)
    p.add_argument("--trace", help="write the state/work/heat trace to this CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="evaluate a one- or two-axis grid")
    common(p)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ness", help="steady state of the undriven fluid")
    common(p)
    p.set_defaults(func=cmd_ness)

    p = sub.add_parser("validate", help="run the oracle and invariant battery")
    common(p, needs_config=False)
    p.add_argument("--section", action="append", choices=list(validate.SECTIONS),
                   help="restrict to a section (repeatable)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.step_scale <= 0.0:
        parser.error("--step-scale must be positive")
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    try:
        return args.func(args)
    except (ConfigError, ScheduleError, ModelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InactiveFluid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CycleError, IntegrationError, LinalgError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
