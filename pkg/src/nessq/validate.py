"""Oracle/numeric cross-checks and physical invariants, run as one battery.

Each check records its tolerance and the observed deviation. Closed forms
are looked up on :mod:`nessq.analytic` at call time, so a perturbed formula
shows up in exactly the checks that use it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from nessq import analytic, dynamics
from nessq.cycle import CycleSchedule, carnot_limit, find_ness, run_cycle, simulate, solve_oss
from nessq.linalg import trace_norm
from nessq.model import (
    QutritParams,
    TwoQubitParams,
    build_qutrit_lambda,
    build_qutrit_v,
    build_two_qubit,
)

log = logging.getLogger(__name__)

TOL_EFFICIENCY = 1e-6
TOL_ORACLE = 1e-2
TOL_NESS = 1e-10
TOL_POWER_RATIO = 2e-2
TOL_FIRST_LAW = 1e-8
TOL_CLOSURE = 1e-10
TOL_STEP_HALVING = 1e-6
TOL_STATE = 1e-9


@dataclass
class Check:
    section: str
    name: str
    tolerance: float
    deviation: float
    passed: bool
    message: str = ""


def _check(section, name, tol, deviation, message=""):
    ok = bool(math.isfinite(deviation) and deviation <= tol)
    return Check(section, name, tol, float(deviation), ok, message)


def _rel(a, b):
    return abs(a - b) / abs(b)


def _qutrit_example(omega_e, T=0.1, pump=1.0, dispenser=0.5):
    return QutritParams(omega_e=omega_e, omega_i=1.0, T=T, pump=pump, dispenser=dispenser)


def short_cycle_schedule(model, gamma_tau=1e-3, swap_fraction=1.0 / 600.0):
    """A short cycle with ``Gamma tau = gamma_tau`` and ``tau_d = swap_fraction * tau``."""
    tau = gamma_tau / model.total_rate()
    eps = math.pi / (2.0 * swap_fraction * tau)
    return CycleSchedule(eps, tau, mode="short_cycle")


def qutrit_schedules(model):
    """Short, intermediate and long-period schedules for one model."""
    g = model.total_rate()
    return [
        short_cycle_schedule(model),
        CycleSchedule(20.0 * g, 1.0 / g),
        CycleSchedule(2.0 * g, 50.0 / g),
    ]


def check_qutrit_efficiency(omega_ratios=(0.1, 0.5, 0.9)) -> list:
    out = []
    for build, ideal, label in (
        (build_qutrit_v, lambda r: 1.0 - r, "V"),
        (build_qutrit_lambda, lambda r: r, "Lambda"),
    ):
        for r in omega_ratios:
            model = build(_qutrit_example(r))
            dev = 0.0
            for sched in qutrit_schedules(model):
                rep = simulate(model, sched)
                dev = max(dev, abs(rep.efficiency - ideal(r)))
            out.append(_check("qutrit_efficiency", f"{label} omega_e/omega_i={r}",
                              TOL_EFFICIENCY, dev))
    return out


def _oracle_deviation(model, report_fn, params):
    sched = short_cycle_schedule(model)
    rep = simulate(model, sched)
    ref = report_fn(params, sched.tau)
    return max(
        _rel(rep.ergotropy_oss, ref["E_SC"]),
        _rel(rep.Q_H, ref["Q_SC_H"]),
        _rel(rep.power, ref["P_SC"]),
    )


def check_short_cycle() -> list:
    qp = _qutrit_example(0.4, T=0.3, pump=0.5, dispenser=0.2)
    tq = TwoQubitParams(omega_0=1.0, lam=0.05, gamma_0=1e-3, T_A=0.2, T_S=0.05)
    cases = (
        ("V", build_qutrit_v, lambda p, t: analytic.qutrit_v_short_cycle(p, t), qp),
        ("Lambda", build_qutrit_lambda, lambda p, t: analytic.qutrit_lambda_short_cycle(p, t), qp),
        ("two_qubit", build_two_qubit, lambda p, t: analytic.two_qubit_short_cycle(p, t), tq),
    )
    out = []
    for label, build, fn, params in cases:
        try:
            dev = _oracle_deviation(build(params), fn, params)
            out.append(_check("short_cycle", f"{label} E, Q_H, P vs closed form", TOL_ORACLE, dev))
        except Exception as exc:  # a broken oracle must not hide the other checks
            out.append(Check("short_cycle", f"{label} E, Q_H, P vs closed form",
                             TOL_ORACLE, math.nan, False, repr(exc)))
    return out


def random_two_qubit(rng) -> TwoQubitParams:
    return TwoQubitParams(
        omega_0=1.0,
        lam=float(0.5 * (1.0 - rng.uniform())),  # in (0, 0.5]
        gamma_0=float(10.0 ** rng.uniform(-6, -1)),
        T_A=float(rng.uniform(0.05, 1.0)),
        T_S=float(rng.uniform(0.05, 1.0)),
    )


def ness_deviation(p: TwoQubitParams) -> float:
    pops = np.diag(find_ness(build_two_qubit(p))).real
    ref = analytic.two_qubit_ness(p)
    return max(abs(pops[2] - ref["zeta"] / ref["K"]), abs(pops[1] - ref["eps_num"] / ref["K"]))


def check_ness(draws: int = 100, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    dev = max(ness_deviation(random_two_qubit(rng)) for _ in range(draws))
    return [_check("ness", f"r_A = zeta/K, r_S = eps_num/K over {draws} draws", TOL_NESS, dev)]


def power_ratio_params(omega_e, gamma=1e-3, T=0.01):
    """Zero-temperature, weak-coupling, equal-coupling point with pump = 2 gamma."""
    return QutritParams(omega_e=omega_e, omega_i=1.0, T=T, pump=2.0 * gamma,
                        gamma_e=gamma, gamma_i=gamma, gamma_g=gamma)


def simulated_power_ratio(omega_e, **kw) -> float:
    p = power_ratio_params(omega_e, **kw)
    mv, ml = build_qutrit_v(p), build_qutrit_lambda(p)
    sv = short_cycle_schedule(mv)
    sl = CycleSchedule(sv.epsilon, sv.tau, mode="short_cycle")
    return simulate(mv, sv).power / simulate(ml, sl).power


def check_power_ratio() -> list:
    out = []
    for ratio in (2.0, 3.0):
        sim = simulated_power_ratio(1.0 / ratio)
        ref = analytic.power_ratio_v_lambda(1.0 / ratio, 1.0)
        out.append(_check("power_ratio", f"P_V/P_Lambda at omega_i/omega_e={ratio}",
                          TOL_POWER_RATIO, _rel(sim, ref)))
    return out


def invariant_cases():
    # pump below the bath coupling keeps the hot effective temperature finite
    q = _qutrit_example(0.5, pump=0.5)
    tq = TwoQubitParams(omega_0=1.0, lam=0.05, gamma_0=1e-3, T_A=0.2, T_S=0.05)
    mv, ml, m2 = build_qutrit_v(q), build_qutrit_lambda(q), build_two_qubit(tq)
    g2 = m2.total_rate()
    return [
        ("V", mv, CycleSchedule(10.0 * mv.total_rate(), 2.0 / mv.total_rate())),
        ("Lambda", ml, CycleSchedule(10.0 * ml.total_rate(), 2.0 / ml.total_rate())),
        ("two_qubit", m2, CycleSchedule(0.05, 1.0 / g2)),
        ("two_qubit short", m2, short_cycle_schedule(m2)),
    ]


def _state_deviation(traces) -> float:
    dev = 0.0
    for tr in traces:
        s = tr.states
        herm = np.max(np.abs(s - np.conj(np.swapaxes(s, 1, 2))))
        tr_dev = np.max(np.abs(np.einsum("kii->k", s) - 1.0))
        neg = max(0.0, -float(np.linalg.eigvalsh(s).min()))
        dev = max(dev, float(herm), float(tr_dev), neg)
    return dev


def work_bound_excess(report) -> float:
    """How far ``|W|`` exceeds the OSS ergotropy plus the bath energy exchanged
    while the drive is on.

    A swap of finite duration keeps exchanging heat, so ``|W|`` overshoots the
    ergotropy by an amount of order ``Gamma tau_d``; the allowance vanishes in
    the instantaneous-swap limit.
    """
    dis = report.details["discharge"]
    allowance = float(np.sum(np.abs(dis.channel_heat)))
    return max(0.0, abs(report.W) - report.ergotropy_oss - allowance)


def check_invariants() -> list:
    out = []
    for label, model, sched in invariant_cases():
        sec = "invariants"
        rho, _ = solve_oss(model, sched)
        rep, end = run_cycle(model, rho, sched)
        traces = (rep.details["discharge"], rep.details["recharge"])
        out.append(_check(sec, f"{label} trace/hermiticity/positivity", TOL_STATE,
                          _state_deviation(traces)))
        out.append(_check(sec, f"{label} first law", TOL_FIRST_LAW, rep.first_law_residual()))
        out.append(_check(sec, f"{label} cycle closure", TOL_CLOSURE, trace_norm(end - rho)))
        out.append(_check(sec, f"{label} |W| <= ergotropy(OSS) + discharge heat", 0.0,
                          work_bound_excess(rep)))
        carnot = carnot_limit(model)
        out.append(_check(sec, f"{label} eta <= Carnot", 0.0, max(0.0, rep.efficiency - carnot)))
        half = simulate(model, sched, step_scale=0.5)
        out.append(_check(sec, f"{label} RK4 step halving (W)", TOL_STEP_HALVING,
                          _rel(half.W, rep.W)))
        out.append(_check(sec, f"{label} coherence sum on driven pair", dynamics.TOL.coherence_sum,
                          float(np.max(np.abs(traces[0].states[:, model.drive.lower, model.drive.upper]
                                              + traces[0].states[:, model.drive.upper, model.drive.lower])))))
    return out


SECTIONS = {
    "qutrit_efficiency": check_qutrit_efficiency,
    "short_cycle": check_short_cycle,
    "ness": check_ness,
    "power_ratio": check_power_ratio,
    "invariants": check_invariants,
}


def run_validation(sections=None) -> dict:
    names = list(SECTIONS) if not sections else list(sections)
    unknown = [n for n in names if n not in SECTIONS]
    if unknown:
        raise KeyError(f"unknown validation sections {unknown}; choose from {list(SECTIONS)}")
    checks = []
    for name in names:
        log.info("validating %s", name)
        try:
            checks.extend(SECTIONS[name]())
        except Exception as exc:
            checks.append(Check(name, "section", math.nan, math.nan, False, repr(exc)))
    return {
        "passed": all(c.passed for c in checks),
        "n_checks": len(checks),
        "n_failed": sum(not c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
    }
