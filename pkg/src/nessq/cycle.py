"""Two-stroke cycle: discharge under the drive, recharge with the drive off."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from nessq import dynamics
from nessq.linalg import fixed_point, null_vector, trace_norm
from nessq.model import HOT, TWO_QUBIT, EngineModel, InfiniteTemperature, ModelError, gibbs_state
from nessq.thermo import carnot_bound, ergotropy
from nessq.tolerances import TOL

log = logging.getLogger(__name__)

FINITE = "finite_period"
SHORT = "short_cycle"
ASYMPTOTIC = "asymptotic"
MODES = (FINITE, SHORT, ASYMPTOTIC)


class CycleError(RuntimeError):
    pass


class ScheduleError(ValueError):
    pass


class NonConvergence(CycleError):
    pass


class NonDiagonalFixedPoint(CycleError):
    pass


@dataclass(frozen=True)
class CycleSchedule:
    """Drive amplitude and timing of one cycle.

    The discharge lasts ``pi / (2 epsilon)``, a full swap of the driven pair.
    In asymptotic mode the period is not fixed in advance: the cycle starts
    from the steady state and recharging stops once the trace distance to it
    has fallen to ``delta`` times its value right after the discharge.
    """

    epsilon: float
    tau: float | None = None
    mode: str = FINITE
    delta: float = TOL.asymptotic_delta

    def __post_init__(self):
        if self.mode not in MODES:
            raise ScheduleError(f"unknown schedule mode {self.mode!r}")
        if not self.epsilon > 0.0:
            raise ScheduleError("drive amplitude must be positive")
        if self.mode != ASYMPTOTIC:
            if self.tau is None or not self.tau > self.tau_d:
                raise ScheduleError(
                    f"period tau={self.tau} must exceed the discharge time {self.tau_d:.6g}"
                )

    @property
    def tau_d(self) -> float:
        return math.pi / (2.0 * self.epsilon)

    @property
    def tau_r(self) -> float | None:
        if self.tau is None:
            return None
        return self.tau - self.tau_d


@dataclass
class CycleReport:
    W: float
    Q_d_H: float
    Q_r_H: float
    Q_C: float
    ergotropy_oss: float
    efficiency: float
    power: float
    oss_state: np.ndarray
    converged: bool = True
    iterations: int = 0
    operating: bool = False
    tau: float = float("nan")
    tau_d: float = float("nan")
    tau_r: float = float("nan")
    energy_change: float = 0.0
    details: dict = field(default_factory=dict, repr=False)

    @property
    def Q_H(self) -> float:
        return self.Q_d_H + self.Q_r_H

    def first_law_residual(self) -> float:
        """``W + sum(Q) - Delta U`` relative to the largest energy flow."""
        total = self.W + self.Q_d_H + self.Q_r_H + self.Q_C - self.energy_change
        scale = max(abs(self.W), abs(self.Q_d_H) + abs(self.Q_r_H), abs(self.Q_C), 1e-300)
        return abs(total) / scale

    def to_dict(self) -> dict:
        rho = self.oss_state
        return {
            "W": self.W,
            "Q_d_H": self.Q_d_H,
            "Q_r_H": self.Q_r_H,
            "Q_C": self.Q_C,
            "ergotropy_oss": self.ergotropy_oss,
            "efficiency": self.efficiency,
            "power": self.power,
            "oss_populations": [float(rho[k, k].real) for k in range(rho.shape[0])],
            "converged": self.converged,
            "iterations": self.iterations,
            "operating": self.operating,
            "tau": self.tau,
            "tau_d": self.tau_d,
            "tau_r": self.tau_r,
        }


def cycle_propagator(model: EngineModel, schedule: CycleSchedule, step_scale: float = 1.0):
    m = model.with_amplitude(schedule.epsilon)
    pd = dynamics.stroke_propagator(m, schedule.tau_d, True, step_scale=step_scale)
    pr = dynamics.stroke_propagator(m, schedule.tau_r, False, step_scale=step_scale)
    return pr @ pd


def _check_diagonal(rho, what, drive=None):
    """Reject states that are not diagonal in the energy basis.

    With ``drive`` given, an imaginary coherence on the driven pair is
    tolerated: a finite-amplitude swap leaves one of order rate/epsilon, and
    only its real part enters the heat bookkeeping.
    """
    rest = rho - np.diag(np.diag(rho))
    if drive is not None:
        a, b = drive.lower, drive.upper
        sym = abs(rho[a, b] + rho[b, a])
        rest[a, b] = rest[b, a] = sym
    off = float(np.max(np.abs(rest)))
    if off > TOL.diagonal:
        raise NonDiagonalFixedPoint(f"{what} has off-diagonal entries up to {off:.3e}")


def _hot_gibbs(model: EngineModel) -> np.ndarray:
    try:
        T_hot = model.effective_temperatures()[0]
    except ModelError:
        T_hot = float("inf")
    return gibbs_state(model.energies, T_hot)


def solve_oss(model: EngineModel, schedule: CycleSchedule, step_scale: float = 1.0,
              method: str = "direct", require_diagonal: bool = True):
    """Fixed point of the cycle map, returned as ``(state, iterations)``.

    ``method="direct"`` solves the linear fixed-point equation of the exact
    RK4 cycle propagator and then confirms it by iterating the map;
    ``method="iterate"`` runs plain iteration from the hot-bath Gibbs state.
    """
    if schedule.mode == ASYMPTOTIC:
        raise ScheduleError("asymptotic cycles start from the steady state, not an OSS")
    prop = cycle_propagator(model, schedule, step_scale)
    d = model.dim
    if method == "direct":
        rho = fixed_point(prop)
    elif method == "iterate":
        rho = _hot_gibbs(model)
    else:
        raise ValueError(f"unknown method {method!r}")
    for it in range(1, TOL.oss_max_iter + 1):
        nxt = (prop @ rho.reshape(-1)).reshape(d, d)
        nxt = 0.5 * (nxt + nxt.conj().T)
        # the exact map preserves the trace; drop the rounding leak of the matrix power
        nxt = nxt / np.trace(nxt).real
        change = trace_norm(nxt - rho)
        rho = nxt
        if change < TOL.oss_change:
            break
    else:
        raise NonConvergence(f"cycle map not converged after {TOL.oss_max_iter} iterations")
    if require_diagonal:
        _check_diagonal(rho, "operational steady state", model.drive)
    return rho, it


def find_oss(model: EngineModel, schedule: CycleSchedule, step_scale: float = 1.0,
             method: str = "direct") -> np.ndarray:
    return solve_oss(model, schedule, step_scale, method)[0]


def find_ness(model: EngineModel) -> np.ndarray:
    rho = null_vector(dynamics.liouvillian(model, drive_on=False))
    _check_diagonal(rho, "steady state")
    return rho


def run_cycle(model: EngineModel, start, schedule: CycleSchedule, step_scale: float = 1.0):
    """One discharge + recharge pass from ``start``; returns ``(report, end_state)``."""
    m = model.with_amplitude(schedule.epsilon)
    start = np.asarray(start, dtype=complex)
    discharge = dynamics.evolve(start, m, schedule.tau_d, True, step_scale=step_scale)
    if schedule.mode == ASYMPTOTIC:
        step = dynamics.default_step(m, math.inf, False) * step_scale
        slowest = min(ch.rate for ch in m.channels if ch.rate > 0.0)
        # relative closure: an absolute one is meaningless when excited
        # populations are themselves far below delta
        target = schedule.delta * trace_norm(discharge.final_state - start)
        recharge = dynamics.evolve_until(
            discharge.final_state, m,
            stop=lambda rho: trace_norm(rho - start) < target,
            step=step, max_time=200.0 / slowest,
        )
    else:
        recharge = dynamics.evolve(discharge.final_state, m, schedule.tau_r, False,
                                   step_scale=step_scale)
    end = recharge.final_state

    W = discharge.total_work
    Q_d_H = discharge.heat(HOT)
    Q_r_H = recharge.heat(HOT)
    total_heat = float(np.sum(discharge.channel_heat) + np.sum(recharge.channel_heat))
    Q_C = total_heat - Q_d_H - Q_r_H
    h0 = m.hamiltonian
    dU = float(np.trace((end - start) @ h0).real)

    erg = ergotropy(start, m.energies).ergotropy
    Q_H = Q_d_H + Q_r_H
    tau_r = recharge.duration
    tau = schedule.tau_d + tau_r
    operating = erg > TOL.active_ergotropy and W < 0.0 and Q_H > 0.0
    report = CycleReport(
        W=W,
        Q_d_H=Q_d_H,
        Q_r_H=Q_r_H,
        Q_C=Q_C,
        ergotropy_oss=erg,
        efficiency=-W / Q_H if operating else float("nan"),
        power=-W / tau if operating else 0.0,
        oss_state=start,
        operating=operating,
        tau=tau,
        tau_d=schedule.tau_d,
        tau_r=tau_r,
        energy_change=dU,
        details={"discharge": discharge, "recharge": recharge, "closure": trace_norm(end - start)},
    )
    return report, end


def simulate(model: EngineModel, schedule: CycleSchedule, step_scale: float = 1.0,
             require_diagonal: bool = True) -> CycleReport:
    """Find the cycle's starting state and run one cycle from it."""
    if schedule.mode == ASYMPTOTIC:
        start, iterations = find_ness(model), 0
    else:
        start, iterations = solve_oss(model, schedule, step_scale,
                                      require_diagonal=require_diagonal)
    report, _ = run_cycle(model, start, schedule, step_scale)
    report.iterations = iterations
    report.converged = True
    return report


def carnot_limit(model: EngineModel) -> float:
    """Carnot bound of the effective temperatures.

    An inverted or balanced hot channel (pump at or above the decay rate) has
    a negative or infinite temperature, hotter than any positive one, and the
    bound is 1.
    """
    try:
        T_hot, T_cold = model.effective_temperatures()
    except InfiniteTemperature:
        return 1.0
    if T_hot < 0.0:
        return 1.0
    return carnot_bound(T_hot, T_cold)


def efficiency_decomposition(report: CycleReport, model: EngineModel) -> tuple:
    """Split the two-qubit hot heat into discharge and recharge parts per unit drive work.

    Returns ``(alpha, beta)``: the heat entering through the hot-bath
    transitions into ``|E>`` during each stroke, divided by
    ``-W E_A / (E_A - E_S)``.
    """
    if model.fluid_kind != TWO_QUBIT:
        raise ValueError("efficiency decomposition applies to the two-qubit fluid")
    if report.W == 0.0:
        raise ValueError("no drive work: decomposition undefined")
    E_S, E_A = model.energies[1], model.energies[2]
    top = model.dim - 1
    E_top = model.energies[top]

    def into_top(trace):
        flux = 0.0
        for k, ch in enumerate(model.channels):
            if ch.reservoir != HOT or top not in (ch.source, ch.target):
                continue
            gap = model.energies[ch.target] - model.energies[ch.source]
            moved = trace.heat_h0[-1, k] / gap
            flux += moved if ch.target == top else -moved
        return E_top * flux

    drive_part = -report.W * E_A / (E_A - E_S)
    alpha = into_top(report.details["discharge"]) / drive_part
    beta = into_top(report.details["recharge"]) / drive_part
    return alpha, beta
