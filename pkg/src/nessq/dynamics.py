"""Lindblad dynamics in the interaction picture of ``H_0``.

At resonance the drive is time independent in this frame and every jump
operator is an eigenoperator of ``H_0``, so the dissipator is unchanged.
Heat and work are integrated alongside the state as extra components of a
single linear ODE.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from nessq.linalg import superop_left_right
from nessq.model import EngineModel
from nessq.tolerances import TOL


class IntegrationError(RuntimeError):
    pass


def check_state(rho, tol_trace: float = TOL.trace, tol_pos: float = TOL.positivity) -> None:
    rho = np.asarray(rho)
    if np.max(np.abs(rho - rho.conj().T)) > TOL.hermitian:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol_trace:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(rho).min() < -tol_pos:
        raise ValueError("density matrix has a negative eigenvalue")


def drive_operator(model: EngineModel, drive_on: bool) -> np.ndarray:
    if not drive_on:
        return np.zeros((model.dim, model.dim), dtype=complex)
    return model.drive.operator(model.dim)


def work_operator(model: EngineModel) -> np.ndarray:
    """Interaction-frame image of ``dV/dt``, i.e. ``-i [H_0, V_I]``."""
    h0 = model.hamiltonian
    v = model.drive.operator(model.dim)
    return -1j * (h0 @ v - v @ h0)


def dissipator(rho: np.ndarray, rate: float, jump: np.ndarray) -> np.ndarray:
    jd = jump.conj().T
    jdj = jd @ jump
    return rate * (jump @ rho @ jd - 0.5 * (jdj @ rho + rho @ jdj))


def lindblad_rhs(rho, model: EngineModel, drive_on: bool) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    v = drive_operator(model, drive_on)
    out = -1j * (v @ rho - rho @ v)
    for ch in model.channels:
        out = out + dissipator(rho, ch.rate, ch.jump(model.dim))
    return out


def channel_superops(model: EngineModel) -> list:
    d = model.dim
    eye = np.eye(d)
    ops = []
    for ch in model.channels:
        j = ch.jump(d)
        jdj = j.conj().T @ j
        ops.append(
            ch.rate
            * (
                superop_left_right(j, j.conj().T)
                - 0.5 * superop_left_right(jdj, eye)
                - 0.5 * superop_left_right(eye, jdj)
            )
        )
    return ops


def liouvillian(model: EngineModel, drive_on: bool) -> np.ndarray:
    d = model.dim
    eye = np.eye(d)
    v = drive_operator(model, drive_on)
    big = -1j * (superop_left_right(v, eye) - superop_left_right(eye, v))
    for op in channel_superops(model):
        big = big + op
    return big


def _functional_row(op: np.ndarray) -> np.ndarray:
    # Tr[X @ rho] as a row acting on row-major vec(rho)
    return op.T.reshape(-1)


def augmented_generator(model: EngineModel, drive_on: bool) -> np.ndarray:
    """Generator of ``(vec(rho), W, Q_j^{H0}..., Q_j^{V}...)``."""
    d2 = model.dim**2
    m = len(model.channels)
    n = d2 + 1 + 2 * m
    gen = np.zeros((n, n), dtype=complex)
    gen[:d2, :d2] = liouvillian(model, drive_on)
    if drive_on:
        gen[d2, :d2] = _functional_row(work_operator(model))
    h0_row = _functional_row(model.hamiltonian)
    v_row = _functional_row(drive_operator(model, drive_on))
    for k, op in enumerate(channel_superops(model)):
        gen[d2 + 1 + k, :d2] = h0_row @ op
        gen[d2 + 1 + m + k, :d2] = v_row @ op
    return gen


def rk4_step_matrix(gen: np.ndarray, h: float) -> np.ndarray:
    """One classic RK4 step for ``y' = gen @ y``.

    For a linear autonomous system the four RK4 stages collapse exactly to
    the degree-4 Taylor polynomial of ``h * gen``.
    """
    a = h * gen
    a2 = a @ a
    a3 = a2 @ a
    a4 = a3 @ a
    return np.eye(gen.shape[0]) + a + a2 / 2.0 + a3 / 6.0 + a4 / 24.0


def default_step(model: EngineModel, duration: float, drive_on: bool) -> float:
    eps = abs(model.drive.amplitude) if drive_on else 0.0
    fastest = max(eps, model.total_rate())
    step = duration / 200.0
    if fastest > 0.0:
        step = min(step, 0.01 / fastest)
    return step


def stroke_grid(model, duration, drive_on, step=None, step_scale=1.0):
    if not duration > 0.0:
        raise ValueError("stroke duration must be positive")
    h = (step if step is not None else default_step(model, duration, drive_on)) * step_scale
    n = max(1, math.ceil(duration / h - 1e-9))
    return n, duration / n


@dataclass
class StrokeTrace:
    times: np.ndarray
    states: np.ndarray  # (n+1, d, d)
    work: np.ndarray  # cumulative, (n+1,)
    heat_h0: np.ndarray  # cumulative per channel, (n+1, m)
    heat_drive: np.ndarray  # cumulative drive cross term per channel, (n+1, m)
    drive_on: bool
    model: EngineModel

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def total_work(self) -> float:
        return float(self.work[-1])

    @property
    def channel_heat(self) -> np.ndarray:
        return self.heat_h0[-1] + self.heat_drive[-1]

    def heat(self, tag: str) -> float:
        idx = self.model.channels_tagged(tag)
        return float(np.sum(self.channel_heat[idx]))

    def heat_by_tag(self) -> dict:
        tags = sorted({ch.reservoir for ch in self.model.channels})
        return {t: self.heat(t) for t in tags}

    def energy_change(self) -> float:
        """Change of ``Tr[rho (H_0 + V_I)]`` across the stroke."""
        h = self.model.hamiltonian + drive_operator(self.model, self.drive_on)
        e0 = np.trace(self.states[0] @ h).real
        e1 = np.trace(self.states[-1] @ h).real
        return float(e1 - e0)


def _monitor(states: np.ndarray, h: float) -> None:
    traces = np.einsum("kii->k", states)
    bad = np.abs(traces - 1.0) > TOL.positivity
    if np.any(bad):
        k = int(np.argmax(bad))
        raise IntegrationError(f"trace drift {traces[k].real - 1:.3e} at step {k} (h={h:.3e})")
    mins = np.linalg.eigvalsh(0.5 * (states + np.conj(np.swapaxes(states, 1, 2)))).min(axis=1)
    if mins.min() < -TOL.positivity:
        k = int(np.argmin(mins))
        raise IntegrationError(
            f"positivity breach {mins[k]:.3e} at step {k}; reduce the step (h={h:.3e})"
        )


def _run(y0, step_matrix, n_steps):
    ys = np.empty((n_steps + 1, y0.size), dtype=complex)
    ys[0] = y0
    y = y0
    for k in range(n_steps):
        y = step_matrix @ y
        ys[k + 1] = y
    return ys


def _trace_from(ys, times, model, drive_on, h):
    d = model.dim
    d2 = d * d
    m = len(model.channels)
    states = ys[:, :d2].reshape(-1, d, d)
    _monitor(states, h)
    return StrokeTrace(
        times=times,
        states=states,
        work=ys[:, d2].real.copy(),
        heat_h0=ys[:, d2 + 1 : d2 + 1 + m].real.copy(),
        heat_drive=ys[:, d2 + 1 + m :].real.copy(),
        drive_on=drive_on,
        model=model,
    )


def evolve(state, model: EngineModel, duration: float, drive_on: bool,
           step: float | None = None, step_scale: float = 1.0) -> StrokeTrace:
    rho0 = np.asarray(state, dtype=complex)
    check_state(rho0)
    n, h = stroke_grid(model, duration, drive_on, step, step_scale)
    gen = augmented_generator(model, drive_on)
    y0 = np.zeros(gen.shape[0], dtype=complex)
    y0[: model.dim**2] = rho0.reshape(-1)
    ys = _run(y0, rk4_step_matrix(gen, h), n)
    times = np.linspace(0.0, duration, n + 1)
    return _trace_from(ys, times, model, drive_on, h)


def evolve_until(state, model: EngineModel, stop, step: float, max_time: float,
                 drive_on: bool = False) -> StrokeTrace:
    """Integrate with a fixed step until ``stop(rho)`` is true or ``max_time`` passes."""
    rho0 = np.asarray(state, dtype=complex)
    check_state(rho0)
    d = model.dim
    gen = augmented_generator(model, drive_on)
    p = rk4_step_matrix(gen, step)
    y = np.zeros(gen.shape[0], dtype=complex)
    y[: d * d] = rho0.reshape(-1)
    ys = [y]
    max_steps = math.ceil(max_time / step)
    for _ in range(max_steps):
        y = p @ y
        ys.append(y)
        if stop(y[: d * d].reshape(d, d)):
            break
    else:
        raise IntegrationError(f"stop condition not met within t={max_time:.3e}")
    ys = np.array(ys)
    times = step * np.arange(len(ys))
    return _trace_from(ys, times, model, drive_on, step)


def stroke_propagator(model: EngineModel, duration: float, drive_on: bool,
                      step: float | None = None, step_scale: float = 1.0) -> np.ndarray:
    """The exact RK4 map of ``vec(rho)`` over one stroke."""
    n, h = stroke_grid(model, duration, drive_on, step, step_scale)
    d2 = model.dim**2
    gen = liouvillian(model, drive_on)
    return np.linalg.matrix_power(rk4_step_matrix(gen, h), n)[:d2, :d2]


def coherence_sum_check(trace: StrokeTrace, tol: float = TOL.coherence_sum) -> bool:
    a, b = trace.model.drive.lower, trace.model.drive.upper
    s = trace.states[:, a, b] + trace.states[:, b, a]
    return bool(np.all(np.abs(s) < tol))


def trace_rows(trace: StrokeTrace, t0: float = 0.0, w0: float = 0.0, q0: dict | None = None):
    """Rows for the CSV trace dump, offset by previously accumulated totals."""
    model = trace.model
    a, b = model.drive.lower, model.drive.upper
    tags = sorted({ch.reservoir for ch in model.channels})
    idx = {t: model.channels_tagged(t) for t in tags}
    q0 = q0 or {t: 0.0 for t in tags}
    heat = trace.heat_h0 + trace.heat_drive
    for k, t in enumerate(trace.times):
        rho = trace.states[k]
        row = [t0 + t]
        row += [rho[j, j].real for j in range(model.dim)]
        row += [rho[a, b].real, rho[a, b].imag, w0 + trace.work[k]]
        row += [q0[tag] + float(np.sum(heat[k, idx[tag]])) for tag in tags]
        yield row


def trace_header(model: EngineModel) -> list:
    tags = sorted({ch.reservoir for ch in model.channels})
    a, b = model.labels[model.drive.lower], model.labels[model.drive.upper]
    return (
        ["t"]
        + [f"p_{lab}" for lab in model.labels]
        + [f"re_rho_{a}{b}", f"im_rho_{a}{b}", "W"]
        + [f"Q_{tag}" for tag in tags]
    )


def write_trace_csv(path, traces) -> None:
    """Write consecutive strokes as one continuous trace."""
    traces = list(traces)
    model = traces[0].model
    tags = sorted({ch.reservoir for ch in model.channels})
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace_header(model))
        t0, w0, q0 = 0.0, 0.0, {t: 0.0 for t in tags}
        for tr in traces:
            for row in trace_rows(tr, t0, w0, q0):
                writer.writerow([format(x, ".17g") for x in row])
            t0 += tr.duration
            w0 += tr.total_work
            q0 = {t: q0[t] + tr.heat(t) for t in tags}
