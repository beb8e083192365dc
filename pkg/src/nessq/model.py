"""Engine models for the three working fluids.

Every model is written in its energy eigenbasis. Qutrit levels are ordered
``(g, e, i)`` with ``E_g = 0``; two-qubit levels are ``(G, S, A, E)`` with
energies ``(0, w0 - lam, w0 + lam, 2 w0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from nessq.tolerances import TOL

HOT = "hot"
COLD = "cold"
PUMP = "auxiliary_pump"
DISPENSER = "auxiliary_dispenser"
RESERVOIR_TAGS = (HOT, COLD, PUMP, DISPENSER)

QUTRIT_V = "qutrit_v"
QUTRIT_LAMBDA = "qutrit_lambda"
TWO_QUBIT = "two_qubit"
FLUID_KINDS = (QUTRIT_V, QUTRIT_LAMBDA, TWO_QUBIT)


class ModelError(ValueError):
    pass


class ModelValidityError(ModelError):
    """Parameters outside the regime where the reservoir model holds."""


class InfiniteTemperature(ModelError):
    pass


@dataclass(frozen=True)
class JumpChannel:
    """One Lindblad term ``rate * D[|target><source|]``."""

    rate: float
    source: int
    target: int
    reservoir: str
    name: str = ""

    def __post_init__(self):
        if not self.rate >= 0.0:
            raise ModelError(f"negative rate {self.rate} on channel {self.name!r}")
        if self.source == self.target:
            raise ModelError("a jump must connect two distinct levels")
        if self.reservoir not in RESERVOIR_TAGS:
            raise ModelError(f"unknown reservoir tag {self.reservoir!r}")

    def jump(self, dim: int) -> np.ndarray:
        op = np.zeros((dim, dim), dtype=complex)
        op[self.target, self.source] = 1.0
        return op


@dataclass(frozen=True)
class DriveSpec:
    """Resonant drive coupling ``lower`` and ``upper`` with amplitude ``amplitude``.

    In the interaction picture the drive is ``amplitude * (|lower><upper| + h.c.)``.
    """

    lower: int
    upper: int
    amplitude: float = 0.0
    detuning: float = 0.0

    def operator(self, dim: int) -> np.ndarray:
        op = np.zeros((dim, dim), dtype=complex)
        op[self.lower, self.upper] = self.amplitude
        op[self.upper, self.lower] = self.amplitude
        return op


@dataclass(frozen=True)
class EngineModel:
    dim: int
    energies: tuple
    channels: tuple
    drive: DriveSpec
    fluid_kind: str
    labels: tuple
    rates: dict = field(default_factory=dict)
    params: object = None

    def __post_init__(self):
        if len(self.energies) != self.dim or len(self.labels) != self.dim:
            raise ModelError("energies/labels do not match the dimension")
        if self.fluid_kind not in FLUID_KINDS:
            raise ModelError(f"unknown fluid kind {self.fluid_kind!r}")
        if any(b < a for a, b in zip(self.energies, self.energies[1:])):
            raise ModelError("energies must be ascending")
        for ch in self.channels:
            if self.energies[ch.source] == self.energies[ch.target]:
                raise ModelError(f"channel {ch.name!r} connects degenerate levels")

    @property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(np.asarray(self.energies, dtype=complex))

    def with_amplitude(self, epsilon: float) -> EngineModel:
        return replace(self, drive=replace(self.drive, amplitude=float(epsilon)))

    def total_rate(self) -> float:
        return float(sum(ch.rate for ch in self.channels))

    def channels_tagged(self, tag: str) -> list:
        return [k for k, ch in enumerate(self.channels) if ch.reservoir == tag]

    def level(self, label: str) -> int:
        return self.labels.index(label)

    def effective_temperatures(self) -> tuple:
        """(T_hot, T_cold) of the two engineered reservoirs."""
        p = self.params
        r = self.rates
        if self.fluid_kind == TWO_QUBIT:
            return p.T_A, p.T_S
        if self.fluid_kind == QUTRIT_V:
            hot = effective_temperature(r["i+"], r["i-"], p.omega_i)
            cold = _temperature_or_zero(r["e+"], r["e-"], p.omega_e)
            return hot, cold
        hot = effective_temperature(r["g+"], r["g-"], p.omega_i)
        cold = _temperature_or_zero(r["e+"], r["e-"], p.omega_i - p.omega_e)
        return hot, cold


@dataclass(frozen=True)
class QutritParams:
    """Qutrit parameters in units where ``omega_i`` sets the energy scale.

    ``gamma_e``/``gamma_i`` are the bath couplings of the V configuration,
    ``gamma_g``/``gamma_e`` those of the Lambda configuration.
    """

    omega_e: float
    omega_i: float = 1.0
    T: float = 0.1
    pump: float = 0.0
    dispenser: float = 0.0
    gamma_e: float = 1.0
    gamma_i: float = 1.0
    gamma_g: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.omega_e < self.omega_i:
            raise ModelError("require 0 < omega_e < omega_i")
        if not self.T > 0.0:
            raise ModelError("bath temperature must be positive")
        for name in ("pump", "dispenser", "gamma_e", "gamma_i", "gamma_g"):
            if getattr(self, name) < 0.0:
                raise ModelError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class TwoQubitParams:
    omega_0: float = 1.0
    lam: float = 0.05
    gamma_0: float = 1e-3
    T_A: float = 0.2
    T_S: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.lam < self.omega_0:
            raise ModelError("require 0 < lambda < omega_0")
        if not (self.T_A > 0.0 and self.T_S > 0.0):
            raise ModelError("reservoir temperatures must be positive")
        if not self.gamma_0 > 0.0:
            raise ModelError("gamma_0 must be positive")


def bose_occupation(gap: float, T: float) -> float:
    if not gap > 0.0:
        raise ModelError(f"gap must be positive, got {gap}")
    if not T > 0.0:
        raise ModelError(f"temperature must be positive, got {T}")
    x = gap / T
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def effective_temperature(rate_up: float, rate_down: float, gap: float) -> float:
    """Temperature ``gap / ln(rate_down / rate_up)`` of a two-level channel pair."""
    if not (rate_up > 0.0 and rate_down > 0.0):
        raise ModelError("effective temperature needs positive rates")
    if rate_up == rate_down:
        raise InfiniteTemperature("equal up and down rates: infinite temperature")
    return gap / math.log(rate_down / rate_up)


def _temperature_or_zero(rate_up, rate_down, gap):
    # a channel with no upward rate behaves as a zero-temperature sink
    if rate_up == 0.0 and rate_down > 0.0:
        return 0.0
    return effective_temperature(rate_up, rate_down, gap)


def qutrit_v_rates(p: QutritParams) -> dict:
    ne = bose_occupation(p.omega_e, p.T)
    ni = bose_occupation(p.omega_i, p.T)
    return {
        "e+": p.gamma_e * ne,
        "e-": p.gamma_e * (ne + 1.0) + p.dispenser,
        "i+": p.gamma_i * ni + p.pump,
        "i-": p.gamma_i * (ni + 1.0),
    }


def qutrit_lambda_rates(p: QutritParams) -> dict:
    ng = bose_occupation(p.omega_i, p.T)
    ne = bose_occupation(p.omega_i - p.omega_e, p.T)
    return {
        "g+": p.gamma_g * ng + p.pump,
        "g-": p.gamma_g * (ng + 1.0),
        "e+": p.gamma_e * ne,
        "e-": p.gamma_e * (ne + 1.0) + p.dispenser,
    }


def two_qubit_bare_couplings(p: TwoQubitParams) -> dict:
    x = p.lam / p.omega_0
    low = p.gamma_0 * (1.0 - x) ** 3
    high = p.gamma_0 * (1.0 + x) ** 3
    return {"SG": low, "AE": low, "AG": high, "SE": high}


def two_qubit_rates(p: TwoQubitParams) -> dict:
    """The eight rates keyed ``'AG+'``, ``'SE-'``, ...

    ``XG+`` is G -> X, ``XG-`` is X -> G, ``XE+`` is X -> E, ``XE-`` is E -> X.
    """
    w0, lam = p.omega_0, p.lam
    gam = two_qubit_bare_couplings(p)
    n = {
        "AE": bose_occupation(w0 - lam, p.T_A),
        "SE": bose_occupation(w0 + lam, p.T_S),
        "AG": bose_occupation(w0 + lam, p.T_A),
        "SG": bose_occupation(w0 - lam, p.T_S),
    }
    rates = {}
    for key in ("AG", "SG", "AE", "SE"):
        rates[key + "+"] = gam[key] * n[key]
        rates[key + "-"] = gam[key] * (n[key] + 1.0)
    return rates


def _check_gap_ratio(ratio: float, what: str) -> None:
    if ratio < TOL.min_gap_ratio:
        raise ModelValidityError(
            f"{what} = {ratio:.3g} is below {TOL.min_gap_ratio}: the bath model breaks down"
        )


def build_qutrit_v(p: QutritParams) -> EngineModel:
    _check_gap_ratio(p.omega_e / p.omega_i, "omega_e/omega_i")
    r = qutrit_v_rates(p)
    g, e, i = 0, 1, 2
    channels = (
        JumpChannel(r["e+"], g, e, COLD, "e+"),
        JumpChannel(r["e-"], e, g, COLD, "e-"),
        JumpChannel(r["i+"], g, i, HOT, "i+"),
        JumpChannel(r["i-"], i, g, HOT, "i-"),
    )
    return EngineModel(
        dim=3,
        energies=(0.0, p.omega_e, p.omega_i),
        channels=channels,
        drive=DriveSpec(lower=e, upper=i),
        fluid_kind=QUTRIT_V,
        labels=("g", "e", "i"),
        rates=r,
        params=p,
    )


def build_qutrit_lambda(p: QutritParams) -> EngineModel:
    _check_gap_ratio((p.omega_i - p.omega_e) / p.omega_i, "(omega_i-omega_e)/omega_i")
    r = qutrit_lambda_rates(p)
    g, e, i = 0, 1, 2
    channels = (
        JumpChannel(r["g+"], g, i, HOT, "g+"),
        JumpChannel(r["g-"], i, g, HOT, "g-"),
        JumpChannel(r["e+"], e, i, COLD, "e+"),
        JumpChannel(r["e-"], i, e, COLD, "e-"),
    )
    return EngineModel(
        dim=3,
        energies=(0.0, p.omega_e, p.omega_i),
        channels=channels,
        drive=DriveSpec(lower=g, upper=e),
        fluid_kind=QUTRIT_LAMBDA,
        labels=("g", "e", "i"),
        rates=r,
        params=p,
    )


def build_two_qubit(p: TwoQubitParams) -> EngineModel:
    r = two_qubit_rates(p)
    G, S, A, E = 0, 1, 2, 3
    # collective jumps have matrix element sqrt(2) on every transition
    channels = (
        JumpChannel(2 * r["AG+"], G, A, HOT, "AG+"),
        JumpChannel(2 * r["AG-"], A, G, HOT, "AG-"),
        JumpChannel(2 * r["AE+"], A, E, HOT, "AE+"),
        JumpChannel(2 * r["AE-"], E, A, HOT, "AE-"),
        JumpChannel(2 * r["SG+"], G, S, COLD, "SG+"),
        JumpChannel(2 * r["SG-"], S, G, COLD, "SG-"),
        JumpChannel(2 * r["SE+"], S, E, COLD, "SE+"),
        JumpChannel(2 * r["SE-"], E, S, COLD, "SE-"),
    )
    w0, lam = p.omega_0, p.lam
    return EngineModel(
        dim=4,
        energies=(0.0, w0 - lam, w0 + lam, 2.0 * w0),
        channels=channels,
        drive=DriveSpec(lower=S, upper=A),
        fluid_kind=TWO_QUBIT,
        labels=("G", "S", "A", "E"),
        rates=r,
        params=p,
    )


def build(kind: str, params) -> EngineModel:
    builders = {
        QUTRIT_V: build_qutrit_v,
        QUTRIT_LAMBDA: build_qutrit_lambda,
        TWO_QUBIT: build_two_qubit,
    }
    try:
        return builders[kind](params)
    except KeyError:
        raise ModelError(f"unknown fluid kind {kind!r}") from None


def gibbs_state(energies, T: float) -> np.ndarray:
    e = np.asarray(energies, dtype=float)
    if not np.isfinite(T):
        w = np.ones_like(e)
    elif T == 0.0:
        w = (e == e.min()).astype(float)
    else:
        # a negative temperature gives the inverted distribution
        ref = e.min() if T > 0.0 else e.max()
        w = np.exp(-(e - ref) / T)
    return np.diag(w / w.sum()).astype(complex)
