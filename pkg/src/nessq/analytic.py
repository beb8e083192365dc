"""Closed-form short-cycle and steady-state results.

Symbol clashes are resolved by renaming: the two-qubit fixed-point
coefficients are ``alpha_fp``/``beta_fp`` (not the heat ratios of
:func:`nessq.cycle.efficiency_decomposition`) and the steady-state numerator
is ``eps_num`` (not the drive amplitude).

Two-qubit rates use the keys of :func:`nessq.model.two_qubit_rates`; the
aggregate rates are ``G+ = AG+ + SG+`` and so on.

The short-cycle ergotropy and power are clamped at zero: the closed forms
equal the stored ergotropy only where they are positive, and the report is
flagged inactive otherwise. ``K_V``, ``K_Lambda`` and ``kappa`` keep their sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from nessq.model import (
    QUTRIT_LAMBDA,
    QUTRIT_V,
    TWO_QUBIT,
    QutritParams,
    TwoQubitParams,
    qutrit_lambda_rates,
    qutrit_v_rates,
    two_qubit_rates,
)


@dataclass
class ClosedFormReport:
    fluid_kind: str
    quantities: dict = field(default_factory=dict)
    active: bool = True

    def __getitem__(self, key):
        return self.quantities[key]

    def populations(self) -> list:
        keys = {
            QUTRIT_V: ("p_g", "p_e", "p_i"),
            QUTRIT_LAMBDA: ("p_g", "p_e", "p_i"),
            TWO_QUBIT: ("r_G", "r_S", "r_A", "r_E"),
        }[self.fluid_kind]
        return [self.quantities[k] for k in keys if k in self.quantities]

    def to_dict(self) -> dict:
        return {"fluid_kind": self.fluid_kind, "active": self.active, **self.quantities}


def k_v(r: dict) -> float:
    num = r["e-"] * r["i+"] - r["e+"] * r["i-"]
    den = 2.0 * (r["e+"] + r["i+"]) + r["e-"] + r["i-"]
    return num / den


def k_lambda(r: dict) -> float:
    num = r["e-"] * r["g+"] - r["e+"] * r["g-"]
    den = 2.0 * (r["e-"] + r["g-"]) + r["e+"] + r["g+"]
    return num / den


def qutrit_v_populations(r: dict, tau: float) -> dict:
    ep, em, ip, im = r["e+"], r["e-"], r["i+"], r["i-"]
    nu = 2.0 * (ip + ep) + im + em - (ip * (ep + em) + em * im) * tau
    p_i = (ep + ip - ep * im * tau) / nu
    p_e = (p_i * (1.0 - (em + ep) * tau) + ep * tau) / (1.0 + ep * tau)
    return {"nu": nu, "p_i": p_i, "p_e": p_e, "p_g": 1.0 - p_i - p_e}


def qutrit_lambda_populations(r: dict, tau: float) -> dict:
    gp, gm, ep, em = r["g+"], r["g-"], r["e+"], r["e-"]
    mu = 2.0 * (gm + em) + gp + ep - (gp * (ep + em) + ep * gm) * tau
    p_e = (gm + em - ep * gm * tau) / mu
    p_g = (p_e * (1.0 - (gm + gp) * tau) + gm * tau) / (1.0 + gm * tau)
    return {"mu": mu, "p_e": p_e, "p_g": p_g, "p_i": 1.0 - p_e - p_g}


def qutrit_v_short_cycle(p: QutritParams, tau: float) -> ClosedFormReport:
    r = qutrit_v_rates(p)
    K = k_v(r)
    gain = max(p.omega_i - p.omega_e, 0.0) * max(K, 0.0)
    q = {
        "K_V": K,
        "E_SC": gain * tau,
        "Q_SC_H": p.omega_i * K * tau,
        "eta_SC": 1.0 - p.omega_e / p.omega_i,
        "P_SC": gain,
        **qutrit_v_populations(r, tau),
    }
    return ClosedFormReport(QUTRIT_V, q, active=K > 0.0)


def qutrit_lambda_short_cycle(p: QutritParams, tau: float) -> ClosedFormReport:
    r = qutrit_lambda_rates(p)
    K = k_lambda(r)
    gain = p.omega_e * max(K, 0.0)
    q = {
        "K_Lambda": K,
        "E_SC": gain * tau,
        "Q_SC_H": p.omega_i * K * tau,
        "eta_SC": p.omega_e / p.omega_i,
        "P_SC": gain,
        **qutrit_lambda_populations(r, tau),
    }
    return ClosedFormReport(QUTRIT_LAMBDA, q, active=K > 0.0)


def power_ratio_v_lambda(omega_e: float, omega_i: float) -> float:
    """Limiting ``P_V / P_Lambda`` at zero temperature and no dispenser."""
    if not 0.0 < omega_e < omega_i:
        raise ValueError("require 0 < omega_e < omega_i")
    return omega_i / omega_e - 1.0


def power_ratio_from_rates(p_v: QutritParams, p_l: QutritParams) -> float:
    """Short-cycle ``P_V / P_Lambda`` for arbitrary rates."""
    return qutrit_v_short_cycle(p_v, 1.0)["P_SC"] / qutrit_lambda_short_cycle(p_l, 1.0)["P_SC"]


def _aggregates(r: dict) -> dict:
    return {
        "G+": r["AG+"] + r["SG+"],
        "G-": r["AG-"] + r["SG-"],
        "E+": r["AE+"] + r["SE+"],
        "E-": r["AE-"] + r["SE-"],
    }


def kappa(r: dict) -> float:
    a = _aggregates(r)
    g_term = r["AG+"] * r["SG-"] - r["AG-"] * r["SG+"]
    e_term = r["AE+"] * r["SE-"] - r["AE-"] * r["SE+"]
    omega = a["E-"] * (a["G+"] + a["G-"]) + a["G+"] * (a["E+"] + a["E-"])
    return (a["E-"] * g_term - a["G+"] * e_term) / omega


def two_qubit_short_cycle(p: TwoQubitParams, tau: float) -> ClosedFormReport:
    r = two_qubit_rates(p)
    a = _aggregates(r)
    w0, lam = p.omega_0, p.lam
    E_S, E_A = w0 - lam, w0 + lam
    g_term = r["AG+"] * r["SG-"] - r["SG+"] * r["AG-"]
    e_term = r["AE+"] * r["SE-"] - r["SE+"] * r["AE-"]
    omega = a["E-"] * (a["G+"] + a["G-"]) + a["G+"] * (a["E+"] + a["E-"])
    kap = kappa(r)
    f = a["G+"] * e_term / (a["E-"] * g_term)
    heat = 2.0 / omega * ((w0 - lam) * a["G+"] * e_term + (w0 + lam) * a["E-"] * g_term) * tau

    alpha_fp = 1.0 - tau * (
        r["SG-"] / a["G+"] * (r["AG+"] - r["SG+"])
        + r["SE+"] / a["E-"] * (r["AE-"] - r["SE-"])
        + r["SE+"] + r["SG-"]
    )
    beta_fp = 1.0 - tau * (
        r["AG-"] / a["G+"] * (r["SG+"] - r["AG+"])
        + r["AE+"] / a["E-"] * (r["SE-"] - r["AE-"])
        + r["AG-"] + r["AE+"]
    )
    ratio = alpha_fp / beta_fp
    chi = (
        (1.0 + ratio) * a["G+"] * a["E-"]
        + a["E-"] * (r["SG-"] + ratio * r["AG-"])
        + a["G+"] * (r["SE+"] + ratio * r["AE+"])
    )
    r_A = a["G+"] * a["E-"] / chi
    r_S = ratio * r_A
    # ground and top populations from the balance of the G and E levels
    r_G = (r["SG-"] * r_A + r["AG-"] * r_S) / a["G+"]
    r_E = (r["AE+"] * r_S + r["SE+"] * r_A) / a["E-"]

    q = {
        "kappa": kap,
        "Omega": omega,
        "f": f,
        "E_SC": 4.0 * lam * max(kap, 0.0) * tau,
        "Q_SC_H": heat,
        "eta_SC": (1.0 - E_S / E_A) * (1.0 - f) / (1.0 + E_S / E_A * f),
        "eta_SC_max": 1.0 - E_S / E_A,
        "P_SC": 4.0 * lam * max(kap, 0.0),
        "P_SC_max_cold_limited": 2.0 * (E_A - E_S) * g_term / a["G-"],
        "P_SC_max_hot_limited": 2.0 * (E_A - E_S) * r["AG+"],
        "alpha_fp": alpha_fp,
        "beta_fp": beta_fp,
        "chi": chi,
        "r_G": r_G,
        "r_S": r_S,
        "r_A": r_A,
        "r_E": r_E,
    }
    return ClosedFormReport(TWO_QUBIT, q, active=kap > 0.0)


def ness_from_rates(r: dict) -> dict:
    a = _aggregates(r)
    nu = 1.0 + r["AG-"] / a["G+"] + r["AE+"] / a["E-"]
    mu = 1.0 + r["SG-"] / a["G+"] + r["SE+"] / a["E-"]
    eps_num = r["AE+"] * r["SE-"] * a["G+"] + r["SG+"] * r["AG-"] * a["E-"]
    zeta = r["AG+"] * r["SG-"] * a["E-"] + r["AE-"] * r["SE+"] * a["G+"]
    K = (
        r["AE+"] * r["SG-"] * (r["SE-"] + r["AG+"])
        + r["SE+"] * r["AG-"] * (r["AE-"] + r["SG+"])
        + a["E-"] * (r["AG-"] * r["SG+"] + r["SG-"] * (r["AG-"] + r["AG+"]))
        + a["G+"] * (r["AE-"] * r["SE+"] + r["AE+"] * (r["SE+"] + r["SE-"]))
    )
    r_A = zeta / K
    r_S = eps_num / K
    r_E = (r["SE+"] * r_S + r["AE+"] * r_A) / a["E-"]
    r_G = (r["SG-"] * r_S + r["AG-"] * r_A) / a["G+"]
    return {
        "nu": nu, "mu": mu, "eps_num": eps_num, "zeta": zeta, "K": K,
        "r_G": r_G, "r_S": r_S, "r_A": r_A, "r_E": r_E,
    }


def two_qubit_ness(p: TwoQubitParams) -> ClosedFormReport:
    q = ness_from_rates(two_qubit_rates(p))
    q["E_NESS"] = 2.0 * p.lam / q["K"] * (q["zeta"] - q["eps_num"])
    return ClosedFormReport(TWO_QUBIT, q, active=q["E_NESS"] > 0.0)


def short_cycle(kind: str, params, tau: float) -> ClosedFormReport:
    table = {
        QUTRIT_V: qutrit_v_short_cycle,
        QUTRIT_LAMBDA: qutrit_lambda_short_cycle,
        TWO_QUBIT: two_qubit_short_cycle,
    }
    return table[kind](params, tau)
