"""Two-stroke quantum heat engines fuelled by non-equilibrium steady states."""

from nessq.model import (
    EngineModel,
    QutritParams,
    TwoQubitParams,
    build_qutrit_lambda,
    build_qutrit_v,
    build_two_qubit,
)
from nessq.cycle import CycleReport, CycleSchedule, find_ness, find_oss, run_cycle
from nessq.thermo import ergotropy

__all__ = [
    "EngineModel",
    "QutritParams",
    "TwoQubitParams",
    "build_qutrit_v",
    "build_qutrit_lambda",
    "build_two_qubit",
    "CycleReport",
    "CycleSchedule",
    "find_ness",
    "find_oss",
    "run_cycle",
    "ergotropy",
]

__version__ = "0.1.0"
