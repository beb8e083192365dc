"""Numerical tolerances shared across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    jacobi_offdiag: float = 1e-13
    jacobi_max_sweeps: int = 100
    kernel_gap: float = 1e-8
    kernel_residual: float = 1e-10
    trace: float = 1e-10
    positivity: float = 1e-9
    coherence_sum: float = 1e-9
    oss_change: float = 1e-12
    oss_max_iter: int = 10_000
    diagonal: float = 1e-9
    active_ergotropy: float = 1e-12
    asymptotic_delta: float = 1e-6
    # ratio below which a qutrit gap is considered unphysically small
    min_gap_ratio: float = 1e-3


TOL = Tolerances()
