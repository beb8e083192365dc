"""Ergotropy, passive states and Carnot bounds."""

from dataclasses import dataclass

import numpy as np

from nessq.linalg import hermitian_eig
from nessq.tolerances import TOL


@dataclass(frozen=True)
class ErgotropyReport:
    ergotropy: float
    passive_state: np.ndarray
    extraction_unitary: np.ndarray


def ergotropy(state, energies) -> ErgotropyReport:
    """Maximal unitary work extractable from ``state`` under ``diag(energies)``.

    The extraction unitary maps the k-th largest eigenvector of the state
    onto the k-th lowest energy level. Ties in the state spectrum are broken
    by the eigensolver's ordering, so the unitary is deterministic while the
    ergotropy value does not depend on the choice.
    """
    rho = np.asarray(state, dtype=complex)
    e = np.asarray(energies, dtype=float)
    if np.any(np.diff(e) < 0):
        raise ValueError("energies must be ascending")
    spec = hermitian_eig(rho)
    # stable sort on (-r_k, index) keeps equal eigenvalues in solver order
    order = sorted(range(len(e)), key=lambda k: (-spec.eigenvalues[k], k))
    r = spec.eigenvalues[order]
    vecs = spec.eigenvectors[:, order]
    unitary = np.zeros((len(e), len(e)), dtype=complex)
    for k in range(len(e)):
        unitary[k, :] = vecs[:, k].conj()  # |E_k><r_k| with |E_k> the k-th basis vector
    passive = np.diag(r).astype(complex)
    value = float(np.trace(rho @ np.diag(e)).real - np.dot(r, e))
    return ErgotropyReport(max(value, 0.0), passive, unitary)


def is_active(state, energies) -> bool:
    return ergotropy(state, energies).ergotropy > TOL.active_ergotropy


def carnot_bound(T_hot: float, T_cold: float) -> float:
    if not T_cold >= 0.0 or not T_hot > 0.0 or T_hot < T_cold:
        raise ValueError(f"need T_hot >= T_cold >= 0, got {T_hot}, {T_cold}")
    return 1.0 - T_cold / T_hot
