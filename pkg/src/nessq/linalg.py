"""Dense complex linear algebra for the few-level systems used here.

Matrices are plain ``numpy`` arrays. Vectorization is row-major throughout:
``vec(rho) = rho.reshape(-1)``, so the superoperator of ``rho -> A rho B`` is
``kron(A, B.T)``.
"""

from dataclasses import dataclass

import numpy as np

from nessq.tolerances import TOL


class LinalgError(ValueError):
    pass


class DimensionMismatch(LinalgError):
    pass


class NotHermitian(LinalgError):
    pass


class DegenerateKernel(LinalgError):
    pass


class ZeroTraceKernel(LinalgError):
    pass


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def matmul(a, b) -> np.ndarray:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def is_hermitian(m, tol: float = TOL.hermitian) -> bool:
    m = as_matrix(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    return float(np.max(np.abs(m - m.conj().T))) <= tol * scale


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eig(m, tol: float = TOL.jacobi_offdiag) -> HermitianSpectrum:
    """Cyclic complex Jacobi diagonalization of a Hermitian matrix.

    Each rotation first removes the phase of ``a[p, q]`` and then applies a
    real Givens rotation that zeroes it. Sweeps continue until the
    off-diagonal Frobenius norm drops below ``tol`` (scaled by the matrix
    norm when that exceeds one).
    """
    a = as_matrix(m)
    if not is_hermitian(a):
        raise NotHermitian("hermitian_eig requires a Hermitian matrix")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(TOL.jacobi_max_sweeps):
        if _offdiag_norm(a) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # diag(1, conj(phase)) followed by [[c, s], [-s, c]]
                u = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ u
    else:
        if _offdiag_norm(a) >= threshold:
            raise LinalgError("Jacobi iteration did not converge")

    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return HermitianSpectrum(w[order], v[:, order])


def null_vector(superop) -> np.ndarray:
    """Unit-trace Hermitian density matrix spanning the kernel of ``superop``.

    The kernel is read off the lowest eigenvector of ``L^dagger L`` (after
    scaling ``L`` to unit max-entry, which leaves the kernel unchanged). A
    second eigenvalue below the gap tolerance means the kernel is not
    one-dimensional.
    """
    big = as_matrix(superop)
    d = int(round(np.sqrt(big.shape[0])))
    if d * d != big.shape[0]:
        raise DimensionMismatch(f"superoperator size {big.shape[0]} is not a square")
    scale = float(np.max(np.abs(big)))
    if scale == 0.0:
        raise DegenerateKernel("zero superoperator: every state is stationary")
    ls = big / scale
    spec = hermitian_eig(ls.conj().T @ ls)
    if spec.eigenvalues[1] < TOL.kernel_gap:
        raise DegenerateKernel(
            f"second-smallest eigenvalue of L'L is {spec.eigenvalues[1]:.3e}"
        )
    rho = spec.eigenvectors[:, 0].reshape(d, d)
    tr = np.trace(rho)
    if abs(tr) < 1e-12 * np.max(np.abs(rho)):
        raise ZeroTraceKernel("kernel vector has zero trace")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.linalg.norm(ls @ rho.reshape(-1)))
    if residual > TOL.kernel_residual:
        raise LinalgError(f"kernel residual {residual:.3e} above tolerance")
    return rho


def fixed_point(propagator) -> np.ndarray:
    """Unit-trace solution of ``M vec(rho) = vec(rho)`` for a trace-preserving map.

    One redundant row of ``M - I`` is replaced by the trace condition and
    the resulting square system is solved in the least-squares sense.
    """
    m = as_matrix(propagator)
    d = int(round(np.sqrt(m.shape[0])))
    a = m - np.eye(m.shape[0])
    trace_row = np.eye(d).reshape(-1)
    system = np.vstack([a, trace_row])
    rhs = np.zeros(system.shape[0], dtype=complex)
    rhs[-1] = 1.0
    x, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    rho = x.reshape(d, d)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def trace_norm(m) -> float:
    m = as_matrix(m)
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T)))))


def superop_left_right(left, right) -> np.ndarray:
    """Superoperator of ``rho -> left @ rho @ right`` in row-major vec form."""
    return np.kron(as_matrix(left), as_matrix(right).T)
