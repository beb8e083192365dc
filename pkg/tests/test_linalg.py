import numpy as np
import pytest

from nessq import linalg
from nessq.dynamics import liouvillian
from nessq.model import DriveSpec, EngineModel, JumpChannel, HOT


def triple_loop(a, b):
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=complex)
    for i in range(n):
        for j in range(m):
            for t in range(k):
                out[i, j] += a[i, t] * b[t, j]
    return out


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def test_matmul_matches_triple_loop():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    b = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    assert np.allclose(linalg.matmul(a, b), triple_loop(a, b), atol=1e-14)


def test_matmul_shape_mismatch():
    with pytest.raises(linalg.DimensionMismatch):
        linalg.matmul(np.eye(2), np.eye(3))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 9, 16])
def test_jacobi_reconstructs_and_matches_numpy(n):
    rng = np.random.default_rng(n)
    m = random_hermitian(rng, n)
    spec = linalg.hermitian_eig(m)
    assert np.allclose(spec.reconstruct(), m, atol=1e-12)
    v = spec.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
    assert np.allclose(spec.eigenvalues, np.linalg.eigvalsh(m), atol=1e-12)
    assert np.all(np.diff(spec.eigenvalues) >= 0)


def test_jacobi_pauli_y():
    y = np.array([[0, -1j], [1j, 0]])
    spec = linalg.hermitian_eig(y)
    assert np.allclose(spec.eigenvalues, [-1.0, 1.0], atol=1e-14)


def test_jacobi_degenerate_and_diagonal():
    spec = linalg.hermitian_eig(np.diag([2.0, 1.0, 2.0]))
    assert np.allclose(spec.eigenvalues, [1.0, 2.0, 2.0])
    spec = linalg.hermitian_eig(np.eye(3))
    assert np.allclose(spec.eigenvectors, np.eye(3))


def test_jacobi_rejects_non_hermitian():
    with pytest.raises(linalg.NotHermitian):
        linalg.hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def _decay_model(rate_down, rate_up):
    ch = (
        JumpChannel(rate_down, 1, 0, HOT, "down"),
        JumpChannel(rate_up, 0, 1, HOT, "up"),
    )
    return EngineModel(2, (0.0, 1.0), ch, DriveSpec(0, 1), "two_qubit", ("g", "e"))


def test_null_vector_two_level_balance():
    m = _decay_model(2.0, 0.5)
    rho = linalg.null_vector(liouvillian(m, drive_on=False))
    # detailed balance: p_e / p_g = up / down
    assert rho[1, 1].real / rho[0, 0].real == pytest.approx(0.25, rel=1e-12)
    assert abs(rho[0, 1]) < 1e-14
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-14)


def test_null_vector_degenerate_kernel():
    # no dissipation at all: every diagonal state is stationary
    with pytest.raises(linalg.DegenerateKernel):
        linalg.null_vector(np.zeros((4, 4)))


def test_null_vector_rejects_non_square_dimension():
    with pytest.raises(linalg.DimensionMismatch):
        linalg.null_vector(np.eye(3))


def test_fixed_point_of_contraction():
    m = _decay_model(1.0, 0.25)
    big = liouvillian(m, drive_on=False)
    # a first-order step map shares the Liouvillian kernel
    prop = np.eye(4) + 0.1 * big
    rho = linalg.fixed_point(prop)
    assert rho[1, 1].real / rho[0, 0].real == pytest.approx(0.25, rel=1e-12)


def test_trace_norm_and_superop():
    assert linalg.trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1.0)
    rng = np.random.default_rng(3)
    a, b, x = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    lhs = linalg.superop_left_right(a, b) @ x.reshape(-1)
    assert np.allclose(lhs, (a @ x @ b).reshape(-1))
