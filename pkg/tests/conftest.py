import numpy as np
import pytest

from nessq.model import (
    QutritParams,
    TwoQubitParams,
    build_qutrit_lambda,
    build_qutrit_v,
    build_two_qubit,
)


@pytest.fixture
def qutrit_params():
    return QutritParams(omega_e=0.5, omega_i=1.0, T=0.1, pump=0.5, dispenser=0.5)


@pytest.fixture
def v_model(qutrit_params):
    return build_qutrit_v(qutrit_params)


@pytest.fixture
def lambda_model(qutrit_params):
    return build_qutrit_lambda(qutrit_params)


@pytest.fixture
def tq_params():
    return TwoQubitParams(omega_0=1.0, lam=0.05, gamma_0=1e-3, T_A=0.2, T_S=0.05)


@pytest.fixture
def tq_model(tq_params):
    return build_two_qubit(tq_params)


def random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
