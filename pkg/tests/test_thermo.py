import itertools

import numpy as np
import pytest

from conftest import random_density
from nessq.thermo import carnot_bound, ergotropy, is_active


def brute_force_ergotropy(rho, energies):
    """Minimum energy over all orderings of the state spectrum on the levels."""
    r = np.linalg.eigvalsh(rho)
    e = np.asarray(energies)
    mean = np.trace(rho @ np.diag(e)).real
    return mean - min(np.dot(perm, e) for perm in itertools.permutations(r))


def test_inverted_qubit():
    rep = ergotropy(np.diag([0.2, 0.8]), (0.0, 1.0))
    assert rep.ergotropy == pytest.approx(0.6)
    assert np.allclose(np.diag(rep.passive_state).real, [0.8, 0.2])


def test_passive_state_has_zero_ergotropy():
    assert ergotropy(np.diag([0.7, 0.2, 0.1]), (0.0, 1.0, 3.0)).ergotropy == 0.0
    assert not is_active(np.diag([0.7, 0.2, 0.1]), (0.0, 1.0, 3.0))


def test_coherent_pure_state():
    psi = np.array([1.0, 1.0]) / np.sqrt(2.0)
    rep = ergotropy(np.outer(psi, psi.conj()), (0.0, 1.0))
    assert rep.ergotropy == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_matches_brute_force_and_unitary_reaches_passive(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 4)
    e = (0.0, 0.9, 1.1, 2.0)
    rep = ergotropy(rho, e)
    assert rep.ergotropy == pytest.approx(brute_force_ergotropy(rho, e), abs=1e-12)
    u = rep.extraction_unitary
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    assert np.allclose(u @ rho @ u.conj().T, rep.passive_state, atol=1e-12)


def test_degenerate_spectrum_is_deterministic():
    rho = np.diag([0.25, 0.25, 0.5])
    a = ergotropy(rho, (0.0, 1.0, 2.0))
    b = ergotropy(rho, (0.0, 1.0, 2.0))
    assert np.array_equal(a.extraction_unitary, b.extraction_unitary)
    assert a.ergotropy == pytest.approx(0.5)


def test_energies_must_be_ascending():
    with pytest.raises(ValueError):
        ergotropy(np.eye(2) / 2, (1.0, 0.0))


def test_carnot_bound():
    assert carnot_bound(0.2, 0.05) == pytest.approx(0.75)
    assert carnot_bound(1.0, 0.0) == 1.0
    assert carnot_bound(0.3, 0.3) == 0.0
    for bad in ((0.1, 0.2), (0.0, 0.0), (1.0, -0.1)):
        with pytest.raises(ValueError):
            carnot_bound(*bad)
