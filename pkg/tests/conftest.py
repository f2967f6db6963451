import numpy as np
import pytest

from unital_ks import maps, pauli


def random_form(rng):
    c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return pauli.PauliForm.from_coefficients(c)


def dense_apply(phi, X):
    """Apply phi to a dense 2x2 matrix through traces against the Pauli basis."""
    w0 = np.trace(X) / 2
    w = np.array([np.trace(X @ s) / 2 for s in pauli.SIGMA])
    out = (w0 + phi.lam @ w) * np.eye(2)
    for c, s in zip(phi.T @ w, pauli.SIGMA):
        out = out + c * s
    return out


def random_positive_map(rng, scale=0.5):
    """Rejection-sample a map that is_positive accepts."""
    while True:
        phi = maps.random_map(rng, scale)
        if maps.is_positive(phi).positive:
            return phi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
