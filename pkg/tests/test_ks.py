import numpy as np
import pytest

from unital_ks import ks, maps, pauli
from unital_ks.maps import UnitalQubitMap
from unital_ks.numerics import OptimizerConfig
from unital_ks.pauli import PauliForm

from conftest import dense_apply, random_form, random_positive_map

FAMILY_16 = UnitalQubitMap([1, 0, 0], np.diag([0, 0.6, 0.6]))
X_23 = PauliForm(0, (0, 1 / np.sqrt(2), 1j / np.sqrt(2)))
E12 = pauli.from_matrix([[0, 1], [0, 0]])


def dense_defect(phi, X):
    P = dense_apply(phi, X)
    return dense_apply(phi, X.conj().T @ X) - P.conj().T @ P


def random_unit(rng):
    c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return PauliForm.from_coefficients(c / np.linalg.norm(c))


def test_defect_matches_dense(rng):
    for _ in range(200):
        phi = maps.random_map(rng)
        x = random_form(rng)
        D = ks.ks_defect(phi, x)
        assert np.allclose(D, dense_defect(phi, pauli.to_matrix(x)), atol=1e-12)
        assert np.allclose(D, D.conj().T, atol=1e-10)


def test_defect_examples():
    assert np.allclose(ks.ks_defect(maps.identity_map(), PauliForm(0.3, (1j, 2, -1))), 0, atol=1e-14)
    assert np.allclose(ks.ks_defect(maps.transposition_map(), E12), np.diag([-1, 1]))
    s1 = pauli.SIGMA[0]
    assert np.allclose(ks.ks_defect(FAMILY_16, X_23), -0.36 * (np.eye(2) - s1))


def test_check_ks_at():
    assert ks.check_ks_at(maps.identity_map(), PauliForm(0, (1, 0, 0)))
    assert ks.check_ks_at(maps.transposition_map(), PauliForm(0, (1, 0, 0)))
    assert not ks.check_ks_at(maps.transposition_map(), E12)


def test_scalar_conditions_examples():
    c = ks.scalar_conditions(FAMILY_16, X_23)
    assert c.lhs1 == pytest.approx(0.36) and c.rhs1 == pytest.approx(0, abs=1e-15)
    assert not c.holds()
    c = ks.scalar_conditions(maps.identity_map(), PauliForm(0.2, (1, 1j, 0)))
    assert c.holds()


def test_scalar_conditions_iff_defect(rng):
    for _ in range(100):
        phi = maps.random_map(rng)
        C = rng.standard_normal((100, 4)) + 1j * rng.standard_normal((100, 4))
        C /= np.linalg.norm(C, axis=1, keepdims=True)
        l1, r1, l2, r2 = ks.scalar_conditions_batch(phi, C)
        scalar = (l1 <= r1 + 1e-8) & (l2 <= r2 + 1e-8)
        assert np.array_equal(scalar, ks.defect_min_eigenvalues(phi, C) >= -1e-8)


def test_scalar_conditions_bistochastic_drop_lambda(rng):
    # with lam = 0 the lambda terms vanish: lhs1 = ||Tw||^2 + |w0|^2, rhs1 = |w0|^2 + ||w||^2
    T = rng.uniform(-1, 1, (3, 3))
    x = random_form(rng)
    c = ks.scalar_conditions(UnitalQubitMap([0, 0, 0], T), x)
    w = x.vector
    assert c.lhs1 == pytest.approx(np.linalg.norm(T @ w) ** 2 + abs(x.w0) ** 2)
    assert c.rhs1 == pytest.approx(abs(x.w0) ** 2 + np.linalg.norm(w) ** 2)


def test_defect_homogeneity(rng):
    for _ in range(100):
        phi, x = maps.random_map(rng), random_form(rng)
        c = complex(rng.standard_normal(), rng.standard_normal())
        assert np.allclose(ks.ks_defect(phi, x.scale(c)), abs(c) ** 2 * ks.ks_defect(phi, x), atol=1e-10)


def test_kadison_inequality_for_hermitian_x(rng):
    for _ in range(30):
        phi = random_positive_map(rng)
        for _ in range(20):
            x = PauliForm.from_coefficients(rng.standard_normal(4))
            assert ks.check_ks_at(phi, x, tol=1e-8 * (1 + x.norm_squared()))


def test_structured_starts():
    S = ks.structured_starts()
    assert S.shape == (14, 4)
    assert np.allclose(np.linalg.norm(S, axis=1), 1)
    assert any(abs(abs(np.vdot(s, X_23.coefficients)) - 1) < 1e-12 for s in S)


def test_verify_examples():
    r = ks.verify_ks(maps.identity_map())
    assert r.verdict is ks.Verdict.NO_VIOLATION_FOUND and r.witness is None
    assert abs(r.min_defect_eigenvalue) < 1e-12
    r = ks.verify_ks(maps.transposition_map())
    assert r.violation and r.min_defect_eigenvalue <= -0.99
    r = ks.verify_ks(FAMILY_16)
    assert r.violation and r.min_defect_eigenvalue <= -0.7199
    assert r.samples_evaluated >= 10_000 and r.seed == 42


def test_violation_witness_reproducible(rng):
    for _ in range(10):
        phi = maps.random_map(rng)
        r = ks.verify_ks(phi, OptimizerConfig(starts=500, seed=int(rng.integers(2**32))))
        if r.violation:
            assert np.linalg.eigvalsh(ks.ks_defect(phi, r.witness))[0] <= -ks.KS_TOL
            assert abs(r.witness.norm_squared() - 1) < 1e-9


def test_verify_deterministic():
    phi = UnitalQubitMap([0.3, -0.2, 0.1], [[0.5, 0.1, 0], [0, 0.4, 0.2], [0.1, 0, 0.3]])
    a = ks.verify_ks(phi, OptimizerConfig(starts=2000, seed=7))
    b = ks.verify_ks(phi, OptimizerConfig(starts=2000, seed=7))
    assert a.min_defect_eigenvalue == b.min_defect_eigenvalue and a.verdict == b.verdict


def test_no_violation_floor_bounds_samples(rng):
    phi = UnitalQubitMap([0, 0, 0], 0.3 * np.eye(3))
    r = ks.verify_ks(phi, OptimizerConfig(starts=1000))
    assert not r.violation
    C = rng.standard_normal((500, 4)) + 1j * rng.standard_normal((500, 4))
    C /= np.linalg.norm(C, axis=1, keepdims=True)
    assert ks.defect_min_eigenvalues(phi, C).min() >= r.min_defect_eigenvalue - 1e-12
