import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unital_ks import pauli
from unital_ks.pauli import PauliForm

from conftest import random_form

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
forms = st.builds(lambda c: PauliForm.from_coefficients(c), st.lists(complexes, min_size=4, max_size=4))


def test_pauli_matrices_fixed_convention():
    s1, s2, s3 = pauli.SIGMA
    assert np.array_equal(s1, [[0, 1], [1, 0]])
    assert np.array_equal(s2, [[0, -1j], [1j, 0]])
    assert np.array_equal(s3, [[1, 0], [0, -1]])
    assert np.allclose(s1 @ s2, 1j * s3)


def test_matrix_roundtrip(rng):
    for _ in range(200):
        m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert np.allclose(pauli.to_matrix(pauli.from_matrix(m)), m, atol=1e-14)
        p = random_form(rng)
        assert pauli.from_matrix(pauli.to_matrix(p)).allclose(p)


def test_matrix_units():
    e11 = pauli.from_matrix([[1, 0], [0, 0]])
    assert e11.allclose(PauliForm(0.5, (0, 0, 0.5)))
    e12 = pauli.from_matrix([[0, 1], [0, 0]])
    assert e12.allclose(PauliForm(0, (0.5, 0.5j, 0)))


def test_from_matrix_rejects_shape():
    with pytest.raises(ValueError):
        pauli.from_matrix(np.eye(3))
    with pytest.raises(ValueError):
        PauliForm(0, (1, 2))


def test_multiply_matches_dense(rng):
    for _ in range(500):
        p, q = random_form(rng), random_form(rng)
        dense = pauli.to_matrix(p) @ pauli.to_matrix(q)
        assert np.allclose(pauli.to_matrix(pauli.multiply(p, q)), dense, rtol=0, atol=1e-12)


def test_star_square_matches_dense(rng):
    for _ in range(500):
        p = random_form(rng)
        X = pauli.to_matrix(p)
        assert np.allclose(pauli.to_matrix(pauli.star_square(p)), X.conj().T @ X, rtol=0, atol=1e-12)
        assert pauli.star_square(p).allclose(pauli.multiply(pauli.adjoint(p), p), atol=1e-12)


def test_star_square_of_sigma_combination():
    # (s2 + i s3)/sqrt2 squares (starred) to I - s1
    x = PauliForm(0, (0, 1 / np.sqrt(2), 1j / np.sqrt(2)))
    assert pauli.star_square(x).allclose(PauliForm(1, (-1, 0, 0)))


def test_adjoint_matches_dense(rng):
    p = random_form(rng)
    assert np.allclose(pauli.to_matrix(pauli.adjoint(p)), pauli.to_matrix(p).conj().T)


def test_cross_batches():
    e = np.eye(3)
    assert np.array_equal(pauli.cross(e[0], e[1]).real, e[2])
    u = np.arange(12).reshape(4, 3).astype(complex)
    v = u[::-1] * 1j
    out = pauli.cross(u, v)
    for i in range(4):
        assert np.allclose(out[i], np.cross(u[i], v[i]))


def test_is_psd_agrees_with_eigenvalues(rng):
    for _ in range(500):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        h = a + a.conj().T + rng.uniform(-1, 3) * np.eye(2)
        expected = np.linalg.eigvalsh(h)[0] >= -1e-9
        assert pauli.is_psd(pauli.from_matrix(h)) == expected


def test_is_hermitian():
    assert pauli.is_hermitian(PauliForm(1, (0.2, -0.3, 0.1)))
    assert not pauli.is_hermitian(PauliForm(1, (0.2j, 0, 0)))
    assert not pauli.is_psd(PauliForm(1, (0.2j, 0, 0)))


@settings(max_examples=200, deadline=None)
@given(forms, forms, forms)
def test_multiply_associative(p, q, r):
    left = pauli.multiply(pauli.multiply(p, q), r)
    right = pauli.multiply(p, pauli.multiply(q, r))
    assert left.allclose(right, atol=1e-9 * (1 + np.abs(left.coefficients).max()))


@settings(max_examples=200, deadline=None)
@given(forms)
def test_star_square_is_psd(p):
    assert pauli.is_psd(pauli.star_square(p), tol=1e-9 * (1 + p.norm_squared()))
