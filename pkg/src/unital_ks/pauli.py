"""Pauli-basis algebra for 2x2 complex matrices.

A matrix is written as ``w0*I + w1*s1 + w2*s2 + w3*s3`` with the usual Pauli
matrices::

    s1 = [[0, 1], [1, 0]]   s2 = [[0, -1j], [1j, 0]]   s3 = [[1, 0], [0, -1]]

All operations here are pure and work on :class:`PauliForm` values. Dense 2x2
matrices are plain ``numpy`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "IDENTITY",
    "SIGMA",
    "PAULI_STACK",
    "PauliForm",
    "to_matrix",
    "from_matrix",
    "multiply",
    "adjoint",
    "star_square",
    "cross",
    "is_psd",
    "is_hermitian",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
# (4, 2, 2): I, s1, s2, s3 -- handy for einsum on batches of coefficients
PAULI_STACK = np.stack((IDENTITY,) + SIGMA)


@dataclass(frozen=True)
class PauliForm:
    """Coefficients ``(w0, w)`` of ``w0*I + w.sigma``."""

    w0: complex
    w: tuple

    def __post_init__(self):
        w = tuple(complex(c) for c in np.asarray(self.w, dtype=complex).ravel())
        if len(w) != 3:
            raise ValueError(f"w must have 3 components, got {len(w)}")
        object.__setattr__(self, "w0", complex(self.w0))
        object.__setattr__(self, "w", w)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.w, dtype=complex)

    @property
    def coefficients(self) -> np.ndarray:
        """The 4-vector ``(w0, w1, w2, w3)``."""
        return np.array((self.w0,) + self.w, dtype=complex)

    @classmethod
    def from_coefficients(cls, c: Sequence[complex]) -> "PauliForm":
        c = np.asarray(c, dtype=complex)
        return cls(c[0], c[1:4])

    def norm_squared(self) -> float:
        """``|w0|^2 + ||w||^2``, i.e. half the squared Frobenius norm."""
        return float(abs(self.w0) ** 2 + np.sum(np.abs(self.vector) ** 2))

    def scale(self, c: complex) -> "PauliForm":
        return PauliForm(c * self.w0, c * self.vector)

    def allclose(self, other: "PauliForm", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coefficients, other.coefficients, rtol=0, atol=atol))


def to_matrix(p: PauliForm) -> np.ndarray:
    return np.einsum("i,ijk->jk", p.coefficients, PAULI_STACK)


def from_matrix(m) -> PauliForm:
    """Inverse of :func:`to_matrix`: ``w0 = tr(m)/2`` and ``wi = tr(m si)/2``."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return PauliForm.from_coefficients(np.einsum("jk,ikj->i", m, PAULI_STACK) / 2)


def cross(u, v) -> np.ndarray:
    """Epsilon-tensor cross product of complex 3-vectors (last axis).

    Neither argument is conjugated; callers conjugate explicitly.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return np.stack(
        [
            u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1],
            u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2],
            u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0],
        ],
        axis=-1,
    )


def multiply(p: PauliForm, q: PauliForm) -> PauliForm:
    # (p0 + p.s)(q0 + q.s) = p0 q0 + p.q + (p0 q + q0 p + i p x q).s
    a, b = p.vector, q.vector
    w0 = p.w0 * q.w0 + a @ b
    w = p.w0 * b + q.w0 * a + 1j * cross(a, b)
    return PauliForm(w0, w)


def adjoint(p: PauliForm) -> PauliForm:
    return PauliForm(np.conj(p.w0), np.conj(p.vector))


def star_square(p: PauliForm) -> PauliForm:
    """``x* x`` written out in coefficients.

    ``(|w0|^2 + ||w||^2) I + (w0 conj(w) + conj(w0) w - i [w, conj(w)]).sigma``
    """
    w0, w = p.w0, p.vector
    wb = np.conj(w)
    scalar = abs(w0) ** 2 + np.sum(np.abs(w) ** 2)
    vec = w0 * wb + np.conj(w0) * w - 1j * cross(w, wb)
    return PauliForm(scalar, vec)


def is_hermitian(p: PauliForm, tol: float = DEFAULT_TOL) -> bool:
    return bool(np.all(np.abs(p.coefficients.imag) <= tol))


def is_psd(p: PauliForm, tol: float = DEFAULT_TOL) -> bool:
    """PSD test in coefficient form: real coefficients and ``||w|| <= w0``."""
    if not is_hermitian(p, tol):
        return False
    w0 = p.w0.real
    return bool(np.linalg.norm(p.vector.real) <= w0 + tol)
