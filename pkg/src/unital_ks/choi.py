"""Choi matrices and entanglement witnesses for unital qubit maps.

The default Choi matrix is the unnormalized block matrix::

    W = sum_ij E_ij (x) Phi(E_ij) = [[Phi(E11), Phi(E12)], [Phi(E21), Phi(E22)]]

with trace 2 for a unital map. ``normalized=True`` halves it, which is the
same as applying ``I (x) Phi`` to the maximally entangled projector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import maps
from .exceptions import NoNegativeEigenvalue, NotAState
from .maps import UnitalQubitMap
from .numerics import HermitianSpectrum, OptimizerConfig, hermitian_eigen
from .pauli import PAULI_STACK

__all__ = [
    "WITNESS_TOL",
    "ChoiMatrix",
    "ProductState",
    "WitnessReport",
    "choi_matrix",
    "spectrum",
    "witness_value",
    "witness_values",
    "sample_separable",
    "product_factors",
    "entangled_witness_state",
    "is_entanglement_witness",
]

WITNESS_TOL = 1e-8
_STATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    entries: np.ndarray
    normalized: bool = False

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)


@dataclass(frozen=True, eq=False)
class ProductState:
    rho: np.ndarray
    factors: tuple


@dataclass(frozen=True)
class WitnessReport:
    """The three witness conditions, checked separately.

    ``positive``: the map is positive. ``not_cp``: the Choi matrix has an
    eigenvalue below ``-tol``. ``separable_ok``: no sampled product state
    pairs below ``-tol``.
    """

    positive: bool
    not_cp: bool
    separable_ok: bool
    min_eigenvalue: float
    min_separable_value: float
    entangled_value: Optional[float]
    samples: int
    seed: int

    @property
    def is_witness(self) -> bool:
        return self.positive and self.not_cp and self.separable_ok


def _unit(i: int, j: int) -> np.ndarray:
    E = np.zeros((2, 2), dtype=complex)
    E[i, j] = 1.0
    return E


def choi_matrix(phi: UnitalQubitMap, normalized: bool = False) -> ChoiMatrix:
    W = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            c = np.einsum("jk,ikj->i", _unit(i, j), PAULI_STACK) / 2
            block = np.einsum("i,ijk->jk", maps.apply_coefficients(phi, c), PAULI_STACK)
            W += np.kron(_unit(i, j), block)
    if normalized:
        W = W / 2
    return ChoiMatrix(W, bool(normalized))


def spectrum(W: ChoiMatrix) -> HermitianSpectrum:
    return hermitian_eigen(W.entries, tol=1e-10)


def _check_state(rho: np.ndarray):
    if rho.shape != (4, 4):
        raise NotAState(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > _STATE_TOL:
        raise NotAState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > _STATE_TOL:
        raise NotAState("density matrix must have trace 1")
    if np.linalg.eigvalsh(rho)[0] < -_STATE_TOL:
        raise NotAState("density matrix is not positive semidefinite")


def witness_value(W: ChoiMatrix, rho) -> float:
    """``Re Tr(W rho)`` for a two-qubit density matrix ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    _check_state(rho)
    val = np.trace(W.entries @ rho)
    if abs(val.imag) > 1e-10:
        raise NotAState("Tr(W rho) has a nonzero imaginary part; rho is not Hermitian")
    return float(val.real)


def witness_values(W: ChoiMatrix, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``<a (x) b| W |a (x) b>`` for rows of unit vectors ``a``, ``b`` (n, 2)."""
    psi = np.einsum("ni,nj->nij", a, b).reshape(-1, 4)
    return np.einsum("ni,ij,nj->n", psi.conj(), W.entries, psi).real


def product_factors(n: int, seed: int):
    """Seeded unit vectors ``(a, b)``, each of shape (n, 2), isotropic in C^2."""
    rng = np.random.default_rng(int(seed))
    g = rng.standard_normal((2, n, 2)) + 1j * rng.standard_normal((2, n, 2))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    return g[0], g[1]


def sample_separable(n: int, seed: int) -> List[ProductState]:
    """``n`` pure product states ``|a><a| (x) |b><b|``; deterministic per seed."""
    a, b = product_factors(n, seed)
    out = []
    for u, v in zip(a, b):
        ra, rb = np.outer(u, u.conj()), np.outer(v, v.conj())
        out.append(ProductState(np.kron(ra, rb), (ra, rb)))
    return out


def entangled_witness_state(W: ChoiMatrix) -> np.ndarray:
    """``|eta><eta|`` for the eigenvector of the most negative eigenvalue."""
    vals, vecs = spectrum(W)
    if vals[-1] >= 0:
        raise NoNegativeEigenvalue("Choi matrix is positive semidefinite")
    eta = vecs[:, -1]
    eta = eta / np.linalg.norm(eta)
    return np.outer(eta, eta.conj())


def is_entanglement_witness(
    W: ChoiMatrix,
    phi: UnitalQubitMap,
    samples: int = 10_000,
    seed: int = 42,
    tol: float = WITNESS_TOL,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> WitnessReport:
    positive = maps.is_positive(phi, cfg).positive
    min_eig = float(spectrum(W).eigenvalues[-1])
    a, b = product_factors(int(samples), seed)
    vals = witness_values(W, a, b)
    min_sep = float(vals.min()) if vals.size else float("inf")
    entangled = None
    if min_eig < 0:
        entangled = witness_value(W, entangled_witness_state(W))
    return WitnessReport(
        positive=positive,
        not_cp=min_eig < -tol,
        separable_ok=min_sep >= -tol,
        min_eigenvalue=min_eig,
        min_separable_value=min_sep,
        entangled_value=entangled,
        samples=int(samples),
        seed=int(seed),
    )
