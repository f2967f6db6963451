"""Kadison-Schwarz checks for unital qubit maps.

The reference quantity is the defect operator::

    D(x) = Phi(x* x) - Phi(x)* Phi(x)

which is built here from dense 2x2 products, so it does not depend on the
coefficient identities used by :func:`scalar_conditions`. A map is KS when
``D(x) >= 0`` for every ``x``. Since ``D(c x) = |c|^2 D(x)``, searching the
unit sphere ``|w0|^2 + ||w||^2 = 1`` loses nothing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .maps import UnitalQubitMap, apply_coefficients
from .numerics import OptimizerConfig, Sphere, min_eigenvalue, refine
from .pauli import PAULI_STACK, PauliForm, cross

__all__ = [
    "KS_TOL",
    "Verdict",
    "KSReport",
    "ScalarConditions",
    "ks_defect",
    "defect_min_eigenvalues",
    "scalar_conditions",
    "scalar_conditions_batch",
    "verify_ks",
    "check_ks_at",
    "structured_starts",
]

KS_TOL = 1e-8
REFINE_STARTS = 16


class Verdict(str, enum.Enum):
    VIOLATION_FOUND = "ViolationFound"
    NO_VIOLATION_FOUND = "NoViolationFound"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class KSReport:
    """Outcome of :func:`verify_ks`.

    ``NoViolationFound`` certifies the search only, never KS membership.
    ``witness`` is the minimizing point found (normalized) and is kept only
    when a violation was found.
    """

    verdict: Verdict
    witness: Optional[PauliForm]
    min_defect_eigenvalue: float
    samples_evaluated: int
    seed: int

    @property
    def violation(self) -> bool:
        return self.verdict is Verdict.VIOLATION_FOUND


@dataclass(frozen=True)
class ScalarConditions:
    """Both sides of the scalar KS conditions at one point ``x``.

    ``lhs1 <= rhs1`` is the identity-component condition, ``lhs2 <= rhs2``
    the norm condition on the sigma-component.
    """

    lhs1: float
    rhs1: float
    lhs2: float
    rhs2: float

    def holds(self, tol: float = KS_TOL) -> bool:
        return self.lhs1 <= self.rhs1 + tol and self.lhs2 <= self.rhs2 + tol


def _dense(c: np.ndarray) -> np.ndarray:
    return np.einsum("...i,ijk->...jk", c, PAULI_STACK)


def _coefficients(m: np.ndarray) -> np.ndarray:
    return np.einsum("...jk,ikj->...i", m, PAULI_STACK) / 2


def _defect_batch(phi: UnitalQubitMap, c: np.ndarray) -> np.ndarray:
    X = _dense(c)
    XhX = np.conj(np.swapaxes(X, -1, -2)) @ X
    lhs = _dense(apply_coefficients(phi, _coefficients(XhX)))
    P = _dense(apply_coefficients(phi, c))
    return lhs - np.conj(np.swapaxes(P, -1, -2)) @ P


def ks_defect(phi: UnitalQubitMap, x: PauliForm) -> np.ndarray:
    """Dense ``Phi(x* x) - Phi(x)* Phi(x)``; Hermitian for real ``lam``, ``T``."""
    return _defect_batch(phi, x.coefficients)


def defect_min_eigenvalues(phi: UnitalQubitMap, c) -> np.ndarray:
    """Smallest defect eigenvalue for each coefficient row of ``c`` (..., 4)."""
    D = _defect_batch(phi, np.asarray(c, dtype=complex))
    return min_eigenvalue(D, tol=1e-8)


def check_ks_at(phi: UnitalQubitMap, x: PauliForm, tol: float = KS_TOL) -> bool:
    return bool(min_eigenvalue(ks_defect(phi, x), tol=1e-8) >= -tol)


def scalar_conditions_batch(phi: UnitalQubitMap, c) -> tuple:
    """Vectorized sides ``(lhs1, rhs1, lhs2, rhs2)`` over coefficient rows."""
    c = np.asarray(c, dtype=complex)
    w0, w = c[..., 0], c[..., 1:]
    lam, T = phi.lam, phi.T
    wb = np.conj(w)
    Tw, Twb = w @ T.T, wb @ T.T
    lam_w, lam_wb = w @ lam, wb @ lam
    w_x_wb = cross(w, wb)

    norm_Tw2 = np.sum(np.abs(Tw) ** 2, axis=-1)
    shifted = np.abs(w0 + lam_w) ** 2
    size = np.abs(w0) ** 2 + np.sum(np.abs(w) ** 2, axis=-1)
    # lam . (conj(w0) w + w0 conj(w) - i [w, conj(w)]); real up to rounding
    lam_term = (np.conj(w0)[..., None] * w + w0[..., None] * wb - 1j * w_x_wb) @ lam

    lhs1 = norm_Tw2 + shifted
    rhs1 = (size + lam_term).real
    vec = (
        1j * (cross(Tw, Twb) - w_x_wb @ T.T)
        - lam_wb[..., None] * Tw
        - lam_w[..., None] * Twb
    )
    lhs2 = np.sqrt(np.sum(np.abs(vec) ** 2, axis=-1))
    rhs2 = (size - shifted - norm_Tw2 + lam_term).real
    return lhs1, rhs1, lhs2, rhs2


def scalar_conditions(phi: UnitalQubitMap, x: PauliForm) -> ScalarConditions:
    lhs1, rhs1, lhs2, rhs2 = scalar_conditions_batch(phi, x.coefficients)
    return ScalarConditions(float(lhs1), float(rhs1), float(lhs2), float(rhs2))


def structured_starts() -> np.ndarray:
    """Matrix units, Pauli matrices and (s_i +/- i s_j)/sqrt2, normalized.

    Returned as coefficient rows (w0, w1, w2, w3).
    """
    rows = []
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2), dtype=complex)
            E[i, j] = 1
            rows.append(_coefficients(E))
    rows.extend(np.eye(4, dtype=complex))
    for i in range(1, 4):
        for j in range(i + 1, 4):
            for sign in (1, -1):
                r = np.zeros(4, dtype=complex)
                r[i] = 1
                r[j] = sign * 1j
                rows.append(r)
    rows = np.array(rows)
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def _to_real(c):
    return np.concatenate([c.real, c.imag], axis=-1)


def _to_complex(r):
    return r[..., :4] + 1j * r[..., 4:]


def verify_ks(
    phi: UnitalQubitMap,
    cfg: OptimizerConfig = OptimizerConfig(starts=10_000),
    tol: float = KS_TOL,
) -> KSReport:
    """Search for ``x`` with a negative defect eigenvalue.

    ``cfg.starts`` is the sample budget: the structured starts plus seeded
    isotropic points on the unit sphere of C^4. The lowest few are then
    polished by compass search.
    """
    budget = int(cfg.starts)
    rng = np.random.default_rng(int(cfg.seed))
    starts = structured_starts()
    n_random = max(budget - len(starts), 0)
    g = rng.standard_normal((n_random, 4)) + 1j * rng.standard_normal((n_random, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    C = np.concatenate([starts, g])[: max(budget, 1)]
    vals = defect_min_eigenvalues(phi, C)

    evaluated = [len(C)]

    def objective(R):
        evaluated[0] += len(R)
        return -defect_min_eigenvalues(phi, _to_complex(R))

    top = np.argsort(vals, kind="stable")[: min(REFINE_STARTS, len(C))]
    R, negv = refine(
        objective, _to_real(C[top]), Sphere(8), cfg, vectorized=True, values=-vals[top]
    )
    j = int(np.argmax(negv))
    best, best_c = -float(negv[j]), _to_complex(R[j])
    i = int(np.argmin(vals))
    if vals[i] <= best:
        best, best_c = float(vals[i]), C[i]

    violation = best < -tol
    return KSReport(
        verdict=Verdict.VIOLATION_FOUND if violation else Verdict.NO_VIOLATION_FOUND,
        witness=PauliForm.from_coefficients(best_c) if violation else None,
        min_defect_eigenvalue=best,
        samples_evaluated=evaluated[0],
        seed=int(cfg.seed),
    )
