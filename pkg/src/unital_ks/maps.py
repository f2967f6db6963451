"""Unital qubit maps in the Pauli basis.

A unital, adjoint-preserving map acts as::

    Phi(w0 I + w.sigma) = (w0 + lam.w) I + (T w).sigma

with real ``lam`` (3,) and real ``T`` (3, 3). The map is trace-preserving
exactly when ``lam == 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import pauli
from .exceptions import NotARotation, OutOfRange
from .numerics import OptimizerConfig, Sphere, maximize
from .pauli import PauliForm

__all__ = [
    "UnitalQubitMap",
    "PositivityVerdict",
    "identity_map",
    "transposition_map",
    "apply",
    "apply_coefficients",
    "is_trace_preserving",
    "is_positive",
    "necessary_bounds",
    "conjugate",
    "convex_combine",
    "random_map",
    "random_rotation",
]

_AXES = np.concatenate([np.eye(3), -np.eye(3)])


def _real_array(value, shape, name):
    arr = np.asarray(value)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValueError(f"{name} must be real")
        arr = arr.real
    arr = np.array(arr, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class UnitalQubitMap:
    """The pair ``(lam, T)``; immutable after construction."""

    lam: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", _real_array(self.lam, (3,), "lambda"))
        object.__setattr__(self, "T", _real_array(self.T, (3, 3), "T"))

    @property
    def F(self) -> np.ndarray:
        """4x4 matrix of the map in the basis (I, s1, s2, s3)."""
        out = np.zeros((4, 4))
        out[0, 0] = 1.0
        out[0, 1:] = self.lam
        out[1:, 1:] = self.T
        return out

    def __call__(self, p: PauliForm) -> PauliForm:
        return apply(self, p)

    def __repr__(self):
        return f"UnitalQubitMap(lam={self.lam.tolist()}, T={self.T.tolist()})"


@dataclass(frozen=True, eq=False)
class PositivityVerdict:
    positive: bool
    witness: Optional[np.ndarray]
    margin: float
    max_g: float


def identity_map() -> UnitalQubitMap:
    return UnitalQubitMap(np.zeros(3), np.eye(3))


def transposition_map() -> UnitalQubitMap:
    # transpose flips the sign of the s2 coefficient only
    return UnitalQubitMap(np.zeros(3), np.diag([1.0, -1.0, 1.0]))


def apply(phi: UnitalQubitMap, p: PauliForm) -> PauliForm:
    w = p.vector
    return PauliForm(p.w0 + phi.lam @ w, phi.T @ w)


def apply_coefficients(phi: UnitalQubitMap, c: np.ndarray) -> np.ndarray:
    """Apply to stacked coefficient rows ``(..., 4)`` = (w0, w1, w2, w3)."""
    c = np.asarray(c)
    out = np.empty(c.shape, dtype=np.result_type(c, float))
    out[..., 0] = c[..., 0] + c[..., 1:] @ phi.lam
    out[..., 1:] = c[..., 1:] @ phi.T.T
    return out


def is_trace_preserving(phi: UnitalQubitMap, tol: float = pauli.DEFAULT_TOL) -> bool:
    return bool(np.linalg.norm(phi.lam) <= tol)


def _g(phi: UnitalQubitMap):
    T, lam = phi.T, phi.lam
    return lambda W: np.linalg.norm(W @ T.T, axis=-1) - W @ lam


def is_positive(
    phi: UnitalQubitMap,
    cfg: OptimizerConfig = OptimizerConfig(),
    tol: float = pauli.DEFAULT_TOL,
) -> PositivityVerdict:
    """Decide positivity via ``||T w|| <= 1 + lam.w`` on the unit ball.

    ``g(w) = ||T w|| - lam.w`` is convex, so its maximum sits on the sphere;
    the sphere search is seeded with the six axis points, and a few interior
    points are spot-checked as well. ``margin = 1 - max g``.
    """
    g = _g(phi)
    w, gmax = maximize(g, Sphere(3), cfg, vectorized=True, extra_starts=_AXES)
    interior = 0.5 * _AXES
    gi = g(interior)
    if gi.max() > gmax:
        w, gmax = interior[int(np.argmax(gi))], float(gi.max())
    positive = gmax <= 1.0 + tol
    return PositivityVerdict(
        positive=bool(positive),
        witness=None if positive else w,
        margin=1.0 - gmax,
        max_g=gmax,
    )


def operator_norm(T, cfg: OptimizerConfig = OptimizerConfig()) -> float:
    """``max ||T w||`` over the unit sphere, found by search."""
    T = np.asarray(T, dtype=float)
    _, val = maximize(
        lambda W: np.linalg.norm(W @ T.T, axis=-1), Sphere(3), cfg, vectorized=True,
        extra_starts=_AXES,
    )
    return val


def necessary_bounds(phi: UnitalQubitMap, cfg: OptimizerConfig = OptimizerConfig()) -> bool:
    """``||T|| <= 1 + ||lam||`` and ``||lam|| <= 1``. Necessary, not sufficient."""
    lam_norm = float(np.linalg.norm(phi.lam))
    if lam_norm > 1.0 + 1e-12:
        return False
    return operator_norm(phi.T, cfg) <= 1.0 + lam_norm + 1e-9


def _check_rotation(R, name):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise NotARotation(f"{name} must be 3x3")
    if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-9 or abs(np.linalg.det(R) - 1.0) > 1e-9:
        raise NotARotation(f"{name} is not a proper rotation")
    return R


def conjugate(phi: UnitalQubitMap, RU, RV) -> UnitalQubitMap:
    """The map ``x -> U Phi(V x V*) U*`` given the Bloch rotations of U and V."""
    RU = _check_rotation(RU, "RU")
    RV = _check_rotation(RV, "RV")
    return UnitalQubitMap(RV.T @ phi.lam, RU @ phi.T @ RV)


def convex_combine(phi1: UnitalQubitMap, phi2: UnitalQubitMap, t: float) -> UnitalQubitMap:
    if not 0.0 <= t <= 1.0:
        raise OutOfRange(f"t must lie in [0, 1], got {t}")
    return UnitalQubitMap(
        t * phi1.lam + (1 - t) * phi2.lam,
        t * phi1.T + (1 - t) * phi2.T,
    )


def random_map(rng: np.random.Generator, scale: float = 1.0) -> UnitalQubitMap:
    """``lam`` and ``T`` entries uniform in ``[-scale, scale]``."""
    return UnitalQubitMap(rng.uniform(-scale, scale, 3), rng.uniform(-scale, scale, (3, 3)))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    from scipy.spatial.transform import Rotation

    return Rotation.random(random_state=rng).as_matrix()
