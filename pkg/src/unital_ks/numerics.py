"""Small Hermitian eigensolver and a deterministic multistart maximizer.

``hermitian_eigen`` is a cyclic complex Jacobi method. It handles stacks of
matrices (shape ``(..., n, n)``) so the verifiers can diagonalize thousands of
2x2 defect operators at once; rotations on already-diagonal members are
identities.

``maximize`` seeds a scrambled Halton lattice plus seeded uniform points over
a compact domain and polishes every seed with a projected compass search
(poll +/- each coordinate, take the best improving move, otherwise halve the
step). No gradients are used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .exceptions import InvalidDomain, NoConvergence, NotHermitian

__all__ = [
    "HermitianSpectrum",
    "OptimizerConfig",
    "hermitian_eigen",
    "eigvalsh",
    "min_eigenvalue",
    "Ball",
    "Sphere",
    "Triangle",
    "Box",
    "Product",
    "maximize",
    "refine",
    "derive_seed",
]

MAX_SWEEPS = 100
OFF_DIAGONAL_TOL = 1e-14
MAX_DIM = 8


@dataclass(frozen=True, eq=False)
class HermitianSpectrum:
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 256
    max_iterations: int = 200
    step_tolerance: float = 1e-10
    seed: int = 42

    def __post_init__(self):
        if int(self.starts) < 1:
            raise ValueError("starts must be >= 1")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.step_tolerance > 0:
            raise ValueError("step_tolerance must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def with_seed(self, seed: int) -> "OptimizerConfig":
        return OptimizerConfig(self.starts, self.max_iterations, self.step_tolerance, seed)

    def with_starts(self, starts: int) -> "OptimizerConfig":
        return OptimizerConfig(starts, self.max_iterations, self.step_tolerance, self.seed)


def derive_seed(seed: int, index: int) -> int:
    """Child seed for item ``index``; independent of evaluation order."""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------


def _check_hermitian(H: np.ndarray, tol: float) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim < 2 or H.shape[-1] != H.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {H.shape}")
    if H.shape[-1] > MAX_DIM:
        raise ValueError(f"dimension {H.shape[-1]} exceeds the supported maximum {MAX_DIM}")
    if H.size and np.max(np.abs(H - np.conj(np.swapaxes(H, -1, -2)))) > tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return H


def _off_norm(A: np.ndarray) -> np.ndarray:
    n = A.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(A[..., mask]) ** 2, axis=-1))


def _jacobi(H: np.ndarray):
    """Cyclic Jacobi on a stack ``(m, n, n)``. Returns (diagonal, V)."""
    A = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))
    m, n = A.shape[0], A.shape[-1]
    V = np.broadcast_to(np.eye(n, dtype=complex), (m, n, n)).copy()
    fro = np.sqrt(np.sum(np.abs(A) ** 2, axis=(-1, -2)))
    thresh = OFF_DIAGONAL_TOL * np.maximum(fro, 1.0)
    for _ in range(MAX_SWEEPS):
        if np.all(_off_norm(A) < thresh):
            return np.real(np.diagonal(A, axis1=-2, axis2=-1)).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                mag = np.abs(apq)
                live = mag > 1e-300
                if not np.any(live):
                    continue
                phase = np.where(live, apq / np.where(live, mag, 1.0), 1.0)
                safe = np.where(live, mag, 1.0)
                theta = (A[:, q, q].real - A[:, p, p].real) / (2.0 * safe)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J = diag-phase on q, then a real plane rotation
                J = np.broadcast_to(np.eye(n, dtype=complex), (m, n, n)).copy()
                J[:, p, p] = c
                J[:, q, q] = c
                J[:, p, q] = s
                J[:, q, p] = -s * np.conj(phase)
                J[:, q, q] = c * np.conj(phase)
                A = np.conj(np.swapaxes(J, -1, -2)) @ A @ J
                V = V @ J
    raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")


def hermitian_eigen(H, tol: float = 1e-9) -> HermitianSpectrum:
    """Eigen-decomposition of a small Hermitian matrix by complex Jacobi rotations.

    Raises NotHermitian if ``max|H - H*| > tol`` and NoConvergence if the
    sweep cap is hit.
    """
    H = _check_hermitian(H, tol)
    if H.ndim != 2:
        raise ValueError("hermitian_eigen takes a single matrix; use eigvalsh for stacks")
    d, V = _jacobi(H[None])
    order = np.argsort(-d[0], kind="stable")
    return HermitianSpectrum(d[0][order], V[0][:, order])


def _eigvals_2x2(H: np.ndarray) -> np.ndarray:
    # One Jacobi rotation diagonalizes a 2x2 block exactly; this is its closed form.
    a = H[..., 0, 0].real
    d = H[..., 1, 1].real
    b = 0.5 * (H[..., 0, 1] + np.conj(H[..., 1, 0]))
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), np.abs(b))
    return np.stack([mean + rad, mean - rad], axis=-1)


def eigvalsh(H, tol: float = 1e-9) -> np.ndarray:
    """Eigenvalues (descending) of one matrix or a stack of matrices."""
    H = _check_hermitian(H, tol)
    shape = H.shape
    if shape[-1] == 2:
        return _eigvals_2x2(H)
    flat = H.reshape((-1,) + shape[-2:])
    d, _ = _jacobi(flat)
    return -np.sort(-d, axis=-1).reshape(shape[:-1])


def min_eigenvalue(H, tol: float = 1e-9):
    """Smallest eigenvalue; a float for one matrix, an array for a stack."""
    vals = eigvalsh(H, tol)[..., -1]
    return float(vals) if np.ndim(vals) == 0 else vals


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


class _Domain:
    dim: int
    n_unit: int
    scale: float = 1.0

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _directions(u: np.ndarray) -> np.ndarray:
    from scipy.special import ndtri

    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    nrm = np.linalg.norm(g, axis=-1, keepdims=True)
    g = np.where(nrm > 0, g, 1.0)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Sphere(_Domain):
    """Unit sphere in R^dim."""

    dim: int

    @property
    def n_unit(self):
        return self.dim

    def from_unit(self, u):
        return _directions(u)

    def project(self, x):
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        return np.where(nrm > 0, x / np.where(nrm > 0, nrm, 1.0), np.eye(1, self.dim))


@dataclass(frozen=True)
class Ball(_Domain):
    radius: float
    dim: int

    @property
    def n_unit(self):
        return self.dim + 1

    @property
    def scale(self):
        return self.radius

    def from_unit(self, u):
        r = self.radius * u[..., -1:] ** (1.0 / self.dim)
        return r * _directions(u[..., :-1])

    def project(self, x):
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        return np.where(nrm > self.radius, x * (self.radius / np.maximum(nrm, 1e-300)), x)


@dataclass(frozen=True)
class Triangle(_Domain):
    """``{(x, y): x >= 0, y >= 0, x + y <= 1}``."""

    dim: int = 2
    n_unit: int = 2

    def from_unit(self, u):
        flip = u.sum(axis=-1, keepdims=True) > 1
        return np.where(flip, 1.0 - u, u)

    def project(self, x):
        # Euclidean projection onto {x >= 0, sum(x) <= 1}
        c = np.maximum(x, 0.0)
        over = c.sum(axis=-1) > 1
        if np.any(over):
            v = x[over]
            srt = -np.sort(-v, axis=-1)
            css = np.cumsum(srt, axis=-1) - 1.0
            idx = np.arange(1, v.shape[-1] + 1)
            cond = srt - css / idx > 0
            rho = v.shape[-1] - 1 - np.argmax(cond[:, ::-1], axis=-1)
            theta = css[np.arange(len(v)), rho] / (rho + 1)
            c[over] = np.maximum(v - theta[:, None], 0.0)
        return c


@dataclass(frozen=True)
class Box(_Domain):
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or any(h < l for l, h in zip(lo, hi)):
            raise InvalidDomain("box bounds must have equal length and lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return len(self.lower)

    @property
    def n_unit(self):
        return self.dim

    @property
    def scale(self):
        return max(1e-12, max(h - l for l, h in zip(self.lower, self.upper)))

    def from_unit(self, u):
        lo, hi = np.array(self.lower), np.array(self.upper)
        return lo + u * (hi - lo)

    def project(self, x):
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class Product(_Domain):
    """Cartesian product of domains; coordinates are concatenated."""

    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))
        for part in self.parts:
            _validate_domain(part)

    @property
    def dim(self):
        return sum(p.dim for p in self.parts)

    @property
    def n_unit(self):
        return sum(p.n_unit for p in self.parts)

    @property
    def scale(self):
        return max(p.scale for p in self.parts)

    def _split(self, x, attr):
        out, i = [], 0
        for p in self.parts:
            j = i + getattr(p, attr)
            out.append(x[..., i:j])
            i = j
        return out

    def from_unit(self, u):
        return np.concatenate(
            [p.from_unit(c) for p, c in zip(self.parts, self._split(u, "n_unit"))], axis=-1
        )

    def project(self, x):
        return np.concatenate(
            [p.project(c) for p, c in zip(self.parts, self._split(x, "dim"))], axis=-1
        )


def _validate_domain(domain):
    if not isinstance(domain, (Sphere, Ball, Triangle, Box, Product)):
        raise InvalidDomain(f"unsupported domain descriptor: {domain!r}")
    if isinstance(domain, Ball) and not domain.radius > 0:
        raise InvalidDomain("ball radius must be positive")
    if domain.dim < 1:
        raise InvalidDomain("domain dimension must be >= 1")


# ---------------------------------------------------------------------------
# Maximization
# ---------------------------------------------------------------------------


def _batched(f: Callable, vectorized: bool) -> Callable:
    if vectorized:
        return lambda X: np.asarray(f(X), dtype=float).reshape(len(X))
    return lambda X: np.array([float(f(x)) for x in X], dtype=float)


def refine(
    f: Callable,
    X,
    domain,
    cfg: OptimizerConfig = OptimizerConfig(),
    *,
    vectorized: bool = False,
    values: Optional[np.ndarray] = None,
    initial_step: Optional[float] = None,
):
    """Projected compass search from each row of ``X``; returns (X, values).

    Every start is polished independently, so the outcome for one start never
    depends on the others.
    """
    _validate_domain(domain)
    F = _batched(f, vectorized)
    X = domain.project(np.array(X, dtype=float, copy=True).reshape(-1, domain.dim))
    v = F(X) if values is None else np.array(values, dtype=float, copy=True)
    m, d = X.shape
    h = np.full(m, 0.25 * domain.scale if initial_step is None else float(initial_step))
    moves = np.concatenate([np.eye(d), -np.eye(d)])  # (2d, d)
    for _ in range(cfg.max_iterations):
        active = np.flatnonzero(h >= cfg.step_tolerance)
        if active.size == 0:
            break
        cand = X[active, None, :] + h[active, None, None] * moves[None]
        cand = domain.project(cand.reshape(-1, d))
        fc = F(cand).reshape(active.size, 2 * d)
        fc = np.where(np.isfinite(fc), fc, -np.inf)
        best = np.argmax(fc, axis=1)
        fbest = fc[np.arange(active.size), best]
        improved = fbest > v[active]
        win = active[improved]
        X[win] = cand.reshape(active.size, 2 * d, d)[improved, best[improved]]
        v[win] = fbest[improved]
        h[active[~improved]] *= 0.5
    return X, v


def _seed_points(domain, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lattice = qmc.Halton(d=domain.n_unit, scramble=True, seed=rng).random(n)
    uniform = np.random.default_rng([seed, 1]).random((n, domain.n_unit))
    return domain.project(domain.from_unit(np.concatenate([lattice, uniform])))


def maximize(
    f: Callable,
    domain,
    cfg: OptimizerConfig = OptimizerConfig(),
    *,
    vectorized: bool = False,
    extra_starts: Optional[Sequence] = None,
):
    """Deterministic multistart maximization of ``f`` over a compact domain.

    Seeds are ``extra_starts`` (if any), then ``cfg.starts`` Halton points,
    then ``cfg.starts`` uniform points; the point sets are nested in
    ``cfg.starts``. Returns ``(argmax, max_value)``; ties go to the first seed
    in that order.
    """
    _validate_domain(domain)
    X = _seed_points(domain, int(cfg.starts), int(cfg.seed))
    if extra_starts is not None and len(extra_starts):
        extra = domain.project(np.asarray(extra_starts, dtype=float).reshape(-1, domain.dim))
        X = np.concatenate([extra, X])
    X, v = refine(f, X, domain, cfg, vectorized=vectorized)
    v = np.where(np.isnan(v), -np.inf, v)
    i = int(np.argmax(v))
    return X[i].copy(), float(v[i])
