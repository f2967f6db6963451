"""The two-parameter family ``lam = (a, 0, 0)``, ``T = diag(0, k, k)``.

Closed forms are evaluated term for term, with no algebraic repair,
so they can be audited against brute force:

* ``F(x, y)`` on the triangle ``x, y >= 0, x + y <= 1``;
* edge maxima ``m1`` (x = 0), ``m2`` / ``m3`` (y = 0, by the sign of
  ``a^2 - k^2``) and ``m4`` (x + y = 1), together with the critical points
  behind them;
* the sufficient condition ``max(m1, m4) <= 1 - k^2``, ``a^2 - k^2 < a``
  (:func:`theorem_predicate`) and the ``a = 1`` variant that drops ``m1``
  (:func:`example_5_1_predicate`).

:func:`scan_region` sweeps an ``(a, k)`` grid and records, per cell, the
closed-form verdict next to the numeric positivity and KS verdicts.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import ks, maps
from .exceptions import DomainError, InvalidParams, InvalidRange, NotNormalized, OutOfDomain
from .maps import UnitalQubitMap
from .numerics import OptimizerConfig, Triangle, derive_seed, maximize

__all__ = [
    "FamilyParams",
    "RegionCell",
    "make_map",
    "F",
    "m1",
    "m2",
    "m3",
    "m4",
    "m4_a_one",
    "m4_a_half",
    "maybe",
    "critical_x",
    "critical_y",
    "theorem_predicate",
    "example_5_1_predicate",
    "reduced_inequality",
    "maximize_F",
    "numeric_F_max",
    "scan_region",
    "grid_axis",
    "grid_cells",
    "cell_configs",
    "region_csv",
    "CSV_HEADER",
]

_EPS = 1e-12
EDGE_STEP = 1e-4
# g is a convex function on a 2-sphere; a small multistart suffices per cell
POSITIVITY_STARTS = 64
CSV_HEADER = (
    "a", "k", "positive", "positivity_margin", "thm46", "m1", "m4", "ks_numeric", "min_defect_eig",
)


@dataclass(frozen=True)
class FamilyParams:
    a: float
    k: float

    def __post_init__(self):
        a, k = float(self.a), float(self.k)
        if not (math.isfinite(a) and math.isfinite(k)):
            raise InvalidParams("a and k must be finite")
        if not 0.0 <= a <= 1.0:
            raise InvalidParams(f"a must lie in [0, 1], got {a}")
        if k < 0.0:
            raise InvalidParams(f"k must be nonnegative, got {k}")
        if k > (1.0 + a) / math.sqrt(2.0) + _EPS:
            raise InvalidParams(f"k = {k} exceeds (1 + a)/sqrt(2) = {(1 + a) / math.sqrt(2):.12g}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "k", k)


@dataclass(frozen=True)
class RegionCell:
    a: float
    k: float
    positive: bool
    positivity_margin: float
    thm46: bool
    m1: float
    m4: Optional[float]
    ks_numeric: ks.Verdict
    min_defect_eig: float

    def row(self):
        def fmt(v):
            if v is None:
                return "nan"
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, ks.Verdict):
                return v.value
            return f"{v:.9g}"

        return [fmt(getattr(self, name)) for name in CSV_HEADER]


def make_map(p: FamilyParams) -> UnitalQubitMap:
    return UnitalQubitMap([p.a, 0.0, 0.0], np.diag([0.0, p.k, p.k]))


def F(p: FamilyParams, x, y):
    """``2k sqrt(k^2 y^2/4 + x(1 - x + a y)) + a y + (a^2 - k^2) x``."""
    x_arr, y_arr = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(x_arr < -_EPS) or np.any(y_arr < -_EPS) or np.any(x_arr + y_arr > 1 + _EPS):
        raise OutOfDomain("F is defined on x, y >= 0 with x + y <= 1")
    a, k = p.a, p.k
    inner = k * k / 4 * y_arr**2 + x_arr * (1 - x_arr + a * y_arr)
    val = 2 * k * np.sqrt(np.maximum(inner, 0.0)) + a * y_arr + (a * a - k * k) * x_arr
    return float(val) if val.ndim == 0 else val


def m1(p: FamilyParams) -> float:
    """Maximum of ``F`` on the x = 0 edge: ``F(0, 1) = k^2 + a``."""
    return p.k**2 + p.a


def m2(p: FamilyParams) -> float:
    """Boundary value ``F(1, 0) = a^2 - k^2``, the closed-form y = 0 candidate when ``a^2 > k^2``."""
    b = p.a**2 - p.k**2
    if not b > 0:
        raise DomainError("m2 requires a^2 - k^2 > 0")
    return b


def m3(p: FamilyParams) -> float:
    """Closed-form y = 0 maximum for ``a^2 < k^2``, evaluated literally."""
    b = p.a**2 - p.k**2
    if not b < 0:
        raise DomainError("m3 requires a^2 - k^2 < 0")
    s = 4 * p.k**2 + b * b
    return (4 * p.k**2 - b * b) / (2 * math.sqrt(s**3)) + b / 2


def m4(p: FamilyParams) -> float:
    """Closed-form x + y = 1 value at ``y_c``, evaluated literally."""
    a, k = p.a, p.k
    d = a * a - k * k - a
    if not d < 0:
        raise DomainError("m4 requires a^2 - k^2 - a < 0")
    if k * k > 4 * (1 + a):
        raise DomainError("m4 requires k^2 <= 4(1 + a)")
    c = k * k / 4 - (1 + a)
    den = d * d + k * k * (4 + 4 * a - k * k)
    if c == 0 or den <= 0:
        raise DomainError("m4 has a vanishing denominator at these parameters")
    num = (a * (a * (a - 1) ** 2 + 2 * k * k * (3 - a))) * (1 + a) ** 2 + k**4 * (1 + a)
    if num / den < 0:
        raise DomainError("m4 has a negative radicand at these parameters")
    return (
        2 * k**3 * (1 + a) / math.sqrt(den)
        - (1 + a) * d / (2 * c)
        + a * a
        - k * k
        + math.sqrt(num / den) / (2 * c)
    )


def m4_a_one(k: float) -> float:
    """The ``a = 1`` specialization of ``m4``, kept as its own closed form."""
    k2 = k * k
    return ((k2 - 8) * (math.sqrt(2) * k2 + 2) + 4 * (2 * k2 + 2 ** (-0.25) * math.sqrt(k * (8 + k2)))) / (
        2 * (k2 - 8)
    )


def m4_a_half(k: float) -> float:
    """The ``a = 1/2`` specialization of ``m4``, kept as its own closed form."""
    k2 = k * k
    A = (k2 + 0.25) ** 2 + k2 * (6 - k2)
    inner = (0.75 * ((k2 + 0.25) ** 2 + k2 * (2 - k2)) + 1.5 * k2 * k2) / A
    return 3 * k**3 / math.sqrt(A) + (2 * math.sqrt(inner) + 3 * (k2 + 0.25)) / (k2 - 6) + 0.25 - k2


def maybe(fn, p):
    """``(value, None)`` or ``(None, reason)`` for a closed-form evaluator."""
    try:
        return fn(p), None
    except DomainError as exc:
        return None, str(exc)


def critical_x(p: FamilyParams) -> float:
    """Stationary point of ``F(x, 0)``: root of ``x^2 - x + q = 0``, ``q = k^2/(4k^2 + (a^2-k^2)^2)``.

    The larger root is taken when ``a^2 > k^2``, the smaller when ``a^2 < k^2``.
    """
    b = p.a**2 - p.k**2
    if b == 0:
        raise DomainError("critical_x is undefined for a^2 = k^2")
    q = p.k**2 / (4 * p.k**2 + b * b)
    disc = 1 - 4 * q
    if disc < 0:
        raise DomainError("critical_x requires 1 - 4q >= 0")
    r = math.sqrt(disc)
    return (1 + r) / 2 if b > 0 else (1 - r) / 2


def critical_y(p: FamilyParams) -> float:
    """Closed-form critical point on the x + y = 1 edge, evaluated literally."""
    a, k = p.a, p.k
    d = a * a - k * k - a
    if k * k > 4 * (1 + a):
        raise DomainError("critical_y requires k^2 <= 4(1 + a)")
    if not d < 0:
        raise DomainError("critical_y requires a^2 - k^2 - a < 0")
    c = k * k / 4 - (1 + a)
    den = d * d + k * k * (4 * a + 4 - k * k)
    if c == 0 or den == 0:
        raise DomainError("critical_y has a vanishing denominator at these parameters")
    q = k * k * (1 + a) / den
    disc = (1 + a) ** 2 + 4 * q * c
    if disc < 0:
        raise DomainError("critical_y has a negative discriminant at these parameters")
    return (-(1 + a) + math.sqrt(disc)) / (2 * c)


def theorem_predicate(p: FamilyParams) -> bool:
    """``a^2 - k^2 < a`` and ``m1 <= 1 - k^2`` and, where ``m4`` exists, ``m4 <= 1 - k^2``."""
    bound = 1 - p.k**2
    if not p.a**2 - p.k**2 < p.a:
        return False
    if not m1(p) <= bound:
        return False
    val, _ = maybe(m4, p)
    return val is None or val <= bound


def example_5_1_predicate(k: float) -> bool:
    """The ``a = 1`` region condition ``m4_a_one(k) <= 1 - k^2`` (``m1`` dropped)."""
    if not 0.0 <= k <= math.sqrt(2.0) + _EPS:
        raise InvalidParams(f"k must lie in [0, sqrt(2)], got {k}")
    return m4_a_one(k) <= 1 - k * k


def reduced_inequality(p: FamilyParams, r1: float, r2: float, r3: float, gamma1: float):
    """Both sides of the polar-form estimate for ``||w|| = 1``, ``w0 = 0``.

    Returns ``(lhs, rhs)`` with::

        lhs = 2k sqrt(k^2 r2^2 r3^2 sin^2 g + r1^2 (r2^2 + r3^2 + 2 r2 r3 a sin g))
        rhs = 1 - 2a r2 r3 sin g - a^2 r1^2 - k^2 (r2^2 + r3^2)
    """
    if min(r1, r2, r3) < 0 or abs(r1 * r1 + r2 * r2 + r3 * r3 - 1) > 1e-9:
        raise NotNormalized("r1, r2, r3 must be nonnegative with r1^2 + r2^2 + r3^2 = 1")
    a, k = p.a, p.k
    s = math.sin(gamma1)
    inner = k * k * r2 * r2 * r3 * r3 * s * s + r1 * r1 * (r2 * r2 + r3 * r3 + 2 * r2 * r3 * a * s)
    lhs = 2 * k * math.sqrt(max(inner, 0.0))
    rhs = 1 - 2 * a * r2 * r3 * s - a * a * r1 * r1 - k * k * (r2 * r2 + r3 * r3)
    return lhs, rhs


def maximize_F(p: FamilyParams, cfg: OptimizerConfig = OptimizerConfig()):
    """Numeric maximum of ``F`` on the triangle: ``((x, y), value)``.

    Multistart compass search over the interior plus a scan of the three
    edges at step ``1e-4``.
    """
    point, best = maximize(lambda X: F(p, X[:, 0], X[:, 1]), Triangle(), cfg, vectorized=True)
    t = np.linspace(0.0, 1.0, int(round(1 / EDGE_STEP)) + 1)
    zero = np.zeros_like(t)
    for x, y in ((zero, t), (t, zero), (1 - t, t)):
        vals = F(p, x, y)
        i = int(np.argmax(vals))
        if vals[i] > best:
            point, best = np.array([x[i], y[i]]), float(vals[i])
    return (float(point[0]), float(point[1])), float(best)


def numeric_F_max(p: FamilyParams, cfg: OptimizerConfig = OptimizerConfig()) -> float:
    return maximize_F(p, cfg)[1]


# ---------------------------------------------------------------------------
# Region scan
# ---------------------------------------------------------------------------


def grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    if hi < lo:
        return np.empty(0)
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def cell_configs(cfg: OptimizerConfig, index: int):
    """Per-cell ``(positivity_cfg, ks_cfg)``, seeded from ``(cfg.seed, index)``."""
    pos_cfg = cfg.with_seed(derive_seed(cfg.seed, 2 * index)).with_starts(POSITIVITY_STARTS)
    ks_cfg = cfg.with_seed(derive_seed(cfg.seed, 2 * index + 1))
    return pos_cfg, ks_cfg


def _evaluate_cell(args):
    a, k, index, cfg = args
    p = FamilyParams(a, k)
    phi = make_map(p)
    pos_cfg, ks_cfg = cell_configs(cfg, index)
    pos = maps.is_positive(phi, pos_cfg)
    report = ks.verify_ks(phi, ks_cfg)
    m4_val, _ = maybe(m4, p)
    return RegionCell(
        a=a,
        k=k,
        positive=pos.positive,
        positivity_margin=pos.margin,
        thm46=theorem_predicate(p),
        m1=m1(p),
        m4=m4_val,
        ks_numeric=report.verdict,
        min_defect_eig=report.min_defect_eigenvalue,
    )


def scan_region(
    a_min: float,
    a_max: float,
    k_min: float,
    k_max: float,
    step: float,
    cfg: OptimizerConfig = OptimizerConfig(starts=10_000),
    workers: int = 1,
) -> List[RegionCell]:
    """Evaluate every grid cell; ``k > (1 + a)/sqrt(2)`` cells are skipped.

    ``cfg.starts`` is the KS sample budget per cell. Each cell draws its own
    seeds from ``(cfg.seed, cell index)``, so the output does not depend on
    ``workers``.
    """
    for v in (a_min, a_max, k_min, k_max, step):
        if not math.isfinite(v):
            raise InvalidRange("range bounds and step must be finite")
    if not step > 0:
        raise InvalidRange("step must be positive")
    a_axis, k_axis = grid_axis(a_min, a_max, step), grid_axis(k_min, k_max, step)
    if a_axis.size and (a_axis[0] < 0 or a_axis[-1] > 1):
        raise InvalidRange("a must lie in [0, 1]")
    if k_axis.size and k_axis[0] < 0:
        raise InvalidRange("k must be nonnegative")

    jobs = [(a, k, i, cfg) for i, (a, k) in enumerate(grid_cells(a_axis, k_axis))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate_cell, jobs, chunksize=8))
    return [_evaluate_cell(job) for job in jobs]


def grid_cells(a_axis, k_axis):
    """``(a, k)`` pairs in scan order, skipping ``k > (1 + a)/sqrt(2)``."""
    out = []
    for a in a_axis:
        for k in k_axis:
            if k > (1 + a) / math.sqrt(2) + _EPS:
                continue
            out.append((float(a), float(k)))
    return out


def region_csv(cells: List[RegionCell]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for cell in cells:
        writer.writerow(cell.row())
    return buf.getvalue()
