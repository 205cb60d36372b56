"""Angular support estimation for bivariate extremes and the angular asymmetry coefficient.

A nonnegative pair ``(x1, x2)`` is written in L1 polar coordinates
``r = x1 + x2``, ``w = x1 / r``. The support interval ``[a, b]`` of the
limiting angular law is estimated by minimising

    g(s, t) = t - s + lam * k**gamma * D_k(s, t)

over ``0 <= s <= t <= 1``, where ``D_k`` averages the distance of the ``k``
radially largest angles to ``[s, t]``, weighted by ``L(R_i / R_k)`` with
``L(r) = r log r``. The coefficient ``tau = 1 - b - a`` is positive when
the first variable causes the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

DEFAULT_STARTS: tuple[tuple[float, float], ...] = (
    (0.0, 1.0), (0.0, 0.5), (0.5, 1.0), (0.25, 0.75), (0.0, 0.25), (0.75, 1.0),
)
BARRIER = 1e6
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 500
# relative slack under which two restart objectives count as tied
_TIE_RTOL = 1e-12


class InsufficientDataError(ValueError):
    pass


def default_k(n: int, factor: float = 1.5) -> int:
    """``factor * sqrt(n)`` rounded half-up."""
    return max(1, int(math.floor(factor * math.sqrt(n) + 0.5)))


@dataclass(frozen=True)
class PolarSeries:
    """Angles and radii sorted by radius, largest first."""

    w: np.ndarray
    r: np.ndarray
    source_n: int
    dropped_zero_rows: int = 0

    def __len__(self) -> int:
        return self.r.size

    def swapped(self) -> "PolarSeries":
        """The same points with the two coordinates exchanged (``w -> 1 - w``)."""
        return PolarSeries(1.0 - self.w, self.r, self.source_n, self.dropped_zero_rows)


@dataclass(frozen=True)
class AacConfig:
    k: int
    lam: float = 2.0
    gamma: float = 0.5
    alpha: float = 2.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")


@dataclass(frozen=True)
class OptimizerReport:
    iterations: int
    restarts: int
    converged: bool


@dataclass(frozen=True)
class SupportInterval:
    a_hat: float
    b_hat: float
    objective_value: float
    optimizer_report: OptimizerReport = field(default_factory=lambda: OptimizerReport(0, 0, True))

    @property
    def tau(self) -> float:
        return 1.0 - self.b_hat - self.a_hat


def polarize(pair) -> PolarSeries:
    """Convert an ``n x 2`` nonnegative sample to a radius-sorted :class:`PolarSeries`.

    Rows at the origin are dropped and counted. Equal radii keep the
    original row order.
    """
    pair = np.asarray(pair, dtype=float)
    if pair.ndim != 2 or pair.shape[1] != 2:
        raise ValueError(f"expected an n x 2 sample, got shape {pair.shape}")
    if np.any(pair < 0) or not np.all(np.isfinite(pair)):
        raise ValueError("polar decomposition needs finite nonnegative entries")
    r = pair.sum(axis=1)
    keep = r > 0
    if keep.sum() < 2:
        raise InsufficientDataError(f"only {int(keep.sum())} nonzero rows; need at least 2")
    x1, r = pair[keep, 0], r[keep]
    idx = np.argsort(-r, kind="stable")
    return PolarSeries(x1[idx] / r[idx], r[idx], pair.shape[0], int((~keep).sum()))


def interval_distance(w, s: float, t: float):
    """Distance from ``w`` to ``[s, t]``: ``max(s - w, w - t, 0)``."""
    if s > t:
        raise ValueError(f"empty interval: s={s} > t={t}")
    return np.maximum(np.maximum(s - np.asarray(w, dtype=float), np.asarray(w, dtype=float) - t), 0.0)


def radial_weight(r):
    """``L(r) = r log r`` for ``r >= 1``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 1):
        raise ValueError("radial_weight is defined for r >= 1")
    return r * np.log(r)


def _top_k(series: PolarSeries, k: int) -> tuple[np.ndarray, np.ndarray]:
    if k > len(series):
        raise ValueError(f"k={k} exceeds the {len(series)} available polar points")
    r = series.r[:k]
    return series.w[:k], radial_weight(r / r[-1])


def d_k(series: PolarSeries, cfg: AacConfig, s: float, t: float) -> float:
    w, weight = _top_k(series, cfg.k)
    return float(np.sum(interval_distance(w, s, t) * weight) / cfg.k)


def objective(series: PolarSeries, cfg: AacConfig, s: float, t: float) -> float:
    return (t - s) + cfg.lam * cfg.k ** cfg.gamma * d_k(series, cfg, s, t)


def make_objective(series: PolarSeries, cfg: AacConfig) -> Callable[[float, float], float]:
    """Precompute the top-``k`` weights; returns ``f(s, t)`` equal to :func:`objective`."""
    w, weight = _top_k(series, cfg.k)
    scale = cfg.lam * cfg.k ** cfg.gamma / cfg.k

    def f(s: float, t: float) -> float:
        dist = np.maximum(np.maximum(s - w, w - t), 0.0)
        return (t - s) + scale * float(dist @ weight)

    return f


def _project(x: np.ndarray) -> tuple[float, float, float]:
    """Feasible point for ``x`` and the total constraint violation."""
    s, t = float(x[0]), float(x[1])
    violation = max(0.0, -s) + max(0.0, s - 1) + max(0.0, -t) + max(0.0, t - 1) + max(0.0, s - t)
    s, t = min(max(s, 0.0), 1.0), min(max(t, 0.0), 1.0)
    if s > t:
        s, t = t, s
    return s, t, violation


def _initial_simplex(start: tuple[float, float], step: float = 0.1) -> np.ndarray:
    x0 = np.asarray(start, dtype=float)
    pts = [x0]
    for j in range(2):
        p = x0.copy()
        p[j] += step if p[j] + step <= 1.0 else -step
        pts.append(p)
    return np.array(pts)


def minimize_simplex(f: Callable[[float, float], float],
                     starts: Sequence[tuple[float, float]] = DEFAULT_STARTS,
                     tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER):
    """Multi-start Nelder-Mead over ``{0 <= s <= t <= 1}``.

    Trial points are projected onto the feasible set before evaluating ``f``
    and charged ``BARRIER * violation``. Returns ``(s, t, f(s, t), report)``
    for the best restart; ties go to the shorter interval, then smaller ``s``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    starts = [tuple(map(float, p)) for p in starts]
    if not any(0 <= s <= t <= 1 for s, t in starts):
        raise ValueError("need at least one start point with 0 <= s <= t <= 1")

    def penalized(x: np.ndarray) -> float:
        s, t, violation = _project(x)
        value = f(s, t)
        if not math.isfinite(value):
            raise FloatingPointError(f"objective is not finite at (s, t) = ({s}, {t})")
        return value + BARRIER * violation

    best = None
    total_iter = 0
    for start in starts:
        res = minimize(penalized, np.asarray(start), method="Nelder-Mead",
                       options={"initial_simplex": _initial_simplex(start), "xatol": tol,
                                "fatol": np.inf, "maxiter": max_iter})
        total_iter += int(res.nit)
        simplex = res.final_simplex[0]
        diameter = max(np.max(np.abs(simplex[i] - simplex[j]))
                       for i in range(3) for j in range(i + 1, 3))
        s, t, _ = _project(res.x)
        cand = (f(s, t), s, t, bool(diameter < tol))
        if best is None or _better(cand, best):
            best = cand
    value, s, t, converged = best
    return s, t, value, OptimizerReport(total_iter, len(starts), converged)


def _better(cand, best) -> bool:
    fc, sc, tc, _ = cand
    fb, sb, tb, _ = best
    if fc < fb - _TIE_RTOL * max(1.0, abs(fb)):
        return True
    if fc > fb + _TIE_RTOL * max(1.0, abs(fb)):
        return False
    return (tc - sc, sc) < (tb - sb, sb)


def estimate_support(series: PolarSeries, cfg: AacConfig,
                     starts: Sequence[tuple[float, float]] = DEFAULT_STARTS,
                     tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SupportInterval:
    if cfg.k < 2:
        raise ValueError("support estimation needs k >= 2")
    f = make_objective(series, cfg)
    s, t, value, report = minimize_simplex(f, starts, tol, max_iter)
    return SupportInterval(s, t, value, report)


@dataclass(frozen=True)
class AacResult:
    tau_uv: float
    tau_vu: float
    support: SupportInterval
    dropped_zero_rows: int


def aac_pair(u, v, cfg: AacConfig) -> AacResult:
    """Angular asymmetry coefficient of ``(u, v)``; positive means ``u`` causes ``v``.

    The support is estimated once on ``w = u / (u + v)``; the reverse
    coefficient is the exact negation.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("u and v must be 1-d columns of equal length")
    series = polarize(np.column_stack([u, v]))
    support = estimate_support(series, cfg)
    tau = support.tau
    return AacResult(tau, -tau, support, series.dropped_zero_rows)


def dk_limit_oracle(atoms: Sequence[tuple[float, float]], alpha: float, s: float, t: float) -> float:
    """Large-sample limit of :func:`d_k` for a discrete angular law.

    ``atoms`` are ``(angle, mass)`` pairs with masses summing to one. The
    radial factor ``int_1^inf r log r  alpha r^(-alpha-1) dr`` equals
    ``alpha / (alpha - 1)**2`` and diverges for ``alpha <= 1``.
    """
    if alpha <= 1:
        raise ValueError(f"the radial integral diverges for alpha <= 1 (got {alpha})")
    masses = np.array([p for _, p in atoms], dtype=float)
    angles = np.array([w for w, _ in atoms], dtype=float)
    if np.any(masses < 0) or not math.isclose(masses.sum(), 1.0, abs_tol=1e-9):
        raise ValueError("atom masses must be nonnegative and sum to 1")
    if np.any((angles < 0) | (angles > 1)):
        raise ValueError("atom angles must lie in [0, 1]")
    return float(masses @ interval_distance(angles, s, t)) * alpha / (alpha - 1) ** 2
