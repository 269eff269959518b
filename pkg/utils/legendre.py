"""
Legendre-Fenchel transform R^#(x) = sup_xi {x.xi - R(xi)} of the real part of a
positive-homogeneous polynomial.

Pure-power R = sum_j c_j xi_j^{2 m_j} has a closed form; anything else goes
through a batched multistart damped-Newton ascent, vectorized over every
(x, start) pair at once.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from models.homogeneity import ExponentMatrix
from models.series import PowerSeries
from utils.errors import ConvergenceError, UnsupportedFormError
from utils.homogeneity import matrix_power_apply
from utils.sampling import get_rng, log_uniform, unit_ball

logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e3


@dataclass(frozen=True)
class LegendreEvalConfig:
    multistart_per_axis: int = Config.LF_MULTISTART_PER_AXIS
    max_iter: int = Config.LF_MAX_ITER
    grad_tol: float = Config.LF_GRAD_TOL
    box_scale: float = Config.LF_BOX_SCALE

    def __post_init__(self):
        for name in ('multistart_per_axis', 'max_iter', 'grad_tol', 'box_scale'):
            if not getattr(self, name) > 0:
                raise ValueError(f"LegendreEvalConfig.{name} must be positive.")


@dataclass(frozen=True)
class LegendreResult:
    value: float
    argmax: Tuple[float, ...]


# ---------------------------- CLOSED FORM ---------------------------- #

def diagonal_coefficients(R: PowerSeries) -> List[Tuple[float, int]]:
    """(c_j, m_j) for R = sum_j c_j xi_j^{2 m_j}; UnsupportedFormError otherwise."""
    found: Dict[int, Tuple[float, int]] = {}
    for alpha, c in R.terms():
        axes = [j for j, a in enumerate(alpha) if a]
        if len(axes) != 1 or alpha[axes[0]] % 2 or abs(c.imag) > 1e-14 or c.real <= 0:
            raise UnsupportedFormError(
                f"R has the term {c:.6g}*xi^{alpha}; the closed form needs sum_j c_j xi_j^(2m_j) with c_j > 0.")
        j = axes[0]
        if j in found:
            raise UnsupportedFormError(f"R has more than one power of xi_{j + 1}.")
        found[j] = (float(c.real), alpha[j] // 2)
    if len(found) != R.dim:
        raise UnsupportedFormError("R does not depend on every coordinate.")
    return [found[j] for j in range(R.dim)]


def is_pure_power(R: PowerSeries) -> bool:
    try:
        diagonal_coefficients(R)
    except UnsupportedFormError:
        return False
    return True


def lf_closed_form_diagonal(coeffs: Sequence[Tuple[float, int]], x) -> np.ndarray:
    """sum_j (2m_j - 1) c_j (|x_j| / (2 m_j c_j))^{2m_j/(2m_j - 1)}; x is (d,) or (N, d)."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != len(coeffs):
        raise ValueError(f"Expected {len(coeffs)} coordinates, got {X.shape[1]}.")
    total = np.zeros(X.shape[0])
    for j, (c, m) in enumerate(coeffs):
        p = 2 * m / (2 * m - 1)
        total += (2 * m - 1) * c * (np.abs(X[:, j]) / (2 * m * c)) ** p
    return float(total[0]) if single else total


# ---------------------------- MULTISTART ASCENT ---------------------------- #

def _infer_weights(R: PowerSeries, m: Optional[Sequence[int]]) -> np.ndarray:
    if m is not None:
        return np.asarray(m, dtype=int)
    return np.array([max(1, math.ceil(R.max_power(j) / 2)) for j in range(R.dim)], dtype=int)


def _lf_batch(R: PowerSeries, X: np.ndarray, cfg: LegendreEvalConfig, m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    Rr = R.real_part()
    grad_series = Rr.gradient
    hess_series = Rr.hessian
    N, d = X.shape

    halfwidth = cfg.box_scale * (1 + np.abs(X)) ** (1.0 / (2 * m - 1))          # (N, d)
    unit = np.linspace(-1.0, 1.0, cfg.multistart_per_axis)
    grid = np.array(list(itertools.product(unit, repeat=d)))                     # (k^d, d)
    grid = np.vstack([np.zeros((1, d)), grid])
    S = grid.shape[0]
    xi = (grid[None, :, :] * halfwidth[:, None, :]).reshape(N * S, d)
    Xr = np.repeat(X, S, axis=0)
    limit = DIVERGENCE_FACTOR * np.linalg.norm(np.repeat(halfwidth, S, axis=0), axis=1)
    tol = cfg.grad_tol * (1 + np.linalg.norm(Xr, axis=1))

    def objective(rows, pts):
        return (Xr[rows] * pts).sum(axis=1) - np.real(Rr(pts))

    rows_all = np.arange(N * S)
    fval = objective(rows_all, xi)
    active = np.ones(N * S, dtype=bool)

    for it in range(cfg.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        pts = xi[idx]
        grad = Xr[idx] - np.column_stack([np.real(g(pts)) for g in grad_series])
        done = np.linalg.norm(grad, axis=1) <= tol[idx]
        active[idx[done]] = False
        keep = ~done
        idx, pts, grad = idx[keep], pts[keep], grad[keep]
        if idx.size == 0:
            break

        hess = np.empty((idx.size, d, d))
        for a in range(d):
            for b in range(d):
                hess[:, a, b] = np.real(hess_series[a][b](pts))
        eig = np.linalg.eigvalsh(hess)
        convex = eig[:, 0] > 1e-14 * np.maximum(1.0, np.abs(eig[:, -1]))
        safe = np.where(convex[:, None, None], hess, np.eye(d)[None])
        newton = np.linalg.solve(safe, grad[..., None])[..., 0]
        scale = np.maximum(1.0, np.abs(eig).max(axis=1))
        step = np.where(convex[:, None], newton, grad / scale[:, None])

        alpha = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        for _ in range(60):
            pending = np.flatnonzero(~accepted)
            if pending.size == 0:
                break
            trial = pts[pending] + alpha[pending, None] * step[pending]
            ft = objective(idx[pending], trial)
            ok = ft >= fval[idx[pending]]
            good = pending[ok]
            xi[idx[good]] = trial[ok]
            fval[idx[good]] = ft[ok]
            accepted[good] = True
            alpha[pending[~ok]] *= 0.5
        # no ascent direction left within roundoff
        active[idx[~accepted]] = False

        far = np.linalg.norm(xi[idx], axis=1) > limit[idx]
        if far.any():
            bad = idx[far][0]
            raise ConvergenceError(
                f"Legendre-Fenchel ascent diverged for x={Xr[bad].tolist()} from start "
                f"{(grid[bad % S] * halfwidth[bad // S]).tolist()} (|xi| > {limit[bad]:.3g}).")

    if active.any():
        logger.warning("%d of %d Legendre-Fenchel ascents hit max_iter=%d without meeting grad_tol",
                       int(active.sum()), N * S, cfg.max_iter)

    fval = fval.reshape(N, S)
    best = fval.argmax(axis=1)
    values = fval[np.arange(N), best]
    argmax = xi.reshape(N, S, d)[np.arange(N), best]
    return np.maximum(values, 0.0), argmax


def lf_eval(R: PowerSeries, x, cfg: LegendreEvalConfig = None, m: Sequence[int] = None) -> LegendreResult:
    """R^#(x) with its (non-unique) argmax by multistart damped Newton."""
    cfg = cfg or LegendreEvalConfig()
    X = np.atleast_2d(np.asarray(x, dtype=float))
    values, argmax = _lf_batch(R, X, cfg, _infer_weights(R, m))
    return LegendreResult(value=float(values[0]), argmax=tuple(float(v) for v in argmax[0]))


def lf_eval_many(R: PowerSeries, X, cfg: LegendreEvalConfig = None, m: Sequence[int] = None) -> np.ndarray:
    cfg = cfg or LegendreEvalConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return _lf_batch(R, X, cfg, _infer_weights(R, m))[0]


def conjugate_evaluator(R: PowerSeries, m: Sequence[int] = None,
                        cfg: LegendreEvalConfig = None) -> Callable[[np.ndarray], np.ndarray]:
    """
    Vectorized x -> R^#(x). Closed form for pure-power R; otherwise the
    multistart ascent, memoized per point.
    """
    try:
        coeffs = diagonal_coefficients(R)
    except UnsupportedFormError:
        coeffs = None
    if coeffs is not None:
        logger.debug("conjugate_evaluator: closed form for %s", R)
        return lambda X: lf_closed_form_diagonal(coeffs, np.atleast_2d(np.asarray(X, dtype=float)))

    cfg = cfg or LegendreEvalConfig()
    weights = _infer_weights(R, m)
    cache: Dict[Tuple[float, ...], float] = {}

    def evaluate(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        keys = [tuple(row) for row in X]
        missing = sorted({k for k in keys if k not in cache})
        if missing:
            vals = _lf_batch(R, np.array(missing), cfg, weights)[0]
            cache.update(zip(missing, vals))
        return np.array([cache[k] for k in keys])

    return evaluate


# ---------------------------- HOMOGENEITY ---------------------------- #

def lf_homogeneity_check(R: PowerSeries, D, samples: int = 64, rng: np.random.Generator = None,
                         cfg: LegendreEvalConfig = None, ts: Sequence[float] = None) -> float:
    """
    max |R^#(t^F x) - t R^#(x)| / (1 + t R^#(x)) with F = (I - D)^T, over
    t log-uniform in [1/8, 8] and x in the ball of radius 2.
    """
    rng = get_rng(rng)
    D = D if isinstance(D, ExponentMatrix) else ExponentMatrix(D)
    F = D.complement()
    m = [max(1, round(1 / (2 * v))) for v in np.diag(D.as_array())]
    conj = conjugate_evaluator(R, m=m, cfg=cfg)
    ts = np.asarray(ts, dtype=float) if ts is not None else log_uniform(rng, samples, 1 / 8, 8)
    X = 2.0 * unit_ball(rng, len(ts), R.dim)
    base = conj(X)
    scaled = np.array([matrix_power_apply(F, t, x) for t, x in zip(ts, X)])
    moved = conj(scaled)
    residual = np.abs(moved - ts * base) / (1 + ts * base)
    return float(residual.max())
