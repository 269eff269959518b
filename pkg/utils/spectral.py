"""
Characteristic functions phi_hat(xi) = sum_x phi(x) e^{i x.xi}, the maximizer
set Omega(phi), and the Maclaurin series of
Gamma_{xi0}(xi) = Log(phi_hat(xi + xi0) / phi_hat(xi0)).
"""

import itertools
import logging
import math
from typing import Iterator, List, Optional, Tuple

import numpy as np
import scipy.fft
from scipy import ndimage

from config import Config
from models.lattice import LatticeFunction
from models.series import PowerSeries
from models.spectral import FrequencyPoint, MaximizerSet
from utils.errors import NormalizationError, ResourceLimitError, SeriesConsistencyError

logger = logging.getLogger(__name__)

# Candidates for the Newton polish: grid local maxima within this much of the grid max.
CANDIDATE_WINDOW = 1e-2
SNAP_DENOMINATOR = 24
SNAP_RADIUS = 1e-4


def _as_vector(xi) -> np.ndarray:
    if isinstance(xi, FrequencyPoint):
        return xi.as_array()
    return np.asarray(xi, dtype=float)


# ---------------------------- EVALUATION ---------------------------- #

def eval_charfn(f: LatticeFunction, xi) -> complex:
    """phi_hat(xi), an exact finite sum over supp(f)."""
    pts = f.support_points()
    phase = np.exp(1j * (pts @ _as_vector(xi)))
    return complex(f.support_values() @ phase)


def charfn_values(f: LatticeFunction, xis: np.ndarray) -> np.ndarray:
    """phi_hat at a batch of frequencies, shape (N, d) -> (N,)."""
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    return np.exp(1j * (xis @ f.support_points().T)) @ f.support_values()


def charfn_grid(f: LatticeFunction, n_per_axis: int, workers: int = None) -> np.ndarray:
    """
    phi_hat on the uniform torus grid xi_k = 2 pi k / N (k = 0..N-1 per axis).
    Aliasing of lattice points mod N is harmless: e^{i x.xi_k} is N-periodic in x.
    """
    workers = Config.THREADS if workers is None else workers
    N = int(n_per_axis)
    grid = np.zeros((N,) * f.dim, dtype=complex)
    idx = tuple((f.support_points() % N).T)
    np.add.at(grid, idx, f.support_values())
    return scipy.fft.ifftn(grid, workers=workers) * (N ** f.dim)


def grid_frequencies(N: int) -> np.ndarray:
    """Canonical (-pi, pi] angle of each grid index 0..N-1."""
    ang = 2 * math.pi * np.arange(N) / N
    return np.where(ang > math.pi, ang - 2 * math.pi, ang)


def _charfn_jet(pts: np.ndarray, vals: np.ndarray, xi: np.ndarray):
    """phi_hat, its gradient and Hessian at xi."""
    e = vals * np.exp(1j * (pts @ xi))
    value = e.sum()
    grad = 1j * (pts.T @ e)
    hess = -(pts.T * e) @ pts
    return value, grad, hess


def _abs2_jet(pts, vals, xi):
    v, g, h = _charfn_jet(pts, vals, xi)
    val = abs(v) ** 2
    grad = 2 * np.real(np.conj(v) * g)
    hess = 2 * np.real(np.outer(np.conj(g), g) + np.conj(v) * h)
    return val, grad, hess


# ---------------------------- MAXIMIZERS ---------------------------- #

def default_grid_per_axis(f: LatticeFunction) -> int:
    return Config.GRID_OVERSAMPLE * max(f.values.shape)


def _newton_polish(pts: np.ndarray, vals: np.ndarray, xi0: np.ndarray, max_iter: int = 100) -> Tuple[np.ndarray, float]:
    """Damped Newton ascent of |phi_hat|^2 from xi0."""
    xi = np.array(xi0, dtype=float)
    val, grad, hess = _abs2_jet(pts, vals, xi)
    for it in range(max_iter):
        if np.linalg.norm(grad) < 1e-15:
            break
        eig = np.linalg.eigvalsh(hess)
        if eig.max() < 0:
            step = -np.linalg.solve(hess, grad)
        else:
            step = grad / max(abs(eig).max(), 1.0)
        alpha = 1.0
        while alpha > 1e-12:
            trial = xi + alpha * step
            tval = abs(vals @ np.exp(1j * (pts @ trial))) ** 2
            if tval >= val:
                break
            alpha *= 0.5
        else:
            break
        if np.linalg.norm(alpha * step) < 1e-16:
            break
        xi = trial
        val, grad, hess = _abs2_jet(pts, vals, xi)
    logger.debug("Newton polish from %s -> %s (|phi_hat|^2=%.17g, %d iterations)", xi0, xi, val, it + 1)
    return xi, val


def _snap_to_rational_pi(pts, vals, xi: np.ndarray, val: float) -> np.ndarray:
    """Replace coordinates near k*pi/q (q <= 24) by the exact angle when |phi_hat| does not drop."""
    snapped = xi.copy()
    for j, c in enumerate(xi):
        for q in range(1, SNAP_DENOMINATOR + 1):
            cand = round(c * q / math.pi) * math.pi / q
            if abs(c - cand) < SNAP_RADIUS:
                snapped[j] = cand
                break
    snapped_val = abs(vals @ np.exp(1j * (pts @ snapped))) ** 2
    return snapped if snapped_val >= val - 1e-14 else xi


def _polished_candidates(f: LatticeFunction, grid_per_axis: Optional[int]) -> List[Tuple[np.ndarray, float]]:
    N = int(grid_per_axis or default_grid_per_axis(f))
    if N < 8:
        raise ValueError("grid_per_axis must be at least 8.")
    mag = np.abs(charfn_grid(f, N))
    peak = mag.max()
    local = ndimage.maximum_filter(mag, size=3, mode='wrap') == mag
    candidates = np.argwhere(local & (mag >= peak - CANDIDATE_WINDOW))
    freqs = grid_frequencies(N)
    pts, vals = f.support_points().astype(float), f.support_values()
    polished = []
    for idx in candidates:
        xi, val = _newton_polish(pts, vals, freqs[idx])
        xi = _snap_to_rational_pi(pts, vals, xi, val)
        polished.append((xi, abs(vals @ np.exp(1j * (pts @ xi)))))
    logger.debug("Polished %d grid candidates on a %d^%d grid", len(polished), N, f.dim)
    return polished


def sup_abs_charfn(f: LatticeFunction, grid_per_axis: int = None) -> float:
    """sup over T^d of |phi_hat|: dense grid scan followed by Newton polish."""
    polished = _polished_candidates(f, grid_per_axis)
    return float(max(v for _, v in polished))


def find_maximizers(f: LatticeFunction, grid_per_axis: int = None, tol: float = None,
                    merge_radius: float = None) -> MaximizerSet:
    """All torus points with |phi_hat| >= 1 - tol, merged within merge_radius."""
    tol = Config.MAXIMIZER_TOL if tol is None else tol
    merge_radius = Config.MERGE_RADIUS if merge_radius is None else merge_radius
    N = int(grid_per_axis or default_grid_per_axis(f))
    polished = _polished_candidates(f, N)
    sup = max(v for _, v in polished)
    if abs(sup - 1.0) > tol:
        raise NormalizationError(
            f"sup |phi_hat| = {sup:.15g} is not 1 within {tol:g}; "
            f"divide phi by sup_abs_charfn(phi) before searching for maximizers.")

    kept: List[Tuple[FrequencyPoint, float]] = []
    for xi, v in sorted(polished, key=lambda t: -t[1]):
        if v < 1.0 - tol:
            continue
        point = FrequencyPoint(tuple(xi))
        if any(point.distance(p) <= merge_radius for p, _ in kept):
            continue
        kept.append((point, v))
    kept.sort(key=lambda t: t[0].coords)
    points = tuple(p for p, _ in kept)
    values = tuple(eval_charfn(f, p) for p in points)
    logger.info("Found %d maximizer(s): %s", len(points),
                ', '.join(f"({', '.join(f'{c / math.pi:.4g}pi' for c in p.coords)})" for p in points))
    return MaximizerSet(points=points, values=values, tol=tol, merge_radius=merge_radius, grid_per_axis=N)


# ---------------------------- GAMMA SERIES ---------------------------- #

def multi_indices(dim: int, order: int) -> Iterator[Tuple[int, ...]]:
    """All alpha in N^dim with |alpha| <= order, by degree then lexicographically."""
    for deg in range(order + 1):
        for alpha in sorted(itertools.product(range(deg + 1), repeat=dim), reverse=True):
            if sum(alpha) == deg:
                yield alpha


def taylor_ratio_series(f: LatticeFunction, xi0, order: int) -> PowerSeries:
    """Taylor series of phi_hat(xi + xi0) / phi_hat(xi0) from exact derivatives."""
    x0 = _as_vector(xi0)
    pts = f.support_points().astype(float)
    weights = f.support_values() * np.exp(1j * (pts @ x0))
    value = weights.sum()
    weights = weights / value
    ipts = 1j * pts
    coeffs = {}
    for alpha in multi_indices(f.dim, order):
        factor = np.ones(len(weights), dtype=complex)
        for j, a in enumerate(alpha):
            if a:
                factor = factor * ipts[:, j] ** a / math.factorial(a)
        coeffs[alpha] = complex(weights @ factor)
    return PowerSeries(f.dim, order, coeffs)


def gamma_series(f: LatticeFunction, xi0, order: int, tol: float = None,
                 max_order: int = None) -> PowerSeries:
    """Gamma_{xi0} through total degree `order` via the formal logarithm."""
    tol = Config.MAXIMIZER_TOL if tol is None else tol
    max_order = Config.MAX_SERIES_ORDER if max_order is None else max_order
    order = int(order)
    if order < 2:
        raise ValueError("Gamma series needs order >= 2.")
    if order > max_order:
        raise ResourceLimitError(
            f"Series order {order} exceeds the configured maximum {max_order} "
            f"({sum(1 for _ in multi_indices(f.dim, order))} coefficients requested).",
            required=order, budget=max_order)
    v = eval_charfn(f, xi0)
    if abs(abs(v) - 1.0) > tol:
        raise NormalizationError(f"|phi_hat(xi0)| = {abs(v):.15g} is not 1 within {tol:g}.")

    ratio = taylor_ratio_series(f, xi0, order)
    c0 = ratio.constant_term()
    if abs(c0 - 1.0) > 1e-10:
        raise SeriesConsistencyError(f"Constant term of the ratio series is {c0}, expected 1.")
    u = ratio.filter(lambda a, c: sum(a) > 0)
    return u.log1p()
