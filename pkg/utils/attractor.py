"""
Heat-kernel attractors

    H_P^t(x) = (2 pi)^{-d} int_{R^d} e^{-t P(xi)} e^{-i x.xi} dxi

by truncated Gauss-Legendre quadrature, the local-limit attractor sum A^n(x),
and Fourier inversion of phi^(n) on the torus.
"""

import logging
import math
from typing import Iterable, List, Optional, Sequence

import numpy as np
import scipy.fft

from config import Config
from models.lattice import BoxDomain, LatticeFunction
from models.quadrature import AttractorTerm, QuadratureSpec
from models.series import PowerSeries
from utils.errors import ConvergenceError, ResourceLimitError
from utils.homogeneity import positive_definite_minimum
from utils.sampling import get_rng
from utils.spectral import charfn_grid

logger = logging.getLogger(__name__)

TAIL_SAMPLES_PER_FACE = 256
MAX_BOX_DOUBLINGS = 20


def principal_weights(P: PowerSeries) -> List[int]:
    """m_j = ceil(max power of xi_j / 2)."""
    return [max(1, math.ceil(P.max_power(j) / 2)) for j in range(P.dim)]


# ---------------------------- QUADRATURE SPEC ---------------------------- #

def _tail_bound_holds(R: PowerSeries, t: float, L: np.ndarray, level: float, rng) -> np.ndarray:
    """Per axis: t R >= level on sampled points of both faces xi_j = +-L_j."""
    d = len(L)
    ok = np.ones(d, dtype=bool)
    for j in range(d):
        pts = rng.uniform(-1.0, 1.0, size=(TAIL_SAMPLES_PER_FACE, d)) * L
        pts[: TAIL_SAMPLES_PER_FACE // 2, j] = L[j]
        pts[TAIL_SAMPLES_PER_FACE // 2:, j] = -L[j]
        ok[j] = bool(np.all(t * np.real(R(pts)) >= level))
    return ok


def solve_quadrature_spec(P: PowerSeries, t: float, x_extent: Sequence[float] = None,
                          m: Sequence[int] = None, target_eps: float = None,
                          rng: np.random.Generator = None) -> QuadratureSpec:
    """
    L_j = (ln(1/eps) / (t c d))^{1/(2 m_j)} from the coercivity constant c of Re P,
    doubled per axis until the sampled tail bound holds; N_j grows with L_j |x_j|.
    """
    target_eps = Config.TARGET_EPS if target_eps is None else target_eps
    if not t > 0:
        raise ValueError(f"Heat kernel time must be positive, got t={t}.")
    rng = get_rng(rng)
    d = P.dim
    m = np.asarray(m if m is not None else principal_weights(P), dtype=int)
    R = P.real_part()
    c = positive_definite_minimum(R, m, samples=2000, rng=rng)
    if not c > 0:
        raise ValueError("Re P is not positive definite; the heat kernel integral diverges.")
    level = math.log(1.0 / target_eps)
    L = (level / (t * c * d)) ** (1.0 / (2 * m))

    for _ in range(MAX_BOX_DOUBLINGS):
        ok = _tail_bound_holds(R, t, L, level, rng)
        if ok.all():
            break
        L = np.where(ok, L, 2 * L)
    else:
        raise ResourceLimitError(f"Tail bound t*R >= ln(1/eps) not reached on any box up to halfwidths {L.tolist()}.",
                                 required=float(L.max()))

    extent = np.zeros(d) if x_extent is None else np.abs(np.asarray(x_extent, dtype=float))
    nodes = [max(16, math.ceil(Lj * xj) + 32) for Lj, xj in zip(L, extent)]
    nodes = [n + (n % 2) for n in nodes]
    return QuadratureSpec(tuple(L), tuple(nodes), target_eps)


# ---------------------------- HEAT KERNEL ---------------------------- #

def _univariate_parts(P: PowerSeries) -> List[dict]:
    """P = sum_j p_j(xi_j): power -> coefficient for each axis."""
    parts = [dict() for _ in range(P.dim)]
    for alpha, c in P.terms():
        axes = [j for j, a in enumerate(alpha) if a]
        if not axes:
            continue
        parts[axes[0]][alpha[axes[0]]] = c
    return parts


def _gauss(L: float, N: int):
    s, w = np.polynomial.legendre.leggauss(N)
    return s * L, w * L


def _separable_integral(parts, t, X, spec: QuadratureSpec) -> np.ndarray:
    result = np.ones(X.shape[0], dtype=complex)
    for j, poly in enumerate(parts):
        s, w = _gauss(spec.halfwidths[j], spec.nodes[j])
        p = sum((c * s ** k for k, c in poly.items()), np.zeros_like(s, dtype=complex))
        g = w * np.exp(-t * p)
        result *= np.exp(-1j * np.outer(X[:, j], s)) @ g
    return result


def _tensor_integral(P, t, X, spec: QuadratureSpec) -> np.ndarray:
    axes = [_gauss(L, N) for L, N in zip(spec.halfwidths, spec.nodes)]
    mesh = np.meshgrid(*[s for s, _ in axes], indexing='ij')
    pts = np.column_stack([g.ravel() for g in mesh])
    G = np.exp(-t * P(pts)).reshape(spec.nodes)
    for j, (_, w) in enumerate(axes):
        shape = [1] * len(axes); shape[j] = -1
        G = G * w.reshape(shape)
    T = np.tensordot(np.exp(-1j * np.outer(X[:, 0], axes[0][0])), G, axes=([1], [0]))
    for j in range(1, len(axes)):
        T = np.einsum('xa,xa...->x...', np.exp(-1j * np.outer(X[:, j], axes[j][0])), T)
    return T


def _integrate(P, t, X, spec, separable_parts) -> np.ndarray:
    if separable_parts is not None:
        return _separable_integral(separable_parts, t, X, spec)
    return _tensor_integral(P, t, X, spec)


def heat_kernel_eval(P: PowerSeries, t: float, x, spec: QuadratureSpec = None,
                     m: Sequence[int] = None, max_nodes: int = None, separable: Optional[bool] = None,
                     rng: np.random.Generator = None, target_eps: float = None):
    """
    H_P^t at one point x (returns complex) or a batch of rows (returns an array).
    Node counts double until two refinements agree to spec.target_eps relative
    to the on-diagonal scale int |e^{-tP}|.
    """
    max_nodes = Config.QUADRATURE_MAX_NODES if max_nodes is None else max_nodes
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != P.dim:
        raise ValueError(f"Expected points with {P.dim} coordinates, got shape {X.shape}.")
    if spec is None:
        spec = solve_quadrature_spec(P, t, np.abs(X).max(axis=0), m=m, target_eps=target_eps, rng=rng)

    use_separable = P.is_separable if separable is None else separable
    parts = _univariate_parts(P) if use_separable else None
    norm = (2 * math.pi) ** (-P.dim)

    def cost(s):
        return sum(s.nodes) if use_separable else s.total_nodes

    absP = None
    previous = None
    for refinement in range(Config.MAX_REFINEMENTS + 1):
        if cost(spec) > max_nodes:
            raise ResourceLimitError(
                f"Heat kernel quadrature needs {cost(spec)} nodes ({spec.nodes}), budget is {max_nodes}; "
                f"raise CONVPOW_QUADRATURE_MAX_NODES.", required=cost(spec), budget=max_nodes)
        current = _integrate(P, t, X, spec, parts) * norm
        if absP is None:
            # |e^{-tP}| = e^{-t Re P}: the value at x = 0 of the real-part kernel
            real = P.real_part()
            absP = abs(_integrate(real, t, np.zeros((1, P.dim)), spec,
                                  _univariate_parts(real) if use_separable else None)[0]) * norm
        if previous is not None:
            err = np.abs(current - previous).max()
            logger.debug("heat_kernel_eval t=%g nodes=%s change=%.3e scale=%.3e", t, spec.nodes, err, absP)
            if err <= spec.target_eps * max(absP, np.abs(current).max()):
                return complex(current[0]) if single else current
        previous = current
        spec = spec.doubled()
    raise ConvergenceError(
        f"Heat kernel quadrature for t={t} did not converge after {Config.MAX_REFINEMENTS} doublings "
        f"(last nodes {spec.nodes}).")


def heat_kernel_grid(P: PowerSeries, t: float, axes: Sequence[np.ndarray], **kwargs) -> np.ndarray:
    """
    H_P^t on the product grid axes[0] x ... x axes[d-1]. A separable P factors
    into univariate kernels, so the grid is an outer product of d vectors.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    if P.is_separable and P.dim > 1:
        out = np.ones(tuple(len(a) for a in axes), dtype=complex)
        for j, poly in enumerate(_univariate_parts(P)):
            pj = PowerSeries(1, P.order, {(k,): c for k, c in poly.items()})
            h = heat_kernel_eval(pj, t, axes[j][:, None], **kwargs)
            shape = [1] * P.dim; shape[j] = -1
            out = out * h.reshape(shape)
        return out
    mesh = np.meshgrid(*axes, indexing='ij')
    pts = np.column_stack([g.ravel() for g in mesh])
    return heat_kernel_eval(P, t, pts, **kwargs).reshape(tuple(len(a) for a in axes))


# ---------------------------- ATTRACTOR SUM ---------------------------- #

def attractor_sum(terms: Iterable[AttractorTerm], n: int, x, spec: QuadratureSpec = None, **kwargs):
    """A^n(x) = sum_k e^{-i x.xi_k} phi_hat(xi_k)^n H_{P_k}^n(x - n alpha_k)."""
    n = int(n)
    if n < 1:
        raise ValueError("The attractor sum needs n >= 1.")
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    total = np.zeros(X.shape[0], dtype=complex)
    for term in terms:
        shifted = X - n * np.asarray(term.drift)
        H = heat_kernel_eval(term.P, n, shifted, spec=spec, **kwargs)
        phase = np.exp(-1j * (X @ term.xi.as_array())) * term.value ** n
        total += phase * H
    return complex(total[0]) if single else total


def attractor_grid(terms: Sequence[AttractorTerm], n: int, box: BoxDomain, **kwargs) -> np.ndarray:
    """A^n on every lattice point of `box`, shaped like the box."""
    n = int(n)
    axes = [a.astype(float) for a in box.axes()]
    total = np.zeros(box.shape, dtype=complex)
    for term in terms:
        shifted = [a - n * alpha for a, alpha in zip(axes, term.drift)]
        H = heat_kernel_grid(term.P, n, shifted, **kwargs)
        phase = np.ones(box.shape, dtype=complex) * term.value ** n
        for j, (a, xi) in enumerate(zip(axes, term.xi.coords)):
            shape = [1] * box.dim; shape[j] = -1
            phase = phase * np.exp(-1j * a * xi).reshape(shape)
        total += phase * H
    return total


# ---------------------------- FOURIER INVERSION ---------------------------- #

def inversion_nodes(f: LatticeFunction, n: int) -> int:
    return max(64, 4 * int(n) * max(f.values.shape))


def fourier_invert_power(f: LatticeFunction, n: int, x, nodes: int = None, max_nodes: int = None):
    """
    phi^(n)(x) = (2 pi)^{-d} int_{T^d} phi_hat^n e^{-i x.xi} dxi by the trapezoid
    rule, exact once the node count exceeds the width of supp(phi^(n)).
    """
    max_nodes = Config.QUADRATURE_MAX_NODES if max_nodes is None else max_nodes
    n = int(n)
    if n < 1:
        raise ValueError("fourier_invert_power needs n >= 1.")
    N = int(nodes or inversion_nodes(f, n))
    if N ** f.dim > max_nodes:
        raise ResourceLimitError(
            f"Fourier inversion needs {N}^{f.dim} = {N ** f.dim} nodes, budget is {max_nodes}.",
            required=N ** f.dim, budget=max_nodes)
    spectrum = charfn_grid(f, N) ** n
    # sum_k g(xi_k) e^{-i x.xi_k} is the forward DFT at index x mod N
    inverse = scipy.fft.fftn(spectrum, workers=Config.THREADS) / (N ** f.dim)
    X = np.asarray(x, dtype=int)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    out = inverse[tuple((X % N).T)]
    return complex(out[0]) if single else out
