"""
Positive-homogeneous polynomials: exponent-set membership, semi-elliptic
normalization, classification of Gamma expansions and the exponents mu, lambda.

Weighted degrees |alpha:2m| = sum_j alpha_j / (2 m_j) are always computed in
exact rational arithmetic (fractions.Fraction).
"""

import itertools
import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from config import Config
from models.homogeneity import (
    POSITIVE_HOMOGENEOUS,
    ComparisonResult,
    CorrectionExponent,
    ExpansionReport,
    ExponentMatrix,
    SemiEllipticStructure,
    SubhomogeneityResult,
    VerificationResult,
    unclassified,
)
from models.series import PowerSeries, weighted_degree
from models.spectral import FrequencyPoint
from utils.errors import (
    ClassificationError,
    ComparisonFailure,
    NotPositiveHomogeneousError,
    UnsupportedExponentError,
)
from utils.sampling import get_rng, log_uniform, unit_ball, unit_directions

logger = logging.getLogger(__name__)

COEFF_SNAP = 1e-10          # coefficients below this are treated as roundoff
EIGEN_RESIDUAL_TOL = 1e-8
EIGEN_SNAP_TOL = 1e-8
COMPARISON_SPREAD = 1e12
COMPARISON_END_SLOPE = 0.25


def _as_exponent(E) -> ExponentMatrix:
    return E if isinstance(E, ExponentMatrix) else ExponentMatrix(E)


def lcm_lower_bound(m: Sequence[int]) -> Fraction:
    """A-priori lower bound 1/(2 lcm(m)) on the correction exponent."""
    return Fraction(1, 2 * math.lcm(*[int(v) for v in m]))


def weighted_sphere_norm(xi: np.ndarray, m: Sequence[int]) -> np.ndarray:
    """sum_j xi_j^{2 m_j} row-wise."""
    xi = np.atleast_2d(xi)
    return (xi ** (2 * np.asarray(m))).sum(axis=1)


# ---------------------------- EXPONENT MATRICES ---------------------------- #

def matrix_power_apply(E, t: float, xi) -> np.ndarray:
    """t^E xi = expm((ln t) E) xi; xi may be one vector or a batch of rows."""
    if not t > 0:
        raise ValueError(f"t^E needs t > 0, got t={t}.")
    M = expm(math.log(t) * _as_exponent(E).as_array())
    xi = np.asarray(xi, dtype=float)
    return M @ xi if xi.ndim == 1 else xi @ M.T


def verify_exponent(P: PowerSeries, E, samples: int = 256, rng: np.random.Generator = None,
                    tol: float = None) -> VerificationResult:
    """
    Empirical check of t P(xi) = P(t^E xi).

    Residual: max |P(t^E xi) - t P(xi)| / (1 + |t P(xi)|) over random t in [1/8, 8]
    (log-uniform) and xi in the unit ball, plus axis probes at t in {1/8, 2, 8}.
    """
    tol = Config.EXPONENT_RESIDUAL_TOL if tol is None else tol
    E = _as_exponent(E)
    if E.dim != P.dim:
        raise ValueError(f"Exponent is {E.dim}x{E.dim} but P has {P.dim} variables.")
    rng = get_rng(rng)
    ts = list(log_uniform(rng, samples, 1 / 8, 8))
    xis = list(unit_ball(rng, samples, P.dim))
    for t in (1 / 8, 2.0, 8.0):
        for j in range(P.dim):
            ts.append(t)
            xis.append(np.eye(P.dim)[j])

    worst = 0.0
    for t, xi in zip(ts, xis):
        lhs = P(matrix_power_apply(E, t, xi))
        rhs = t * P(xi)
        worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
    logger.debug("verify_exponent: max residual %.3e over %d samples", worst, len(ts))
    return VerificationResult(holds=bool(worst <= tol), max_residual=float(worst), samples=len(ts))


# ---------------------------- POSITIVE DEFINITENESS ---------------------------- #

def positive_definite_minimum(R: PowerSeries, m: Sequence[int], samples: int = None,
                              rng: np.random.Generator = None, polish: int = 5) -> float:
    """
    Minimum of R on the weighted sphere {sum_j xi_j^{2 m_j} = 1}.

    R(u) / sum_j u_j^{2 m_j} is invariant along the curves s^D u, so the minimum
    over random Euclidean directions is the sphere minimum. The best few
    directions are polished with Nelder-Mead.
    """
    samples = Config.PD_SAMPLES if samples is None else samples
    rng = get_rng(rng)
    m = tuple(int(v) for v in m)

    def ratio(U):
        U = np.atleast_2d(U)
        rho = weighted_sphere_norm(U, m)
        vals = np.real(R(U))
        return np.where(rho > 0, vals / np.where(rho > 0, rho, 1.0), np.inf)

    U = unit_directions(rng, samples, R.dim)
    if R.dim == 1:
        U = np.array([[1.0], [-1.0]])
    values = ratio(U)
    best = float(values.min())
    for idx in np.argsort(values)[:polish]:
        res = minimize(lambda u: float(ratio(u)[0]), U[idx], method='Nelder-Mead',
                       options={'xatol': 1e-10, 'fatol': 1e-14, 'maxiter': 2000})
        best = min(best, float(res.fun))
    return best


# ---------------------------- NORMALIZATION ---------------------------- #

def _snap_weight(w: float) -> int:
    """The integer k with w = 1/(2k), k <= MAX_WEIGHT_DENOMINATOR."""
    if w <= 0:
        raise NotPositiveHomogeneousError(f"Exponent eigenvalue {w:.12g} is not positive.")
    k = int(round(1.0 / (2.0 * w)))
    if not 1 <= k <= Config.MAX_WEIGHT_DENOMINATOR or abs(w - 1.0 / (2 * k)) > EIGEN_SNAP_TOL:
        raise NotPositiveHomogeneousError(
            f"Exponent eigenvalue {w:.12g} is not of the form 1/(2k) with k <= {Config.MAX_WEIGHT_DENOMINATOR}.")
    return k


def _orient(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    return -v if nz.size and v[nz[0]] < 0 else v


def eigen_weights(E) -> Tuple[Tuple[int, ...], np.ndarray]:
    """
    Weights m and eigenvector matrix A of a real-diagonalizable exponent.
    Columns run by ascending m_j (descending eigenvalue); ties fall back to
    descending lexicographic order of the unit eigenvectors, so E = I/2 gives A = I.
    """
    E = _as_exponent(E)
    arr = E.as_array()
    w, V = np.linalg.eig(arr)
    if np.max(np.abs(np.imag(w))) > EIGEN_RESIDUAL_TOL:
        raise UnsupportedExponentError(
            "Exponent has non-real eigenvalues; only real-diagonalizable exponents are supported "
            "(the real Jordan construction is not implemented).")
    w, V = np.real(w), np.real(V)
    cond = np.linalg.cond(V)
    residual = np.linalg.norm(arr @ V - V * w)
    if not np.isfinite(cond) or cond > 1e8 or residual > EIGEN_RESIDUAL_TOL:
        raise UnsupportedExponentError(
            f"Exponent is not diagonalizable over R (eigen-residual {residual:.2e}, cond {cond:.2e}); "
            f"the real Jordan construction is not implemented.")
    ks = [_snap_weight(x) for x in w]
    cols = [_orient(V[:, j]) for j in range(len(w))]
    order = sorted(range(len(w)), key=lambda j: (ks[j], tuple(-c for c in cols[j])))
    m = tuple(ks[j] for j in order)
    A = np.column_stack([cols[j] for j in order])
    return m, A


def _weight_one_part(PA: PowerSeries, m: Sequence[int], what: str) -> PowerSeries:
    """Keep the |alpha:2m| = 1 terms; off-degree terms must be roundoff."""
    kept = {}
    for alpha, c in PA.terms():
        if weighted_degree(alpha, m) == 1:
            kept[alpha] = c
        elif abs(c) > COEFF_SNAP:
            raise ClassificationError(
                f"{what} has a term {alpha} of weighted degree {weighted_degree(alpha, m)} != 1 "
                f"(coefficient {c:.3e}) for m={tuple(m)}.")
    return PowerSeries(PA.dim, PA.order, kept)


def semi_elliptic_normalize(P: PowerSeries, E, pd_tol: float = None,
                            rng: np.random.Generator = None) -> SemiEllipticStructure:
    """A with P_A(xi) = P(A xi) semi-elliptic for weights m read off the spectrum of E."""
    pd_tol = Config.PD_TOL if pd_tol is None else pd_tol
    E = _as_exponent(E)
    check = verify_exponent(P, E, rng=rng)
    if not check.holds:
        raise NotPositiveHomogeneousError(
            f"E is not an exponent of P (homogeneity residual {check.max_residual:.3e}).")
    m, A = eigen_weights(E)
    PA = _weight_one_part(P.compose_linear(A), m, "P composed with A")
    pd = positive_definite_minimum(PA.real_part(), m, rng=rng)
    if pd <= pd_tol:
        raise ClassificationError(
            f"Re P_A is not positive definite: minimum {pd:.3e} on the weighted sphere (m={m}).")
    logger.debug("semi_elliptic_normalize: m=%s, A=%s, pd_minimum=%.3e", m, A.tolist(), pd)
    return SemiEllipticStructure(m=m, A=A, PA=PA, pd_minimum=pd)


# ---------------------------- CLASSIFICATION ---------------------------- #

def _candidate_weights(dim: int, m_max: int) -> List[Tuple[int, ...]]:
    """All m in {1..m_max}^dim by ascending mu, then lexicographically."""
    cands = itertools.product(range(1, m_max + 1), repeat=dim)
    return sorted(cands, key=lambda m: (sum(Fraction(1, 2 * v) for v in m), m))


def _split_by_weight(rest: PowerSeries, m: Sequence[int]) -> Optional[PowerSeries]:
    """-(weight-one terms) if every term weighs at least 1, else None."""
    principal = {}
    for alpha, c in rest.terms():
        wd = weighted_degree(alpha, m)
        if wd < 1:
            return None
        if wd == 1:
            principal[alpha] = -c
    if not principal:
        return None
    return PowerSeries(rest.dim, rest.order, principal)


def classify_expansion(gamma: PowerSeries, m_max: int = None, exponent=None,
                       xi0: FrequencyPoint = None, value: complex = 1.0,
                       pd_tol: float = None, rng: np.random.Generator = None) -> ExpansionReport:
    """
    Split Gamma = i alpha.xi - P + Upsilon with P semi-elliptic for the weights m
    of smallest mu, m in {1..m_max}^d. The returned report has no lambda yet.
    """
    m_max = Config.M_MAX if m_max is None else m_max
    pd_tol = Config.PD_TOL if pd_tol is None else pd_tol
    d, order = gamma.dim, gamma.order
    xi0 = xi0 if xi0 is not None else FrequencyPoint((0.0,) * d)
    value = complex(value)

    if order < 2 * m_max:
        logger.warning("Gamma truncated at order %d < 2*m_max=%d; weights capped at %d",
                       order, 2 * m_max, max(order // 2, 1))
        m_max = max(order // 2, 1)

    units = [tuple(1 if k == j else 0 for k in range(d)) for j in range(d)]
    linear = [gamma[e] for e in units]
    if any(abs(c.real) > COEFF_SNAP for c in linear):
        return unclassified(xi0, value, "first-order term not purely imaginary", order)
    drift = tuple(float(c.imag) for c in linear)

    rest = gamma.filter(lambda a, c: sum(a) >= 2 and abs(c) > COEFF_SNAP)

    for m in _candidate_weights(d, m_max):
        P = _split_by_weight(rest, m)
        if P is None:
            continue
        pd = positive_definite_minimum(P.real_part(), m, rng=rng)
        if pd <= pd_tol:
            logger.debug("m=%s rejected: Re P minimum %.3e on the weighted sphere", m, pd)
            continue
        structure = SemiEllipticStructure(m=m, A=np.eye(d), PA=P, pd_minimum=pd)
        return _report(xi0, value, drift, P, rest, structure, order)

    if exponent is not None:
        return _classify_with_exponent(rest, _as_exponent(exponent), xi0, value, drift, order, pd_tol, rng)
    return unclassified(xi0, value, "no semi-elliptic principal part up to m_max", order)


def _classify_with_exponent(rest, E, xi0, value, drift, order, pd_tol, rng) -> ExpansionReport:
    """Principal part read off in the eigen-coordinates of a caller-supplied exponent."""
    try:
        m, A = eigen_weights(E)
    except (UnsupportedExponentError, NotPositiveHomogeneousError) as e:
        return unclassified(xi0, value, str(e), order)
    rest_A = rest.compose_linear(A).filter(lambda a, c: abs(c) > COEFF_SNAP)
    PA = _split_by_weight(rest_A, m)
    if PA is None:
        return unclassified(xi0, value, f"no semi-elliptic principal part for the exponent weights m={m}", order)
    P = PA.compose_linear(np.linalg.inv(A)).filter(lambda a, c: abs(c) > COEFF_SNAP)
    try:
        structure = semi_elliptic_normalize(P, E, pd_tol=pd_tol, rng=rng)
    except (ClassificationError, NotPositiveHomogeneousError) as e:
        return unclassified(xi0, value, str(e), order)
    return _report(xi0, value, drift, P, rest, structure, order)


def _report(xi0, value, drift, P, rest, structure, order) -> ExpansionReport:
    upsilon = (rest + P).filter(lambda a, c: abs(c) > COEFF_SNAP)
    logger.info("xi0=%s: positive-homogeneous type, m=%s, mu=%s, drift=%s",
                tuple(round(c / math.pi, 6) for c in xi0.coords), structure.m, structure.mu, drift)
    return ExpansionReport(
        xi0=xi0, value=value, status=POSITIVE_HOMOGENEOUS, drift=drift,
        P=P, R=P.real_part(), upsilon=upsilon, structure=structure,
        certified_to_order=order)


def upsilon_in_structure(report: ExpansionReport) -> PowerSeries:
    """Upsilon_A(xi) = Upsilon(A xi)."""
    if report.structure.is_identity:
        return report.upsilon
    return report.upsilon.compose_linear(report.structure.A_array()).filter(lambda a, c: abs(c) > COEFF_SNAP)


def lambda_of_upsilon(upsilon_A: PowerSeries, m: Sequence[int]) -> CorrectionExponent:
    """
    lambda = min{|beta:2m| : b_beta != 0} - 1, exact. Terms beyond the truncation
    order weigh at least (order+1)/(2 max m); when that bound is the smaller,
    the bound is returned flagged `truncation_limited`.
    """
    degrees = [weighted_degree(a, m) for a, c in upsilon_A.terms() if abs(c) > COEFF_SNAP]
    if any(wd <= 1 for wd in degrees):
        raise ClassificationError(
            f"Remainder has a term of weighted degree {min(degrees)} <= 1 for m={tuple(m)}; "
            f"the principal part was split incorrectly.")
    bound = Fraction(upsilon_A.order + 1, 2 * max(m))
    found = min(degrees, default=None)
    if found is None or found > bound:
        return CorrectionExponent(bound - 1, truncation_limited=True)
    return CorrectionExponent(found - 1)


# ---------------------------- DIAGNOSTICS ---------------------------- #

def _probe_directions(dim: int) -> np.ndarray:
    """Unit axes and all sign patterns of the main diagonals."""
    probes = [np.eye(dim)[j] for j in range(dim)]
    for signs in itertools.product((1.0, -1.0), repeat=dim):
        if signs[0] > 0 and dim > 1:
            probes.append(np.array(signs) / math.sqrt(dim))
    return np.array(probes)


def asymptotic_compare(R: PowerSeries, m: Sequence[int], n_samples: int = 2000,
                       rng: np.random.Generator = None) -> ComparisonResult:
    """
    c_lo <= R(x) / sum_j |x_j|^{2 m_j} <= c_hi for |x| in [1e-3, 1e3].

    Fails when a constant is non-positive, the spread exceeds 1e12, or the
    ratio still drifts at either end of an axis or diagonal ray.
    """
    rng = get_rng(rng)
    m = tuple(int(v) for v in m)

    def ratio(X):
        return np.real(R(X)) / weighted_sphere_norm(X, m)

    X = unit_directions(rng, n_samples, R.dim) * log_uniform(rng, n_samples, 1e-3, 1e3)[:, None]
    values = ratio(X)

    radii = np.geomspace(1e-3, 1e3, 25)
    for u in _probe_directions(R.dim):
        ray = ratio(radii[:, None] * u[None, :])
        values = np.concatenate([values, ray])
        for a, b in ((0, 1), (-2, -1)):
            if ray[a] > 0 and ray[b] > 0:
                slope = abs(math.log(ray[b] / ray[a]) / math.log(radii[b] / radii[a]))
                if slope > COMPARISON_END_SLOPE:
                    raise ComparisonFailure(
                        f"R / sum |x_j|^(2m_j) drifts like |x|^{slope:.3g} along {u.round(4).tolist()} "
                        f"for m={m}: R is not comparable with these weights.")

    c_lo, c_hi = float(values.min()), float(values.max())
    if not c_lo > 0 or c_hi / c_lo > COMPARISON_SPREAD:
        raise ComparisonFailure(f"Comparison constants degenerate for m={m}: c_lo={c_lo:.3e}, c_hi={c_hi:.3e}.")
    return ComparisonResult(c_lo=c_lo, c_hi=c_hi, samples=len(values))


def subhomogeneity_check(upsilon: PowerSeries, R: PowerSeries, E, radii: Sequence[float],
                         samples: int = 1000, rng: np.random.Generator = None) -> SubhomogeneityResult:
    """sup |Upsilon(r^E xi)| / r over the level set R(xi) = 1, for each r."""
    rng = get_rng(rng)
    E = _as_exponent(E)
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise ValueError("Radii must be positive.")

    U = unit_directions(rng, samples, R.dim)
    level = np.real(R(U))
    U = U[level > 0]
    # s^E u with s = 1/R(u) lands on R = 1
    xis = np.array([matrix_power_apply(E, 1.0 / r_u, u) for u, r_u in zip(U, level[level > 0])])

    ratios = []
    for r in radii:
        scaled = matrix_power_apply(E, r, xis)
        ratios.append(float(np.abs(upsilon(scaled)).max() / r) if not upsilon.is_zero else 0.0)
    decreasing = all(b == 0.0 or b <= a * (1 - 1e-6) for a, b in zip(ratios, ratios[1:]))
    return SubhomogeneityResult(radii=tuple(radii), ratios=tuple(ratios), decreasing=decreasing)
