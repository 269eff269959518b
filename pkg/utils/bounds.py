"""
Executable checks of the generalized Gaussian bound and the local limit theorem:
envelope evaluation, fitting of the shared constant C over a grid of M,
local-limit error grids and their decay rate in n.
"""

import logging
import math
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from config import Config
from models.bounds import EnvelopeSpec, FarFieldRecord, FitResult
from models.lattice import BoxDomain, LatticeFunction
from models.quadrature import AttractorTerm
from utils.attractor import attractor_grid
from utils.lattice import conv_power, conv_power_sequence, power_on_window, support_radius

logger = logging.getLogger(__name__)

UNDERFLOW = 1e-300


# ---------------------------- ENVELOPES ---------------------------- #

def _term_factors(spec: EnvelopeSpec, n: int, X: np.ndarray) -> List[Tuple[float, np.ndarray]]:
    """Per term: n^{-exponent} and R^#((x - n alpha) / n), both independent of C and M."""
    out = []
    for term in spec.terms:
        scaled = (X - n * np.asarray(term.drift)) / n
        out.append((float(n) ** (-term.exponent(spec.use_lambda)), np.asarray(term.rate(scaled), dtype=float)))
    return out


def envelope_eval(spec: EnvelopeSpec, n: int, x) -> Union[float, np.ndarray]:
    """sum_k (C_k / n^{mu_k (+ lam_k)}) exp(-n M_k R_k^#((x - n alpha_k) / n))."""
    n = int(n)
    if n < 1:
        raise ValueError("Envelopes are defined for n >= 1.")
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    total = np.zeros(X.shape[0])
    for term, (power, rate) in zip(spec.terms, _term_factors(spec, n, X)):
        total += term.C * power * np.exp(-n * term.M * rate)
    return float(total[0]) if single else total


def regression(n_values: Sequence[int], values: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope of log(value) against log(n) and its standard error."""
    pairs = [(n, v) for n, v in zip(n_values, values) if np.isfinite(v) and v > 0]
    if len(pairs) < 4:
        return math.nan, math.nan
    ns, vs = zip(*pairs)
    fit = stats.linregress(np.log(ns), np.log(vs))
    return float(fit.slope), float(fit.stderr)


# ---------------------------- FITTING ---------------------------- #

def gaussian_data(f: LatticeFunction, n_values: Iterable[int]) -> Dict[int, LatticeFunction]:
    """phi^(n) for each n by the exact recursion phi^(n) = phi^(n-1) * phi."""
    return dict(conv_power_sequence(f, n_values))


def fit_constant(data: Mapping[int, LatticeFunction], spec: EnvelopeSpec,
                 M_grid: Sequence[float] = None) -> List[FitResult]:
    """
    For each M: minimal_C(n) = max over supp(data_n) of |data_n(x)| / envelope(C=1, M)(x).
    Points where every envelope term underflows are excluded and reported.
    """
    M_grid = Config.M_GRID if M_grid is None else M_grid
    ns = sorted(data)
    if not ns:
        raise ValueError("fit_constant needs data for at least one n.")
    minimal = {M: [] for M in M_grid}
    excluded = {M: [] for M in M_grid}

    for n in ns:
        f = data[n]
        if f.is_empty:
            raise ValueError(f"No data for n={n}.")
        X = f.support_points().astype(float)
        mags = np.abs(f.support_values())
        factors = _term_factors(spec, n, X)
        for M in M_grid:
            env = np.zeros(len(X))
            for power, rate in factors:
                env += power * np.exp(-n * M * rate)
            ok = env >= UNDERFLOW
            excluded[M].append(int((~ok).sum()))
            minimal[M].append(float((mags[ok] / env[ok]).max()) if ok.any() else math.nan)

    results = []
    for M in M_grid:
        slope, stderr = regression(ns, minimal[M])
        if any(excluded[M]):
            logger.warning("M=%.2f: %d support points excluded (envelope underflow)", M, sum(excluded[M]))
        results.append(FitResult(statistic='minimal_C', n_values=tuple(ns), values=tuple(minimal[M]),
                                 slope=slope, slope_stderr=stderr, M=float(M), excluded=tuple(excluded[M])))
        logger.info("M=%.2f: sup_C=%.4g over n=%d..%d", M, results[-1].sup_C, ns[0], ns[-1])
    return results


# ---------------------------- LOCAL LIMIT ERROR ---------------------------- #

def centered_window(terms: Sequence[AttractorTerm], n: int, halfwidth: int, dim: int) -> BoxDomain:
    """Bounding box of the attractor centers round(n alpha_k), widened by `halfwidth`."""
    centers = np.array([[round(n * a) for a in t.drift] for t in terms]) if terms else np.zeros((1, dim), dtype=int)
    return BoxDomain(tuple(int(v) - halfwidth for v in centers.min(axis=0)),
                     tuple(int(v) + halfwidth for v in centers.max(axis=0)))


def llt_error_grid(f: LatticeFunction, terms: Sequence[AttractorTerm], n: int,
                   window: BoxDomain = None, method: str = 'auto', target_eps: float = None) -> np.ndarray:
    """|phi^(n)(x) - A^n(x)| on every point of `window`."""
    window = window or BoxDomain.cube(Config.WINDOW[0], Config.WINDOW[1], f.dim)
    values = power_on_window(f, n, window, method=method)
    if terms:
        values = values - attractor_grid(terms, n, window, target_eps=target_eps)
    return np.abs(values)


def llt_error_function(f: LatticeFunction, terms: Sequence[AttractorTerm], n: int,
                       window: BoxDomain = None, method: str = 'auto', target_eps: float = None) -> LatticeFunction:
    """The error grid as a lattice function, ready for fit_constant."""
    window = window or BoxDomain.cube(Config.WINDOW[0], Config.WINDOW[1], f.dim)
    return LatticeFunction(llt_error_grid(f, terms, n, window, method, target_eps), window.lo)


def sup_statistic(data: Mapping[int, LatticeFunction], statistic: str = 'sup_error',
                  regression_window: Tuple[int, int] = None) -> FitResult:
    """max_x |data_n(x)| per n with its log-log slope over the regression window."""
    ns = sorted(data)
    if not ns:
        raise ValueError("sup_statistic needs at least one value of n.")
    lo, hi = regression_window or (ns[0], ns[-1])
    sups = [data[n].max_abs for n in ns]
    used = [(n, s) for n, s in zip(ns, sups) if lo <= n <= hi]
    slope, stderr = regression([n for n, _ in used], [s for _, s in used])
    excluded = tuple(n for n, s in zip(ns, sups) if not s > 0)
    return FitResult(statistic=statistic, n_values=tuple(ns), values=tuple(sups),
                     slope=slope, slope_stderr=stderr, excluded=excluded, window=(lo, hi))


def llt_error_data(f: LatticeFunction, terms: Sequence[AttractorTerm], n_list: Iterable[int],
                   halfwidth: int = None, window: BoxDomain = None,
                   method: str = 'auto', target_eps: float = None) -> Dict[int, LatticeFunction]:
    """
    Error functions per n over `window`, or by default over the attractor
    centers widened by `halfwidth` and clipped to supp(phi^(n)).
    """
    halfwidth = Config.WINDOW[1] if halfwidth is None else int(halfwidth)
    out = {}
    for n in sorted(int(n) for n in n_list):
        box = window
        if box is None:
            support = BoxDomain(tuple(n * a for a in f.box.lo), tuple(n * b for b in f.box.hi))
            box = centered_window(terms, n, halfwidth, f.dim).intersect(support) or support
        out[n] = llt_error_function(f, terms, n, box, method, target_eps)
        logger.info("n=%d: sup error %.4e over %s..%s", n, out[n].max_abs, box.lo, box.hi)
    return out


def decay_slope(f: LatticeFunction, terms: Sequence[AttractorTerm], n_list: Sequence[int],
                halfwidth: int = None, statistic: str = 'sup_error', method: str = 'auto',
                regression_window: Tuple[int, int] = None, target_eps: float = None) -> FitResult:
    """
    Slope of log sup_x |phi^(n)(x) - A^n(x)| against log n. With no terms this
    is the on-diagonal decay of |phi^(n)| itself.
    """
    if statistic != 'sup_error':
        raise ValueError(f"Unknown statistic '{statistic}'.")
    if len(set(n_list)) < 4:
        raise ValueError("decay_slope needs at least 4 values of n.")
    data = llt_error_data(f, terms, n_list, halfwidth=halfwidth, method=method, target_eps=target_eps)
    return sup_statistic(data, statistic, regression_window)


# ---------------------------- FAR FIELD ---------------------------- #

def far_field_check(f: LatticeFunction, n: int, power: LatticeFunction = None,
                    method: str = 'auto') -> FarFieldRecord:
    """Record L = support radius and confirm supp(phi^(n)) lies in |x|_inf <= n L."""
    L = support_radius(f)
    power = conv_power(f, n, method=method) if power is None else power
    if power.is_empty:
        return FarFieldRecord(n=int(n), L=L, support_lo=(0,) * f.dim, support_hi=(0,) * f.dim, holds=True)
    box = power.box
    holds = all(abs(v) <= n * L for v in box.lo + box.hi)
    return FarFieldRecord(n=int(n), L=L, support_lo=box.lo, support_hi=box.hi, holds=holds)
