"""
Full analysis pipeline: normalize phi, locate Omega(phi), classify every
maximizer and assemble the attractor terms and envelopes the commands need.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from config import Config
from models.bounds import EnvelopeSpec, EnvelopeTerm
from models.homogeneity import ExpansionReport, ExponentMatrix, classified_points
from models.lattice import LatticeFunction
from models.quadrature import AttractorTerm
from models.spectral import MaximizerSet
from utils.errors import ClassificationError
from utils.homogeneity import classify_expansion, lambda_of_upsilon, lcm_lower_bound, upsilon_in_structure
from utils.legendre import conjugate_evaluator, diagonal_coefficients, is_pure_power
from utils.spectral import find_maximizers, gamma_series, sup_abs_charfn

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-6


@dataclass
class AnalysisResult:
    """Everything the commands report about one input function."""
    function: LatticeFunction
    normalization: float
    maximizers: MaximizerSet
    reports: List[ExpansionReport]
    order: int
    m_max: int
    seed: Optional[int] = None
    source: str = ''
    extras: Dict = field(default_factory=dict)

    @property
    def classified(self) -> bool:
        return all(r.is_classified for r in self.reports)

    @property
    def verdict(self) -> str:
        if self.classified:
            return 'every maximizer is of positive-homogeneous type'
        bad = [r for r in self.reports if not r.is_classified]
        return f"{len(bad)} of {len(self.reports)} maximizers unclassified: " + '; '.join(r.reason for r in bad)

    def to_dict(self) -> Dict:
        return {
            'source': self.source,
            'seed': self.seed,
            'dim': self.function.dim,
            'normalization': self.normalization,
            'expansion_order': self.order,
            'm_max': self.m_max,
            'maximizers': self.maximizers.to_dict(),
            'reports': [r.to_dict() for r in self.reports],
            'classified': self.classified,
            'verdict': self.verdict,
        }


def normalize(f: LatticeFunction, tol: float = NORMALIZATION_TOL):
    """(phi / s, s) with s = sup |phi_hat|; phi itself when s = 1 to roundoff."""
    s = sup_abs_charfn(f)
    if abs(s - 1.0) <= 1e-12:
        return f, 1.0
    if abs(s - 1.0) > tol:
        logger.warning("sup |phi_hat| = %.12g; dividing phi by this scalar", s)
    return f.scaled(1.0 / s), float(s)


def closed_form_rate(R) -> Optional[List[Dict]]:
    """R^#(x) = sum_j K_j |x_j|^{p_j} for pure-power R, else None."""
    if not is_pure_power(R):
        return None
    out = []
    for c, m in diagonal_coefficients(R):
        p = 2 * m / (2 * m - 1)
        out.append({'c': c, 'm': m, 'K': (2 * m - 1) * c / (2 * m * c) ** p, 'power': p})
    return out


def complete_report(report: ExpansionReport) -> ExpansionReport:
    """Attach lambda, its a-priori bound check and the closed-form R^# if any."""
    if not report.is_classified:
        return report
    lam = lambda_of_upsilon(upsilon_in_structure(report), report.m)
    if lam.value < lcm_lower_bound(report.m):
        raise ClassificationError(
            f"lambda={lam.value} at xi0={report.xi0.coords} is below 1/(2 lcm(m)) = {lcm_lower_bound(report.m)}.")
    return report.with_lambda(lam, R_sharp_closed_form=closed_form_rate(report.R))


def analyze_function(f: LatticeFunction, order: int = None, m_max: int = None,
                     exponent: ExponentMatrix = None, grid_per_axis: int = None,
                     rng: np.random.Generator = None, source: str = '', seed: int = None) -> AnalysisResult:
    order = Config.EXPANSION_ORDER if order is None else order
    m_max = Config.M_MAX if m_max is None else m_max

    f, scalar = normalize(f)
    maximizers = find_maximizers(f, grid_per_axis=grid_per_axis)
    reports = []
    for point, value in maximizers:
        gamma = gamma_series(f, point, order)
        report = classify_expansion(gamma, m_max=m_max, exponent=exponent, xi0=point, value=value, rng=rng)
        reports.append(complete_report(report))
        if not report.is_classified:
            logger.warning("xi0=%s unclassified: %s", point.coords, report.reason)
    result = AnalysisResult(function=f, normalization=scalar, maximizers=maximizers, reports=reports,
                            order=order, m_max=m_max, seed=seed, source=source)
    logger.info("Analysis of %s: %s", source or 'input', result.verdict)
    return result


# ---------------------------- DOWNSTREAM DATA ---------------------------- #

def attractor_terms(result: AnalysisResult) -> List[AttractorTerm]:
    return [AttractorTerm(xi=r.xi0, value=r.value, drift=r.drift, P=r.P)
            for r in classified_points(result.reports)]


def envelope_spec(result: AnalysisResult, use_lambda: bool, C: float = 1.0, M: float = 1.0,
                  drift_shift: Sequence[float] = None) -> EnvelopeSpec:
    """One envelope term per maximizer, R_k^# from the native real part R_k."""
    terms = []
    for r in result.reports:
        if not r.is_classified:
            raise ClassificationError(f"Cannot build an envelope: xi0={r.xi0.coords} is unclassified.")
        terms.append(EnvelopeTerm(mu=float(r.mu), lam=float(r.lam.value), drift=r.drift,
                                  rate=conjugate_evaluator(r.R),
                                  C=C, M=M))
    spec = EnvelopeSpec(tuple(terms), use_lambda=use_lambda)
    if drift_shift is not None:
        spec = spec.with_drift_shift(drift_shift)
    return spec


def shift_terms(terms: Sequence[AttractorTerm], shift: Sequence[float]) -> List[AttractorTerm]:
    """Attractor terms with every drift moved by `shift` (negative control)."""
    return [AttractorTerm(xi=t.xi, value=t.value, drift=tuple(a + s for a, s in zip(t.drift, shift)), P=t.P)
            for t in terms]


def describe_point(report: ExpansionReport) -> str:
    coords = ', '.join(f"{c / math.pi:.4g}pi" for c in report.xi0.coords)
    if not report.is_classified:
        return f"({coords}): unclassified ({report.reason})"
    return f"({coords}): m={report.m}, mu={report.mu}, lambda={report.lam.value}, drift={tuple(round(a, 10) for a in report.drift)}"
