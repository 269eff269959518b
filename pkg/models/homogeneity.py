"""
Domain types for positive-homogeneous polynomials and the classification of
maximizers: exponent matrices, semi-elliptic structures and expansion reports.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.series import PowerSeries
from models.spectral import FrequencyPoint

POSITIVE_HOMOGENEOUS = 'PositiveHomogeneousType'
UNCLASSIFIED = 'Unclassified'


def fraction_dict(q: Optional[Fraction]) -> Optional[Dict]:
    """Rational value as {"exact": "p/q", "value": float}."""
    if q is None:
        return None
    return {'exact': f"{q.numerator}/{q.denominator}", 'value': float(q)}


def _matrix_tuple(mat) -> Tuple[Tuple[float, ...], ...]:
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"Exponent matrix must be square, got shape {arr.shape}.")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Exponent matrix entries must be finite.")
    return tuple(tuple(float(v) for v in row) for row in arr)


# ---------------------------- EXPONENT MATRIX ---------------------------- #

@dataclass(frozen=True)
class ExponentMatrix:
    """A d x d real matrix E, optionally tagged with its verified homogeneity residual."""
    mat: Tuple[Tuple[float, ...], ...]
    verified_residual: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'mat', _matrix_tuple(self.mat))

    @classmethod
    def diagonal(cls, entries: Sequence[float]) -> 'ExponentMatrix':
        return cls(np.diag(np.asarray(entries, dtype=float)))

    @classmethod
    def from_weights(cls, m: Sequence[int]) -> 'ExponentMatrix':
        """D = diag(1/2m_1, ..., 1/2m_d)."""
        return cls.diagonal([1.0 / (2 * mj) for mj in m])

    @classmethod
    def parse(cls, text: str) -> 'ExponentMatrix':
        """
        Parse "a,b;c,d" (rows separated by ';'). Entries may be decimals or
        fractions such as 3/8.
        """
        try:
            rows = [[float(Fraction(v.strip())) for v in row.split(',')] for row in text.strip().split(';')]
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid exponent matrix '{text}': {e}")
        if any(len(r) != len(rows) for r in rows):
            raise ValueError(f"Exponent matrix '{text}' is not square.")
        return cls(rows)

    @property
    def dim(self) -> int:
        return len(self.mat)

    def as_array(self) -> np.ndarray:
        return np.array(self.mat, dtype=float)

    @property
    def trace(self) -> float:
        return float(np.trace(self.as_array()))

    @property
    def is_diagonal(self) -> bool:
        arr = self.as_array()
        return bool(np.all(arr == np.diag(np.diag(arr))))

    def transpose(self) -> 'ExponentMatrix':
        return ExponentMatrix(self.as_array().T)

    def complement(self) -> 'ExponentMatrix':
        """(I - E)^T, the exponent of the Legendre-Fenchel transform."""
        return ExponentMatrix((np.eye(self.dim) - self.as_array()).T)

    def verified(self, residual: float) -> 'ExponentMatrix':
        return ExponentMatrix(self.mat, verified_residual=float(residual))

    def to_dict(self) -> Dict:
        return {'mat': [list(r) for r in self.mat], 'verified_residual': self.verified_residual}


# ---------------------------- RESULTS ---------------------------- #

@dataclass(frozen=True)
class VerificationResult:
    holds: bool
    max_residual: float
    samples: int

    def __bool__(self):
        return self.holds

    def to_dict(self) -> Dict:
        return {'holds': self.holds, 'max_residual': self.max_residual, 'samples': self.samples}


@dataclass(frozen=True)
class ComparisonResult:
    """Empirical constants with c_lo <= R(x) / sum_j |x_j|^{2 m_j} <= c_hi."""
    c_lo: float
    c_hi: float
    samples: int

    def to_dict(self) -> Dict:
        return {'c_lo': self.c_lo, 'c_hi': self.c_hi, 'samples': self.samples}


@dataclass(frozen=True)
class SubhomogeneityResult:
    radii: Tuple[float, ...]
    ratios: Tuple[float, ...]
    decreasing: bool

    def to_dict(self) -> Dict:
        return {'radii': list(self.radii), 'ratios': list(self.ratios), 'decreasing': self.decreasing}


@dataclass(frozen=True)
class CorrectionExponent:
    """lambda, exact; `truncation_limited` when the remainder vanished at the truncation order."""
    value: Fraction
    truncation_limited: bool = False

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> Dict:
        return {**fraction_dict(self.value), 'truncation_limited': self.truncation_limited}


# ---------------------------- STRUCTURE ---------------------------- #

@dataclass(frozen=True)
class SemiEllipticStructure:
    """
    Weights m, change of variables A and the semi-elliptic polynomial
    P_A(xi) = P(A xi). Every term of P_A has weighted degree |alpha:2m| = 1.
    """
    m: Tuple[int, ...]
    A: Tuple[Tuple[float, ...], ...]
    PA: PowerSeries
    pd_minimum: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'm', tuple(int(v) for v in self.m))
        object.__setattr__(self, 'A', _matrix_tuple(self.A))

    @property
    def dim(self) -> int:
        return len(self.m)

    @property
    def D(self) -> ExponentMatrix:
        return ExponentMatrix.from_weights(self.m)

    @property
    def mu(self) -> Fraction:
        """Homogeneous order sum_j 1/(2 m_j) = tr D."""
        return sum((Fraction(1, 2 * mj) for mj in self.m), Fraction(0))

    @property
    def lcm(self) -> int:
        return math.lcm(*self.m)

    @property
    def is_identity(self) -> bool:
        return bool(np.allclose(self.A_array(), np.eye(self.dim), atol=0.0))

    def A_array(self) -> np.ndarray:
        return np.array(self.A, dtype=float)

    def exponent(self) -> ExponentMatrix:
        """E = A D A^{-1}, an exponent of the original (uncomposed) polynomial."""
        A = self.A_array()
        return ExponentMatrix(A @ self.D.as_array() @ np.linalg.inv(A))

    def to_dict(self) -> Dict:
        return {
            'm': list(self.m),
            'A': [list(r) for r in self.A],
            'D': [1.0 / (2 * mj) for mj in self.m],
            'mu': fraction_dict(self.mu),
            'PA': self.PA.to_dict(),
            'pd_minimum': self.pd_minimum,
        }


# ---------------------------- EXPANSION REPORT ---------------------------- #

@dataclass(frozen=True)
class ExpansionReport:
    """
    Classification of one maximizer xi0:
      Gamma(xi) = i alpha.xi - P(xi) + Upsilon(xi) through `certified_to_order`.
    Fields after `status` are filled only for PositiveHomogeneousType points.
    """
    xi0: FrequencyPoint
    value: complex
    status: str
    reason: str = ''
    drift: Tuple[float, ...] = ()
    P: Optional[PowerSeries] = None
    R: Optional[PowerSeries] = None
    upsilon: Optional[PowerSeries] = None
    structure: Optional[SemiEllipticStructure] = None
    lam: Optional[CorrectionExponent] = None
    certified_to_order: int = 0
    extras: Dict = field(default_factory=dict, compare=False)

    @property
    def is_classified(self) -> bool:
        return self.status == POSITIVE_HOMOGENEOUS

    @property
    def m(self) -> Optional[Tuple[int, ...]]:
        return self.structure.m if self.structure else None

    @property
    def mu(self) -> Optional[Fraction]:
        return self.structure.mu if self.structure else None

    @property
    def lcm_lower_bound(self) -> Optional[Fraction]:
        return Fraction(1, 2 * self.structure.lcm) if self.structure else None

    def with_lambda(self, lam: CorrectionExponent, **extras) -> 'ExpansionReport':
        return ExpansionReport(
            xi0=self.xi0, value=self.value, status=self.status, reason=self.reason,
            drift=self.drift, P=self.P, R=self.R, upsilon=self.upsilon,
            structure=self.structure, lam=lam, certified_to_order=self.certified_to_order,
            extras={**self.extras, **extras})

    def to_dict(self) -> Dict:
        out = {
            'xi0': self.xi0.to_dict(),
            'value': {'re': self.value.real, 'im': self.value.imag},
            'status': self.status,
            'certified_to_order': self.certified_to_order,
        }
        if not self.is_classified:
            out['reason'] = self.reason
            return out
        out.update({
            'drift': list(self.drift),
            'm': list(self.m),
            'mu': fraction_dict(self.mu),
            'lambda': self.lam.to_dict() if self.lam else None,
            'lambda_lower_bound': fraction_dict(self.lcm_lower_bound),
            'P': self.P.to_dict(),
            'R': self.R.to_dict(),
            'upsilon': self.upsilon.to_dict(),
            'structure': self.structure.to_dict(),
        })
        out.update(self.extras)
        return out


def unclassified(xi0: FrequencyPoint, value: complex, reason: str, order: int) -> ExpansionReport:
    return ExpansionReport(xi0=xi0, value=value, status=UNCLASSIFIED, reason=reason,
                           certified_to_order=order)


def classified_points(reports: List[ExpansionReport]) -> List[ExpansionReport]:
    return [r for r in reports if r.is_classified]
