"""
Envelopes of the generalized Gaussian bounds and local limit theorems, and
the results of fitting their free constants against computed data.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from config import Config

Rate = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EnvelopeTerm:
    """(C / n^{mu (+ lam)}) exp(-n M R^#((x - n alpha) / n)) for one maximizer."""
    mu: float
    lam: float
    drift: Tuple[float, ...]
    rate: Rate = field(compare=False)
    C: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'drift', tuple(float(a) for a in self.drift))
        if not (self.C > 0 and self.M > 0):
            raise ValueError(f"Envelope constants must be positive, got C={self.C}, M={self.M}.")
        if not self.mu > 0 or self.lam < 0:
            raise ValueError(f"Envelope needs mu > 0 and lambda >= 0, got mu={self.mu}, lambda={self.lam}.")

    def exponent(self, use_lambda: bool) -> float:
        return self.mu + self.lam if use_lambda else self.mu


@dataclass(frozen=True)
class EnvelopeSpec:
    terms: Tuple[EnvelopeTerm, ...]
    use_lambda: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(self.terms))
        if not self.terms:
            raise ValueError("An envelope needs at least one term.")

    @property
    def dim(self) -> int:
        return len(self.terms[0].drift)

    def with_constants(self, C: float = None, M: float = None) -> 'EnvelopeSpec':
        """Same envelope with a shared C and/or M on every term."""
        terms = tuple(replace(t, C=t.C if C is None else C, M=t.M if M is None else M) for t in self.terms)
        return EnvelopeSpec(terms, self.use_lambda)

    def with_drift_shift(self, shift: Sequence[float]) -> 'EnvelopeSpec':
        terms = tuple(replace(t, drift=tuple(a + s for a, s in zip(t.drift, shift))) for t in self.terms)
        return EnvelopeSpec(terms, self.use_lambda)

    def to_dict(self) -> Dict:
        return {
            'use_lambda': self.use_lambda,
            'terms': [{'mu': t.mu, 'lambda': t.lam, 'drift': list(t.drift), 'C': t.C, 'M': t.M}
                      for t in self.terms],
        }


def trend_is_bounded(values: Sequence[float], ratio: float = Config.BOUNDED_TREND_RATIO) -> bool:
    """Last-quartile max within `ratio` of the max over the earlier values."""
    vals = [v for v in values if np.isfinite(v)]
    if len(vals) < 4:
        return False
    q = max(1, len(vals) // 4)
    return max(vals[-q:]) <= ratio * max(vals[:-q])


def trend_is_unbounded(values: Sequence[float], ratio: float = Config.UNBOUNDED_TREND_RATIO) -> bool:
    """Last-quartile max at least `ratio` times the first-quartile max."""
    vals = list(values)
    if len(vals) < 4:
        return False
    q = max(1, len(vals) // 4)
    last = max(vals[-q:])
    return not np.isfinite(last) or last >= ratio * max(vals[:q])


@dataclass(frozen=True)
class FitResult:
    """
    Per-n statistic with its regression on log n.
      • statistic 'minimal_C': smallest C making the envelope dominate the data at n;
      • statistic 'sup_error': sup of the local-limit error over the window at n.
    """
    statistic: str
    n_values: Tuple[int, ...]
    values: Tuple[float, ...]
    slope: float
    slope_stderr: float
    M: Optional[float] = None
    excluded: Tuple[int, ...] = ()
    window: Optional[Tuple[int, int]] = None

    @property
    def sup_value(self) -> float:
        finite = [v for v in self.values if np.isfinite(v)]
        return max(finite) if len(finite) == len(self.values) and finite else math.inf

    @property
    def minimal_C_per_n(self) -> Tuple[float, ...]:
        return self.values

    @property
    def sup_C(self) -> float:
        return self.sup_value

    @property
    def bounded(self) -> bool:
        return trend_is_bounded(self.values)

    @property
    def unbounded(self) -> bool:
        return trend_is_unbounded(self.values)

    def to_dict(self) -> Dict:
        def num(v):
            return v if np.isfinite(v) else None
        out = {
            'n_values': list(self.n_values),
            self.statistic: [num(v) for v in self.values],
            'sup_C' if self.statistic == 'minimal_C' else f"max_{self.statistic}": num(self.sup_value),
            'slope': num(self.slope),
            'slope_stderr': num(self.slope_stderr),
            'bounded': self.bounded,
            'unbounded': self.unbounded,
            'excluded_points': list(self.excluded),
        }
        if self.M is not None:
            out = {'M': self.M, **out}
        if self.window is not None:
            out['regression_window'] = list(self.window)
        return out


@dataclass(frozen=True)
class FarFieldRecord:
    """L = support radius of phi; phi^(n) vanishes for |x|_inf > n L."""
    n: int
    L: int
    support_lo: Tuple[int, ...]
    support_hi: Tuple[int, ...]
    holds: bool

    def to_dict(self) -> Dict:
        return {'n': self.n, 'L': self.L, 'support_lo': list(self.support_lo),
                'support_hi': list(self.support_hi), 'holds': self.holds}
