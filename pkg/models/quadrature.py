from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from config import Config
from models.series import PowerSeries
from models.spectral import FrequencyPoint


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation box prod_j [-L_j, L_j] and Gauss-Legendre node counts N_j."""
    halfwidths: Tuple[float, ...]
    nodes: Tuple[int, ...]
    target_eps: float = Config.TARGET_EPS

    def __post_init__(self):
        object.__setattr__(self, 'halfwidths', tuple(float(v) for v in self.halfwidths))
        object.__setattr__(self, 'nodes', tuple(int(v) for v in self.nodes))
        if len(self.halfwidths) != len(self.nodes):
            raise ValueError("QuadratureSpec needs one halfwidth and one node count per axis.")
        if any(not L > 0 for L in self.halfwidths):
            raise ValueError(f"Halfwidths must be positive, got {self.halfwidths}.")
        if any(n < 16 or n % 2 for n in self.nodes):
            raise ValueError(f"Node counts must be even and at least 16, got {self.nodes}.")
        if not 0 < self.target_eps < 1:
            raise ValueError("target_eps must lie in (0, 1).")

    @property
    def dim(self) -> int:
        return len(self.nodes)

    @property
    def total_nodes(self) -> int:
        return int(np.prod(self.nodes))

    def doubled(self) -> 'QuadratureSpec':
        return QuadratureSpec(self.halfwidths, tuple(2 * n for n in self.nodes), self.target_eps)

    def to_dict(self) -> Dict:
        return {'halfwidths': list(self.halfwidths), 'nodes': list(self.nodes), 'target_eps': self.target_eps}


@dataclass(frozen=True)
class AttractorTerm:
    """One maximizer's contribution e^{-i x.xi_k} value_k^n H_{P_k}^n(x - n alpha_k)."""
    xi: FrequencyPoint
    value: complex
    drift: Tuple[float, ...]
    P: PowerSeries

    def __post_init__(self):
        object.__setattr__(self, 'value', complex(self.value))
        object.__setattr__(self, 'drift', tuple(float(a) for a in self.drift))
        if abs(abs(self.value) - 1.0) > 1e-9:
            raise ValueError(f"Attractor term needs |phi_hat(xi_k)| = 1, got {abs(self.value):.12g}.")
        if len(self.drift) != self.xi.dim or self.P.dim != self.xi.dim:
            raise ValueError("Attractor term components disagree on the dimension.")

    def to_dict(self) -> Dict:
        return {
            'xi': self.xi.to_dict(),
            'value': {'re': self.value.real, 'im': self.value.imag},
            'drift': list(self.drift),
            'P': self.P.to_dict(),
        }
