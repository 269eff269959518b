"""Frequency-side data: torus points and maximizer sets."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np


def canonical_angle(c: float) -> float:
    """Representative of c modulo 2*pi in (-pi, pi]."""
    r = math.pi - math.fmod(math.pi - float(c), 2 * math.pi)
    if r <= -math.pi:
        r += 2 * math.pi
    elif r > math.pi:
        r -= 2 * math.pi
    return r


def torus_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance on T^d = R^d / (2 pi Z)^d."""
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % (2 * math.pi)
    diff = np.minimum(diff, 2 * math.pi - diff)
    return float(np.sqrt((diff ** 2).sum()))


@dataclass(frozen=True)
class FrequencyPoint:
    """A point of T^d = (-pi, pi]^d, canonicalized on construction."""
    coords: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', tuple(canonical_angle(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def distance(self, other: 'FrequencyPoint') -> float:
        return torus_distance(self.coords, other.coords)

    def to_dict(self) -> Dict:
        return {'coords': list(self.coords), 'coords_over_pi': [c / math.pi for c in self.coords]}


@dataclass(frozen=True)
class MaximizerSet:
    """Omega(phi) = {xi : |phi_hat(xi)| = 1}, with phi_hat values."""
    points: Tuple[FrequencyPoint, ...]
    values: Tuple[complex, ...]
    tol: float
    merge_radius: float = 1e-4
    grid_per_axis: int = 0
    extras: Dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.values))

    def to_dict(self) -> Dict:
        return {
            'tol': self.tol,
            'merge_radius': self.merge_radius,
            'grid_per_axis': self.grid_per_axis,
            'points': [
                {**p.to_dict(), 'value': {'re': v.real, 'im': v.imag}, 'abs': abs(v)}
                for p, v in zip(self.points, self.values)
            ]
        }

    def coordinates(self) -> List[Tuple[float, ...]]:
        return [p.coords for p in self.points]
