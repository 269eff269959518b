"""
Finitely supported complex-valued functions on the integer lattice Z^d.

A LatticeFunction stores its values as a dense complex block together with the
lattice coordinates of the block's first cell. The block is always cropped to
the bounding box of the non-zero entries, and entries below the relative prune
threshold are zeroed on construction, so every arithmetic result is pruned.
"""

import json
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from utils.errors import EmptySupportError, LatticeInputError

Point = Tuple[int, ...]

PRUNE_REL = 1e-15


@dataclass(frozen=True)
class BoxDomain:
    """Integer box [lo_1, hi_1] x ... x [lo_d, hi_d] (both ends included)."""
    lo: Tuple[int, ...]
    hi: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lo)
        hi = tuple(int(v) for v in self.hi)
        if not lo or len(lo) != len(hi):
            raise LatticeInputError(f"Box corners must be non-empty and of equal length, got {lo} and {hi}.")
        if any(a > b for a, b in zip(lo, hi)):
            raise LatticeInputError(f"Box requires lo <= hi componentwise, got lo={lo}, hi={hi}.")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @classmethod
    def cube(cls, a: int, b: int, dim: int) -> 'BoxDomain':
        return cls((a,) * dim, (b,) * dim)

    @classmethod
    def parse(cls, text: str, dim: int) -> 'BoxDomain':
        """Parse 'a:b' (same range on every axis) or 'a:b,c:d,...'."""
        parts = [p for p in text.split(',') if p.strip()]
        ranges = []
        for part in parts:
            try:
                a, b = (int(v) for v in part.split(':'))
            except ValueError:
                raise LatticeInputError(f"Window '{text}' must look like a:b or a:b,c:d.")
            ranges.append((a, b))
        if len(ranges) == 1:
            ranges = ranges * dim
        if len(ranges) != dim:
            raise LatticeInputError(f"Window '{text}' has {len(ranges)} ranges for dimension {dim}.")
        return cls(tuple(a for a, _ in ranges), tuple(b for _, b in ranges))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def volume(self) -> int:
        vol = 1
        for s in self.shape:
            vol *= s
        return vol

    def contains(self, x: Sequence[int]) -> bool:
        return all(a <= int(v) <= b for a, v, b in zip(self.lo, x, self.hi))

    def contains_box(self, other: 'BoxDomain') -> bool:
        return self.contains(other.lo) and self.contains(other.hi)

    def intersect(self, other: 'BoxDomain') -> Optional['BoxDomain']:
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        if any(a > b for a, b in zip(lo, hi)):
            return None
        return BoxDomain(lo, hi)

    def axes(self):
        """Per-axis integer coordinate vectors."""
        return [np.arange(a, b + 1) for a, b in zip(self.lo, self.hi)]

    def points(self) -> np.ndarray:
        """All lattice points, shape (volume, d), in C order of `shape`."""
        grids = np.meshgrid(*self.axes(), indexing='ij')
        return np.stack([g.ravel() for g in grids], axis=1)

    def to_dict(self) -> Dict:
        return {'lo': list(self.lo), 'hi': list(self.hi)}


class LatticeFunction:
    """Immutable finitely supported function Z^d -> C."""

    __slots__ = ('_values', '_lo')

    def __init__(self, values, lo: Sequence[int], prune_rel: float = PRUNE_REL):
        arr = np.array(values, dtype=complex)
        lo = tuple(int(v) for v in lo)
        if arr.ndim != len(lo) or arr.ndim == 0:
            raise LatticeInputError(f"Value block of rank {arr.ndim} does not match offset {lo}.")
        if not np.all(np.isfinite(arr)):
            raise LatticeInputError("Lattice values must be finite.")
        arr, lo = _prune_and_crop(arr, lo, prune_rel)
        arr.setflags(write=False)
        self._values = arr
        self._lo = lo

    # ---------------------------- CONSTRUCTORS ---------------------------- #

    @classmethod
    def from_entries(cls, dim: int, entries: Mapping[Sequence[int], complex], prune_rel: float = PRUNE_REL):
        dim = int(dim)
        if dim < 1:
            raise LatticeInputError("Dimension must be a positive integer.")
        keys = [tuple(int(v) for v in k) for k in entries]
        bad = [k for k in keys if len(k) != dim]
        if bad:
            raise LatticeInputError(f"Lattice point {bad[0]} does not have {dim} coordinates.")
        if not keys:
            return cls(np.zeros((0,) * dim), (0,) * dim)
        pts = np.array(keys, dtype=np.int64)
        lo = pts.min(axis=0)
        shape = tuple(pts.max(axis=0) - lo + 1)
        arr = np.zeros(shape, dtype=complex)
        for k, v in zip(keys, entries.values()):
            arr[tuple(np.array(k) - lo)] += complex(v)
        return cls(arr, tuple(lo), prune_rel=prune_rel)

    @classmethod
    def delta(cls, dim: int, at: Optional[Sequence[int]] = None) -> 'LatticeFunction':
        at = tuple(at) if at is not None else (0,) * dim
        return cls(np.ones((1,) * dim), at)

    # ---------------------------- ACCESSORS ---------------------------- #

    @property
    def dim(self) -> int:
        return self._values.ndim

    @property
    def lo(self) -> Tuple[int, ...]:
        return self._lo

    @property
    def values(self) -> np.ndarray:
        """Read-only dense block covering the support box."""
        return self._values

    @property
    def is_empty(self) -> bool:
        return self._values.size == 0

    @property
    def box(self) -> BoxDomain:
        if self.is_empty:
            raise EmptySupportError("The function has empty support.")
        hi = tuple(a + s - 1 for a, s in zip(self._lo, self._values.shape))
        return BoxDomain(self._lo, hi)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self._values))

    def support_points(self) -> np.ndarray:
        """Non-zero lattice points, shape (nnz, d)."""
        idx = np.argwhere(self._values != 0)
        return idx + np.array(self._lo, dtype=np.int64)

    def support_values(self) -> np.ndarray:
        return self._values[self._values != 0]

    @property
    def entries(self) -> Dict[Point, complex]:
        return {tuple(int(v) for v in p): complex(c)
                for p, c in zip(self.support_points(), self.support_values())}

    def __call__(self, x: Sequence[int]) -> complex:
        if self.is_empty:
            return 0j
        idx = tuple(int(v) - a for v, a in zip(x, self._lo))
        if any(i < 0 or i >= s for i, s in zip(idx, self._values.shape)):
            return 0j
        return complex(self._values[idx])

    def values_on(self, box: BoxDomain) -> np.ndarray:
        """Dense values on `box`, zero-padded outside the support."""
        out = np.zeros(box.shape, dtype=complex)
        if self.is_empty:
            return out
        common = self.box.intersect(box)
        if common is None:
            return out
        src = tuple(slice(a - s, b - s + 1) for a, b, s in zip(common.lo, common.hi, self._lo))
        dst = tuple(slice(a - s, b - s + 1) for a, b, s in zip(common.lo, common.hi, box.lo))
        out[dst] = self._values[src]
        return out

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self._values).sum())

    @property
    def total_mass(self) -> complex:
        return complex(self._values.sum())

    @property
    def max_abs(self) -> float:
        return float(np.abs(self._values).max()) if not self.is_empty else 0.0

    # ---------------------------- ARITHMETIC ---------------------------- #

    def scaled(self, c: complex) -> 'LatticeFunction':
        return LatticeFunction(self._values * c, self._lo)

    def __mul__(self, c):
        if isinstance(c, LatticeFunction):
            return NotImplemented
        return self.scaled(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeFunction):
            return NotImplemented
        return (self.dim == other.dim and self._lo == other._lo
                and self._values.shape == other._values.shape
                and bool(np.array_equal(self._values, other._values)))

    __hash__ = None

    def max_abs_difference(self, other: 'LatticeFunction') -> float:
        if self.dim != other.dim:
            raise LatticeInputError(f"Dimension mismatch: {self.dim} vs {other.dim}.")
        boxes = [f.box for f in (self, other) if not f.is_empty]
        if not boxes:
            return 0.0
        lo = tuple(min(b.lo[j] for b in boxes) for j in range(self.dim))
        hi = tuple(max(b.hi[j] for b in boxes) for j in range(self.dim))
        box = BoxDomain(lo, hi)
        return float(np.abs(self.values_on(box) - other.values_on(box)).max())

    def __repr__(self):
        if self.is_empty:
            return f"LatticeFunction(dim={self.dim}, empty)"
        return f"LatticeFunction(dim={self.dim}, box={self.box.lo}..{self.box.hi}, nnz={self.nnz})"

    # ---------------------------- SERIALIZATION ---------------------------- #

    def to_dict(self) -> Dict:
        return {
            'dim': self.dim,
            'entries': [
                {'x': [int(v) for v in p], 're': float(c.real), 'im': float(c.imag)}
                for p, c in zip(self.support_points(), self.support_values())
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'LatticeFunction':
        try:
            dim = int(data['dim'])
            entries = {}
            for e in data['entries']:
                key = tuple(int(v) for v in e['x'])
                entries[key] = entries.get(key, 0j) + complex(float(e.get('re', 0.0)), float(e.get('im', 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise LatticeInputError(f"Malformed lattice function JSON: {exc}") from exc
        return cls.from_entries(dim, entries)

    def to_json(self, path: str):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=4)

    @classmethod
    def from_json(cls, path: str) -> 'LatticeFunction':
        with open(path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as exc:
                raise LatticeInputError(f"{path}: not valid JSON ({exc}).") from exc
        return cls.from_dict(data)

    def to_frame(self, box: Optional[BoxDomain] = None) -> pd.DataFrame:
        """Grid dump with columns x1..xd, re, im, abs."""
        box = box or self.box
        return grid_frame(box, self.values_on(box))


def grid_frame(box: BoxDomain, values: np.ndarray, extra: Optional[Mapping[str, np.ndarray]] = None) -> pd.DataFrame:
    """DataFrame for complex `values` laid out on `box` (C order)."""
    pts = box.points()
    vals = np.asarray(values, dtype=complex).ravel()
    df = pd.DataFrame({f"x{j + 1}": pts[:, j] for j in range(box.dim)})
    df['re'] = vals.real
    df['im'] = vals.imag
    df['abs'] = np.abs(vals)
    for name, col in (extra or {}).items():
        df[name] = np.asarray(col).ravel()
    return df


def _prune_and_crop(arr: np.ndarray, lo: Tuple[int, ...], prune_rel: float):
    if arr.size == 0:
        return np.zeros((0,) * arr.ndim, dtype=complex), (0,) * arr.ndim
    mags = np.abs(arr)
    peak = mags.max()
    if peak == 0:
        return np.zeros((0,) * arr.ndim, dtype=complex), (0,) * arr.ndim
    small = mags < prune_rel * peak
    if small.any():
        arr = arr.copy()
        arr[small] = 0
    nz = np.nonzero(arr)
    first = [int(ix.min()) for ix in nz]
    last = [int(ix.max()) for ix in nz]
    window = tuple(slice(a, b + 1) for a, b in zip(first, last))
    cropped = np.ascontiguousarray(arr[window])
    return cropped, tuple(l + a for l, a in zip(lo, first))
