"""
Truncated multivariate power series / polynomials over C.

A PowerSeries is a finite map from multi-indices alpha (|alpha| <= order) to
complex coefficients. `order` is the truncation degree: coefficients of higher
total degree are unknown, not zero. Products and compositions truncate at the
smaller order of their operands.
"""

from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from utils.errors import SeriesConsistencyError

MultiIndex = Tuple[int, ...]

SNAP_TOL = 1e-13


def weighted_degree(alpha: Sequence[int], m: Sequence[int]) -> Fraction:
    """|alpha : 2m| = sum_j alpha_j / (2 m_j), exactly."""
    return sum((Fraction(int(a), 2 * int(mj)) for a, mj in zip(alpha, m)), Fraction(0))


class PowerSeries:
    """Immutable truncated power series in `dim` variables."""

    def __init__(self, dim: int, order: int, coeffs: Optional[Mapping[Sequence[int], complex]] = None,
                 snap_tol: float = SNAP_TOL):
        dim = int(dim); order = int(order)
        if dim < 1:
            raise ValueError("PowerSeries needs at least one variable.")
        if order < 0:
            raise ValueError("Truncation order must be non-negative.")
        clean: Dict[MultiIndex, complex] = {}
        for key, c in (coeffs or {}).items():
            alpha = tuple(int(a) for a in key)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise ValueError(f"Multi-index {key} is not a valid index in {dim} variables.")
            if sum(alpha) > order:
                raise ValueError(f"Multi-index {alpha} exceeds truncation order {order}.")
            clean[alpha] = clean.get(alpha, 0j) + complex(c)
        self._dim = dim
        self._order = order
        self._coeffs = {a: c for a, c in sorted(clean.items(), key=lambda kv: (sum(kv[0]), kv[0]))
                        if abs(c) >= snap_tol}

    # ---------------------------- CONSTRUCTORS ---------------------------- #

    @classmethod
    def zero(cls, dim: int, order: int) -> 'PowerSeries':
        return cls(dim, order)

    @classmethod
    def constant(cls, dim: int, order: int, c: complex) -> 'PowerSeries':
        return cls(dim, order, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim: int, order: int, j: int, scale: complex = 1.0) -> 'PowerSeries':
        alpha = [0] * dim; alpha[j] = 1
        return cls(dim, order, {tuple(alpha): scale})

    @classmethod
    def monomial(cls, dim: int, order: int, alpha: Sequence[int], c: complex = 1.0) -> 'PowerSeries':
        return cls(dim, order, {tuple(alpha): c})

    @classmethod
    def polynomial(cls, dim: int, terms: Mapping[Sequence[int], complex]) -> 'PowerSeries':
        """Exact polynomial: truncation order equals its total degree."""
        order = max((sum(a) for a in terms), default=0)
        return cls(dim, order, terms)

    # ---------------------------- ACCESSORS ---------------------------- #

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> Dict[MultiIndex, complex]:
        return dict(self._coeffs)

    def terms(self) -> Iterator[Tuple[MultiIndex, complex]]:
        return iter(self._coeffs.items())

    def __getitem__(self, alpha: Sequence[int]) -> complex:
        return self._coeffs.get(tuple(alpha), 0j)

    def __len__(self) -> int:
        return len(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self._coeffs), default=0)

    @property
    def min_degree(self) -> Optional[int]:
        return min((sum(a) for a in self._coeffs), default=None)

    @property
    def is_separable(self) -> bool:
        """No monomial mixes two variables."""
        return all(sum(1 for v in a if v) <= 1 for a in self._coeffs)

    def max_power(self, j: int) -> int:
        return max((a[j] for a in self._coeffs), default=0)

    @cached_property
    def _exponents(self) -> np.ndarray:
        if not self._coeffs:
            return np.zeros((0, self._dim), dtype=np.int64)
        return np.array(list(self._coeffs), dtype=np.int64)

    @cached_property
    def _coefficient_array(self) -> np.ndarray:
        return np.array(list(self._coeffs.values()), dtype=complex)

    # ---------------------------- EVALUATION ---------------------------- #

    def __call__(self, xi):
        """Evaluate at one point (shape (d,)) or a batch (shape (N, d))."""
        X = np.asarray(xi)
        single = X.ndim == 1
        X = X.reshape(1, -1) if single else X
        if X.shape[1] != self._dim:
            raise ValueError(f"Expected points with {self._dim} coordinates, got shape {X.shape}.")
        if not self._coeffs:
            out = np.zeros(X.shape[0], dtype=complex)
        else:
            monomials = np.prod(X[:, None, :] ** self._exponents[None, :, :], axis=2)
            out = monomials @ self._coefficient_array
        return complex(out[0]) if single else out

    def evaluate_real(self, xi):
        """Real part of the evaluation; convenient for R = Re P."""
        val = self(xi)
        return val.real if isinstance(val, complex) else np.real(val)

    # ---------------------------- ARITHMETIC ---------------------------- #

    def _check_compatible(self, other: 'PowerSeries'):
        if other.dim != self._dim:
            raise ValueError(f"Series dimension mismatch: {self._dim} vs {other.dim}.")

    def _lift(self, other) -> 'PowerSeries':
        if isinstance(other, PowerSeries):
            self._check_compatible(other)
            return other
        return PowerSeries.constant(self._dim, self._order, complex(other))

    def __add__(self, other):
        other = self._lift(other)
        order = min(self._order, other.order)
        out = {a: c for a, c in self._coeffs.items() if sum(a) <= order}
        for a, c in other.terms():
            if sum(a) <= order:
                out[a] = out.get(a, 0j) + c
        return PowerSeries(self._dim, order, out)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(self._dim, self._order, {a: -c for a, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            c = complex(other)
            return PowerSeries(self._dim, self._order, {a: v * c for a, v in self._coeffs.items()})
        self._check_compatible(other)
        order = min(self._order, other.order)
        out: Dict[MultiIndex, complex] = {}
        for a, ca in self._coeffs.items():
            da = sum(a)
            for b, cb in other.terms():
                if da + sum(b) > order:
                    continue
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0j) + ca * cb
        return PowerSeries(self._dim, order, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            raise ValueError("Only non-negative integer powers are supported.")
        result = PowerSeries.constant(self._dim, self._order, 1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def truncate(self, order: int) -> 'PowerSeries':
        order = min(int(order), self._order)
        return PowerSeries(self._dim, order, {a: c for a, c in self._coeffs.items() if sum(a) <= order})

    def filter(self, keep: Callable[[MultiIndex, complex], bool]) -> 'PowerSeries':
        return PowerSeries(self._dim, self._order, {a: c for a, c in self._coeffs.items() if keep(a, c)})

    def real_part(self) -> 'PowerSeries':
        return PowerSeries(self._dim, self._order, {a: c.real for a, c in self._coeffs.items()})

    def imag_part(self) -> 'PowerSeries':
        return PowerSeries(self._dim, self._order, {a: c.imag for a, c in self._coeffs.items()})

    def constant_term(self) -> complex:
        return self[(0,) * self._dim]

    # ---------------------------- CALCULUS ---------------------------- #

    def derivative(self, j: int) -> 'PowerSeries':
        out = {}
        for a, c in self._coeffs.items():
            if a[j] == 0:
                continue
            b = list(a); b[j] -= 1
            out[tuple(b)] = c * a[j]
        return PowerSeries(self._dim, max(self._order - 1, 0), out)

    @cached_property
    def gradient(self) -> Tuple['PowerSeries', ...]:
        return tuple(self.derivative(j) for j in range(self._dim))

    @cached_property
    def hessian(self) -> Tuple[Tuple['PowerSeries', ...], ...]:
        return tuple(tuple(g.derivative(k) for k in range(self._dim)) for g in self.gradient)

    def log1p(self) -> 'PowerSeries':
        """Formal log(1 + u) = sum_{j>=1} (-1)^{j+1} u^j / j, truncated at `order`."""
        if abs(self.constant_term()) > 0:
            raise SeriesConsistencyError("log1p needs a series without constant term.")
        result = PowerSeries.zero(self._dim, self._order)
        upow = PowerSeries.constant(self._dim, self._order, 1.0)
        for j in range(1, self._order + 1):
            upow = upow * self
            if upow.is_zero:
                break
            result = result + upow * (((-1) ** (j + 1)) / j)
        return result

    def compose_linear(self, A) -> 'PowerSeries':
        """The series xi -> self(A xi) for a real d x d matrix A."""
        A = np.asarray(A, dtype=float)
        if A.shape != (self._dim, self._dim):
            raise ValueError(f"Linear map must be {self._dim}x{self._dim}, got {A.shape}.")
        linear = [PowerSeries(self._dim, self._order,
                              {tuple(1 if k == i else 0 for k in range(self._dim)): A[j, i]
                               for i in range(self._dim)})
                  for j in range(self._dim)]
        powers: Dict[Tuple[int, int], PowerSeries] = {}

        def power(j, p):
            if (j, p) not in powers:
                powers[(j, p)] = PowerSeries.constant(self._dim, self._order, 1.0) if p == 0 \
                    else power(j, p - 1) * linear[j]
            return powers[(j, p)]

        result = PowerSeries.zero(self._dim, self._order)
        for a, c in self._coeffs.items():
            term = PowerSeries.constant(self._dim, self._order, c)
            for j, p in enumerate(a):
                if p:
                    term = term * power(j, p)
            result = result + term
        return result

    # ---------------------------- WEIGHTS ---------------------------- #

    def weighted_degrees(self, m: Sequence[int]) -> Dict[MultiIndex, Fraction]:
        return {a: weighted_degree(a, m) for a in self._coeffs}

    # ---------------------------- COMPARISON / IO ---------------------------- #

    def max_coefficient_difference(self, other: 'PowerSeries') -> float:
        self._check_compatible(other)
        keys = set(self._coeffs) | set(other.coeffs)
        return max((abs(self[a] - other[a]) for a in keys), default=0.0)

    def to_dict(self) -> Dict:
        return {
            'dim': self._dim,
            'order': self._order,
            'terms': [{'alpha': list(a), 're': c.real, 'im': c.imag} for a, c in self._coeffs.items()]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'PowerSeries':
        terms = {tuple(t['alpha']): complex(t.get('re', 0.0), t.get('im', 0.0)) for t in data['terms']}
        return cls(int(data['dim']), int(data['order']), terms)

    def __repr__(self):
        return f"PowerSeries(dim={self._dim}, order={self._order}, terms={len(self._coeffs)})"

    def __str__(self):
        if not self._coeffs:
            return f"0 + O(|xi|^{self._order + 1})"
        parts = []
        for a, c in self._coeffs.items():
            mono = '*'.join(f"x{j + 1}^{p}" if p > 1 else f"x{j + 1}" for j, p in enumerate(a) if p)
            coef = f"{c.real:.6g}" if c.imag == 0 else f"({c.real:.6g}{c.imag:+.6g}j)"
            parts.append(f"{coef}*{mono}" if mono else coef)
        return ' + '.join(parts)
