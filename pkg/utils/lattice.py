"""
Convolutions and convolution powers of finitely supported lattice functions.

Two engines compute phi^(n):
  • direct: exact sparse convolution (shift-and-add over the non-zeros of the
    sparser operand), combined by binary exponentiation;
  • fft: phi_hat sampled on a power-of-two torus grid large enough that the
    cyclic convolution never wraps, raised to the n-th power and inverted.
`auto` chooses fft once the predicted direct cost passes the configured threshold.
"""

import logging
import math
from typing import Iterable, Iterator, Tuple

import numpy as np
import scipy.fft

from config import Config
from models.lattice import BoxDomain, LatticeFunction
from utils.errors import LatticeInputError, ResourceLimitError

logger = logging.getLogger(__name__)

METHODS = ('direct', 'fft', 'auto')


# ---------------------------- CONVOLUTION ---------------------------- #

def convolve(f: LatticeFunction, g: LatticeFunction) -> LatticeFunction:
    """(f * g)(x) = sum_y f(x - y) g(y)."""
    if f.dim != g.dim:
        raise LatticeInputError(f"Cannot convolve functions on Z^{f.dim} and Z^{g.dim}.")
    if f.is_empty or g.is_empty:
        return LatticeFunction(np.zeros((0,) * f.dim), (0,) * f.dim)

    small, big = (f, g) if f.nnz <= g.nnz else (g, f)
    out_shape = tuple(a + b - 1 for a, b in zip(f.values.shape, g.values.shape))
    out = np.zeros(out_shape, dtype=complex)
    big_vals = big.values
    for idx in np.argwhere(small.values != 0):
        window = tuple(slice(i, i + s) for i, s in zip(idx, big_vals.shape))
        out[window] += small.values[tuple(idx)] * big_vals
    lo = tuple(a + b for a, b in zip(f.lo, g.lo))
    return LatticeFunction(out, lo)


def support_box(f: LatticeFunction) -> BoxDomain:
    """Smallest box containing supp(f)."""
    return f.box


# ---------------------------- POWERS ---------------------------- #

def _power_box_shape(f: LatticeFunction, n: int) -> Tuple[int, ...]:
    return tuple(n * (s - 1) + 1 for s in f.values.shape)


def predicted_direct_cost(f: LatticeFunction, n: int) -> float:
    """Rough multiply-add count of the final squaring in binary exponentiation."""
    half = max(n // 2, 1)
    half_vol = math.prod(_power_box_shape(f, half))
    full_vol = math.prod(_power_box_shape(f, n))
    return float(half_vol) * float(full_vol)


def fft_grid_size(f: LatticeFunction, n: int) -> int:
    """Per-axis power-of-two grid with room for n * width + 1 cells (width = hi - lo)."""
    width = max(s - 1 for s in f.values.shape)
    need = n * width + 1
    return 1 << (need - 1).bit_length()


def conv_power(f: LatticeFunction, n: int, method: str = 'auto',
               fft_max_cells: int = None, direct_cost_threshold: float = None,
               workers: int = None) -> LatticeFunction:
    """phi^(n) for n >= 0 (n = 0 gives the delta at the origin)."""
    if method not in METHODS:
        raise LatticeInputError(f"Unknown method '{method}'; choose one of {METHODS}.")
    n = int(n)
    if n < 0:
        raise LatticeInputError("Convolution powers need n >= 0.")
    if n == 0:
        return LatticeFunction.delta(f.dim)
    if f.is_empty or n == 1:
        return f

    threshold = Config.DIRECT_COST_THRESHOLD if direct_cost_threshold is None else direct_cost_threshold
    if method == 'auto':
        method = 'fft' if predicted_direct_cost(f, n) > threshold else 'direct'
        logger.info("conv_power n=%d: auto selected %s", n, method)

    if method == 'direct':
        return _power_direct(f, n)
    return _power_fft(f, n, fft_max_cells=fft_max_cells, workers=workers)


def _power_direct(f: LatticeFunction, n: int) -> LatticeFunction:
    result = None
    base = f
    while n:
        if n & 1:
            result = base if result is None else convolve(result, base)
        n >>= 1
        if n:
            base = convolve(base, base)
    return result


def _power_fft(f: LatticeFunction, n: int, fft_max_cells: int = None, workers: int = None) -> LatticeFunction:
    budget = Config.FFT_MAX_CELLS if fft_max_cells is None else fft_max_cells
    workers = Config.THREADS if workers is None else workers
    size = fft_grid_size(f, n)
    cells = size ** f.dim
    if cells > budget:
        raise ResourceLimitError(
            f"FFT grid of {size}^{f.dim} = {cells} cells exceeds the budget of {budget} cells "
            f"(n={n}); raise CONVPOW_FFT_MAX_CELLS or use method='direct'.",
            required=cells, budget=budget)

    grid = np.zeros((size,) * f.dim, dtype=complex)
    grid[tuple(slice(0, s) for s in f.values.shape)] = f.values
    spectrum = scipy.fft.fftn(grid, workers=workers)
    del grid
    spectrum **= n
    power = scipy.fft.ifftn(spectrum, workers=workers)
    del spectrum
    out_shape = _power_box_shape(f, n)
    block = power[tuple(slice(0, s) for s in out_shape)]
    lo = tuple(n * a for a in f.lo)
    return LatticeFunction(block, lo)


def conv_power_sequence(f: LatticeFunction, n_values: Iterable[int]) -> Iterator[Tuple[int, LatticeFunction]]:
    """
    Yield (n, phi^(n)) for increasing n by the defining recursion
    phi^(n) = phi^(n-1) * phi. Each step costs nnz(phi) shifted adds, which
    beats squaring for sparse phi and keeps far-tail values exact to roundoff.
    """
    targets = sorted(set(int(n) for n in n_values))
    if not targets:
        return
    if targets[0] < 1:
        raise LatticeInputError("conv_power_sequence needs n >= 1.")
    current, k = f, 1
    for n in targets:
        while k < n:
            current = convolve(current, f)
            k += 1
        yield n, current


def power_on_window(f: LatticeFunction, n: int, window: BoxDomain, method: str = 'auto') -> np.ndarray:
    """Dense values of phi^(n) on `window`, zero-padded beyond the support."""
    power = conv_power(f, n, method=method)
    if not power.is_empty and not power.box.contains_box(window):
        logger.warning("Window %s..%s extends beyond supp(phi^(%d)); padding with zeros.",
                       window.lo, window.hi, n)
    return power.values_on(window)


def random_sparse(rng: np.random.Generator, dim: int, nnz: int, radius: int = 3,
                  scale: float = 1.0) -> LatticeFunction:
    """Random complex function with at most `nnz` points in [-radius, radius]^dim."""
    pts = rng.integers(-radius, radius + 1, size=(nnz, dim))
    vals = scale * (rng.standard_normal(nnz) + 1j * rng.standard_normal(nnz))
    return LatticeFunction.from_entries(dim, {tuple(p): v for p, v in zip(pts, vals)})


def support_radius(f: LatticeFunction) -> int:
    """max |x|_inf over supp(f)."""
    box = f.box
    return int(max(max(abs(a), abs(b)) for a, b in zip(box.lo, box.hi)))
