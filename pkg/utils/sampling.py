import logging
from typing import Optional

import numpy as np

from config import Config

logger = logging.getLogger(__name__)

# Global RNG for consistent seeding
_rng = np.random.default_rng(Config.SEED)


def set_seed(seed: Optional[int] = None):
    """Set the global random seed for every sampler in the toolkit."""
    global _rng
    if seed is not None:
        _rng = np.random.default_rng(seed)
        logger.debug("Global seed set to %#x", seed)
    else:
        _rng = np.random.default_rng()


def get_rng(rng: Optional[np.random.Generator] = None) -> np.random.Generator:
    """The caller's generator if given, else the shared global one."""
    return _rng if rng is None else rng


def unit_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """`count` uniformly random unit vectors in R^dim."""
    u = rng.standard_normal((count, dim))
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return u / norms


def unit_ball(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """`count` uniform samples from the closed unit ball of R^dim."""
    radii = rng.random((count, 1)) ** (1.0 / dim)
    return unit_directions(rng, count, dim) * radii


def log_uniform(rng: np.random.Generator, count: int, lo: float, hi: float) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=count))
