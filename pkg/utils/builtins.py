"""Built-in example functions, available to every command as --builtin NAME."""

import math
from typing import Callable, Dict

from models.lattice import LatticeFunction
from utils.errors import LatticeInputError

GAMMA = math.sqrt(2) - 1          # drift of the two-packet example


def intro() -> LatticeFunction:
    """(1/16) x {4 at (0,+-1), (+-1,0); 1 at (+-2,0); -1 at (0,+-2)}; Omega = {(0,0), (pi,pi)}."""
    entries = {
        (1, 0): 4, (-1, 0): 4, (0, 1): 4, (0, -1): 4,
        (2, 0): 1, (-2, 0): 1,
        (0, 2): -1, (0, -2): -1,
    }
    return LatticeFunction.from_entries(2, {x: v / 16 for x, v in entries.items()})


def twopackets() -> LatticeFunction:
    """Two packets drifting apart with velocities (0, +-(sqrt 2 - 1)); four maximizers."""
    a = math.sqrt(2 + math.sqrt(2))
    c = (1 + 1j) / 4
    s = 1 / math.sqrt(2)
    entries = {
        (-1, 1): c, (-1, -1): c,
        (1, 1): -c, (1, -1): -c,
        (0, 1): s, (0, -1): -s,
    }
    return LatticeFunction.from_entries(2, {x: v / a for x, v in entries.items()})


def srw1d() -> LatticeFunction:
    """Simple random walk on Z: 1/2 at +-1."""
    return LatticeFunction.from_entries(1, {(1,): 0.5, (-1,): 0.5})


BUILTINS: Dict[str, Callable[[], LatticeFunction]] = {
    'intro': intro,
    'twopackets': twopackets,
    'srw1d': srw1d,
}


def load_builtin(name: str) -> LatticeFunction:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise LatticeInputError(f"Unknown builtin '{name}'; choose one of {sorted(BUILTINS)}.")
