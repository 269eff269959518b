import os
import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

import click

from config import Config
from models.homogeneity import ExponentMatrix
from models.lattice import BoxDomain, LatticeFunction
from utils.builtins import BUILTINS, load_builtin
from utils.errors import LatticeInputError

WINDOW_PATTERN = re.compile(r'^\s*-?\d+:-?\d+(\s*,\s*-?\d+:-?\d+)*\s*$')


def _expand_range(text: str, cast):
    """'a:b:step' (inclusive) or 'a,b,c'."""
    text = text.strip()
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError(f"range '{text}' must look like start:stop:step")
        start, stop, step = (cast(p) for p in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        values, v = [], start
        while v <= stop + (1e-9 if cast is float else 0):
            values.append(round(v, 10) if cast is float else v)
            v += step
        return values
    return [cast(p) for p in text.split(',') if p.strip()]


class PositiveIntList(click.ParamType):
    """Comma list or inclusive start:stop:step range of positive integers."""
    name = 'n-list'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            values = _expand_range(value, int)
        except ValueError as e:
            self.fail(f"'{value}' is not a list of integers ({e})", param, ctx)
        if not values or any(v < 1 for v in values):
            self.fail(f"'{value}' must contain positive integers only", param, ctx)
        return tuple(sorted(set(values)))


class PositiveFloatList(click.ParamType):
    name = 'float-list'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            values = _expand_range(value, float)
        except ValueError as e:
            self.fail(f"'{value}' is not a list of numbers ({e})", param, ctx)
        if not values or any(v <= 0 for v in values):
            self.fail(f"'{value}' must contain positive numbers only", param, ctx)
        return tuple(values)


class WindowText(click.ParamType):
    """Syntax check only; the box needs the input dimension (see build_config)."""
    name = 'window'

    def convert(self, value, param, ctx):
        if not WINDOW_PATTERN.match(value):
            self.fail(f"'{value}' must look like a:b or a:b,c:d", param, ctx)
        return value.replace(' ', '')


class SeedInt(click.ParamType):
    name = 'seed'

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            return value
        try:
            seed = int(value, 0)
        except ValueError:
            self.fail(f"'{value}' is not an integer seed (decimal or 0x-prefixed hex)", param, ctx)
        if not 0 <= seed < 2 ** 64:
            self.fail("seed must fit in 64 bits", param, ctx)
        return seed


class ExponentText(click.ParamType):
    name = 'exponent'

    def convert(self, value, param, ctx):
        if isinstance(value, ExponentMatrix):
            return value
        try:
            return ExponentMatrix.parse(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


N_LIST = PositiveIntList()
FLOAT_LIST = PositiveFloatList()
WINDOW = WindowText()
SEED = SeedInt()
EXPONENT = ExponentText()


@dataclass
class AnalysisConfig:
    """Validated command input."""
    source: str
    function: LatticeFunction
    order: int = Config.EXPANSION_ORDER
    m_max: int = Config.M_MAX
    n_list: Tuple[int, ...] = ()
    window: Optional[BoxDomain] = None
    target_eps: float = Config.TARGET_EPS
    M_grid: Tuple[float, ...] = Config.M_GRID
    output_dir: str = Config.OUT_DIR
    seed: int = Config.SEED
    exponent: Optional[ExponentMatrix] = None
    extras: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.function.dim


def load_function(builtin: Optional[str], input_path: Optional[str]) -> Tuple[str, LatticeFunction]:
    if bool(builtin) == bool(input_path):
        raise click.UsageError("Give exactly one of --builtin NAME or --input FILE.json.")
    if builtin:
        return f"builtin:{builtin}", load_builtin(builtin)
    if not os.path.isfile(input_path):
        raise click.BadParameter(f"file '{input_path}' does not exist", param_hint='--input')
    try:
        return input_path, LatticeFunction.from_json(input_path)
    except LatticeInputError as e:
        raise click.BadParameter(str(e), param_hint='--input')


def build_config(builtin=None, input_path=None, order=None, m_max=None, n_list=None, window=None,
                 target_eps=None, M_grid=None, out=None, seed=None, exponent=None, **extras) -> AnalysisConfig:
    """Cross-field validation and defaults; raises click usage errors on bad input."""
    source, function = load_function(builtin, input_path)
    if function.is_empty:
        raise click.BadParameter("input function has empty support", param_hint='--input')

    order = Config.EXPANSION_ORDER if order is None else order
    m_max = Config.M_MAX if m_max is None else m_max
    if order < 2:
        raise click.BadParameter("expansion order must be at least 2", param_hint='--order')
    if m_max < 1:
        raise click.BadParameter("m_max must be positive", param_hint='--m-max')
    if order > Config.MAX_SERIES_ORDER:
        raise click.BadParameter(f"expansion order is capped at {Config.MAX_SERIES_ORDER} (CONVPOW_MAX_SERIES_ORDER)",
                                 param_hint='--order')
    target_eps = Config.TARGET_EPS if target_eps is None else target_eps
    if not 0 < target_eps < 1:
        raise click.BadParameter("target eps must lie in (0, 1)", param_hint='--eps')
    if exponent is not None and exponent.dim != function.dim:
        raise click.BadParameter(f"exponent is {exponent.dim}x{exponent.dim} but the input lives on Z^{function.dim}",
                                 param_hint='--exponent')

    box = None
    if window:
        try:
            box = BoxDomain.parse(window, function.dim)
        except LatticeInputError as e:
            raise click.BadParameter(str(e), param_hint='--window')

    return AnalysisConfig(
        source=source,
        function=function,
        order=order,
        m_max=m_max,
        n_list=tuple(n_list or ()),
        window=box,
        target_eps=target_eps,
        M_grid=tuple(M_grid) if M_grid else Config.M_GRID,
        output_dir=out or Config.OUT_DIR,
        seed=Config.SEED if seed is None else seed,
        exponent=exponent,
        extras=extras,
    )


def builtin_names():
    return sorted(BUILTINS)
