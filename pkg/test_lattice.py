"""
Tests for lattice functions and the convolution engine.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.lattice import BoxDomain, LatticeFunction
from utils.builtins import intro, srw1d, twopackets
from utils.errors import EmptySupportError, LatticeInputError, ResourceLimitError
from utils.lattice import (conv_power, conv_power_sequence, convolve, fft_grid_size, power_on_window,
                           random_sparse, support_box, support_radius)
from utils.sampling import get_rng, set_seed
from utils.spectral import eval_charfn

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def _pair(seed, dim=2):
    rng = np.random.default_rng(seed)
    return random_sparse(rng, dim, 5, radius=2), random_sparse(rng, dim, 4, radius=2)


# ---------------------------- BOXES ---------------------------- #

def test_box_parse_single_range_applies_to_every_axis():
    box = BoxDomain.parse('-3:4', 2)
    assert box.lo == (-3, -3) and box.hi == (4, 4)
    assert box.shape == (8, 8)
    assert box.volume == 64


def test_box_parse_rejects_wrong_arity():
    with pytest.raises(LatticeInputError):
        BoxDomain.parse('0:1,0:1,0:1', 2)


def test_box_rejects_inverted_corners():
    with pytest.raises(LatticeInputError):
        BoxDomain((2,), (1,))


def test_box_points_are_c_ordered():
    pts = BoxDomain((0, 0), (1, 2)).points()
    assert pts.tolist()[:3] == [[0, 0], [0, 1], [0, 2]]
    assert len(pts) == 6


# ---------------------------- LATTICE FUNCTIONS ---------------------------- #

def test_from_entries_crops_to_support():
    f = LatticeFunction.from_entries(2, {(5, -1): 1.0, (7, 2): 2j})
    assert f.box.lo == (5, -1) and f.box.hi == (7, 2)
    assert f((7, 2)) == 2j
    assert f((0, 0)) == 0
    assert f.nnz == 2


def test_prune_relative_to_peak():
    f = LatticeFunction.from_entries(1, {(0,): 1.0, (3,): 1e-17})
    assert f.box.hi == (0,)


def test_dimension_mismatch_rejected():
    with pytest.raises(LatticeInputError):
        LatticeFunction.from_entries(2, {(0, 0): 1.0, (1,): 1.0})


def test_empty_function_has_no_box():
    f = LatticeFunction.from_entries(2, {})
    assert f.is_empty
    with pytest.raises(EmptySupportError):
        _ = f.box
    with pytest.raises(EmptySupportError):
        support_box(f)


def test_json_round_trip(tmp_path):
    f = twopackets()
    path = tmp_path / 'phi.json'
    f.to_json(str(path))
    assert LatticeFunction.from_json(str(path)) == f


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"dim": 2, "entries": [{"x": [0]}]}')
    with pytest.raises(LatticeInputError):
        LatticeFunction.from_json(str(path))
    path.write_text('not json')
    with pytest.raises(LatticeInputError):
        LatticeFunction.from_json(str(path))


def test_frame_columns():
    df = srw1d().to_frame(BoxDomain((-2,), (2,)))
    assert list(df.columns) == ['x1', 're', 'im', 'abs']
    assert df['re'].tolist() == [0.0, 0.5, 0.0, 0.5, 0.0]


# ---------------------------- CONVOLUTION ---------------------------- #

@given(seed=seeds)
@settings(max_examples=25, deadline=None)
def test_convolution_commutes(seed):
    f, g = _pair(seed)
    assert convolve(f, g).max_abs_difference(convolve(g, f)) <= 1e-12


@given(seed=seeds)
@settings(max_examples=25, deadline=None)
def test_convolution_associates(seed):
    rng = np.random.default_rng(seed)
    f, g, h = (random_sparse(rng, 2, 4, radius=2) for _ in range(3))
    left = convolve(convolve(f, g), h)
    right = convolve(f, convolve(g, h))
    assert left.max_abs_difference(right) <= 1e-12 * max(1.0, left.max_abs)


@given(seed=seeds)
@settings(max_examples=25, deadline=None)
def test_young_and_mass(seed):
    f, g = _pair(seed)
    fg = convolve(f, g)
    assert fg.l1_norm <= f.l1_norm * g.l1_norm * (1 + 1e-12)
    assert fg.total_mass == pytest.approx(f.total_mass * g.total_mass, rel=1e-12, abs=1e-12)


@given(seed=seeds, xi=st.tuples(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi)))
@settings(max_examples=25, deadline=None)
def test_fourier_transform_is_multiplicative(seed, xi):
    f, g = _pair(seed)
    lhs = eval_charfn(convolve(f, g), xi)
    rhs = eval_charfn(f, xi) * eval_charfn(g, xi)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_convolve_dimension_mismatch():
    with pytest.raises(LatticeInputError):
        convolve(srw1d(), intro())


# ---------------------------- POWERS ---------------------------- #

def test_power_zero_and_one():
    f = intro()
    assert conv_power(f, 0) == LatticeFunction.delta(2)
    assert conv_power(f, 1) == f


@pytest.mark.parametrize('builtin', [intro, twopackets])
@pytest.mark.parametrize('n', [2, 8, 33, 64])
def test_direct_and_fft_agree(builtin, n):
    f = builtin()
    direct = conv_power(f, n, method='direct')
    fft = conv_power(f, n, method='fft')
    assert direct.max_abs_difference(fft) <= 1e-12


def test_power_support_grows_linearly():
    f = intro()
    p = conv_power(f, 10)
    L = support_radius(f)
    assert all(abs(v) <= 10 * L for v in p.box.lo + p.box.hi)


def test_simple_walk_binomial():
    p = conv_power(srw1d(), 6)
    expected = [math.comb(6, k) / 64 for k in range(7)]
    assert [p((2 * k - 6,)).real for k in range(7)] == pytest.approx(expected, abs=1e-15)
    assert p((1,)) == 0


def test_sequence_matches_power():
    f = twopackets()
    for n, pn in conv_power_sequence(f, [3, 7, 12]):
        assert pn.max_abs_difference(conv_power(f, n, method='direct')) <= 1e-13


def test_fft_budget_enforced():
    f = intro()
    size = fft_grid_size(f, 100)
    assert size == 512
    with pytest.raises(ResourceLimitError):
        conv_power(f, 100, method='fft', fft_max_cells=size ** 2 - 1)


def test_unknown_method_and_negative_power():
    with pytest.raises(LatticeInputError):
        conv_power(intro(), 2, method='magic')
    with pytest.raises(LatticeInputError):
        conv_power(intro(), -1)


def test_window_beyond_support_is_zero_padded(caplog):
    values = power_on_window(srw1d(), 2, BoxDomain((-4,), (4,)))
    assert values.shape == (9,)
    assert values[0] == 0 and values[4] == pytest.approx(0.5)
    assert 'padding with zeros' in caplog.text


def test_delta_is_the_identity():
    f = intro()
    assert convolve(LatticeFunction.delta(2), f) == f


def test_intro_square_at_origin():
    f = intro()
    assert convolve(f, f)((0, 0)).real == pytest.approx(17 / 64, abs=1e-15)
    assert conv_power(f, 2, method='direct')((0, 0)).real == pytest.approx(0.265625, abs=1e-15)


def test_intro_support_box():
    box = support_box(intro())
    assert box.lo == (-2, -2) and box.hi == (2, 2)
    p = conv_power(intro(), 7)
    assert BoxDomain((-14, -14), (14, 14)).contains_box(p.box)


# ---------------------------- SEEDING ---------------------------- #

def test_set_seed_makes_shared_generator_reproducible():
    set_seed(0x2A)
    first = get_rng().random(4)
    set_seed(0x2A)
    np.testing.assert_array_equal(get_rng().random(4), first)
    own = np.random.default_rng(1)
    assert get_rng(own) is own
