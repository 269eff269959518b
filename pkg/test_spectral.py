"""
Tests for characteristic functions, maximizer search and the Gamma series.
"""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.lattice import LatticeFunction
from models.series import PowerSeries, weighted_degree
from models.spectral import FrequencyPoint, canonical_angle
from utils.builtins import GAMMA, intro, srw1d, twopackets
from utils.errors import NormalizationError, ResourceLimitError
from utils.spectral import (charfn_grid, charfn_values, eval_charfn, find_maximizers, gamma_series,
                            grid_frequencies, sup_abs_charfn)

PI = math.pi
TWOPACKET_POINTS = [(PI / 2, 3 * PI / 4), (PI / 2, -PI / 4), (-PI / 2, -3 * PI / 4), (-PI / 2, PI / 4)]


# ---------------------------- TORUS ---------------------------- #

def test_canonical_angle_range():
    assert canonical_angle(-PI) == pytest.approx(PI)
    assert canonical_angle(3 * PI / 2) == pytest.approx(-PI / 2)
    assert canonical_angle(0.25) == 0.25


def test_frequency_point_canonicalizes():
    assert FrequencyPoint((-PI, 2 * PI)).coords == pytest.approx((PI, 0.0))


# ---------------------------- POWER SERIES ---------------------------- #

def test_series_snaps_small_coefficients():
    s = PowerSeries(2, 4, {(2, 0): 1.0, (0, 4): 1e-14})
    assert len(s) == 1


def test_log1p_of_geometric_term():
    # log(1 + x) through x^5
    s = PowerSeries.variable(1, 5, 0).log1p()
    assert [s[(k,)].real for k in range(1, 6)] == pytest.approx([1, -1 / 2, 1 / 3, -1 / 4, 1 / 5])


def test_compose_linear_swaps_variables():
    P = PowerSeries.polynomial(2, {(2, 0): 1.0, (0, 4): 2.0})
    swapped = P.compose_linear([[0, 1], [1, 0]])
    assert swapped[(0, 2)] == 1.0 and swapped[(4, 0)] == 2.0


def test_weighted_degree_is_exact():
    assert weighted_degree((0, 6), (1, 2)) == Fraction(3, 2)
    assert weighted_degree((2, 4), (1, 2)) == 2


# ---------------------------- CHARACTERISTIC FUNCTION ---------------------------- #

def test_intro_charfn_values():
    f = intro()
    assert eval_charfn(f, (0, 0)) == pytest.approx(1.0, abs=1e-15)
    assert eval_charfn(f, (PI, PI)) == pytest.approx(-1.0, abs=1e-15)
    assert abs(eval_charfn(f, (PI, 0))) <= 1e-15


def test_grid_matches_direct_evaluation():
    f = twopackets()
    N = 16
    grid = charfn_grid(f, N)
    freqs = grid_frequencies(N)
    for i, j in [(0, 0), (3, 7), (15, 8)]:
        assert grid[i, j] == pytest.approx(eval_charfn(f, (freqs[i], freqs[j])), abs=1e-13)


@given(xi=st.tuples(st.floats(-PI, PI), st.floats(-PI, PI)))
@settings(max_examples=30, deadline=None)
def test_batch_evaluation_agrees(xi):
    f = intro()
    assert charfn_values(f, np.array([xi]))[0] == pytest.approx(eval_charfn(f, xi), abs=1e-14)


# ---------------------------- SUP AND MAXIMIZERS ---------------------------- #

@pytest.mark.parametrize('builtin', [intro, twopackets])
def test_builtins_are_normalized(builtin):
    assert sup_abs_charfn(builtin()) == pytest.approx(1.0, abs=1e-10)


def test_sup_scales_linearly():
    assert sup_abs_charfn(intro().scaled(0.5)) == pytest.approx(0.5, abs=1e-10)


def test_intro_maximizers():
    omega = find_maximizers(intro())
    assert len(omega) == 2
    (p0, v0), (p1, v1) = sorted(omega, key=lambda t: t[0].coords)
    assert p0.coords == pytest.approx((0.0, 0.0), abs=1e-9)
    assert p1.coords == pytest.approx((PI, PI), abs=1e-9)
    assert v0 == pytest.approx(1.0, abs=1e-10)
    assert v1 == pytest.approx(-1.0, abs=1e-10)


def test_twopacket_maximizers():
    omega = find_maximizers(twopackets())
    assert len(omega) == 4
    for target in TWOPACKET_POINTS:
        assert min(p.distance(FrequencyPoint(target)) for p in omega.points) <= 1e-9
    for value in omega.values:
        assert abs(value) == pytest.approx(1.0, abs=1e-10)
        # values are +-i^{5/4}
        assert value ** 8 == pytest.approx(-1.0, abs=1e-9)
    at_first = dict(zip(omega.coordinates(), omega.values))
    key = min(at_first, key=lambda c: FrequencyPoint(c).distance(FrequencyPoint(TWOPACKET_POINTS[0])))
    assert at_first[key] == pytest.approx(cmath.exp(5j * PI / 8), abs=1e-10)


def test_simple_walk_maximizers():
    omega = find_maximizers(srw1d())
    assert sorted(round(p.coords[0], 9) for p in omega.points) == [0.0, round(PI, 9)]
    assert sorted(v.real for v in omega.values) == pytest.approx([-1.0, 1.0])


def test_maximizers_stable_under_grid_doubling():
    f = intro()
    coarse = find_maximizers(f, grid_per_axis=128)
    fine = find_maximizers(f, grid_per_axis=256)
    assert len(coarse) == len(fine)
    for a, b in zip(coarse.points, fine.points):
        assert a.distance(b) <= 1e-9


def test_unnormalized_input_rejected():
    with pytest.raises(NormalizationError, match='sup_abs_charfn'):
        find_maximizers(intro().scaled(2.0))


# ---------------------------- GAMMA ---------------------------- #

def test_intro_gamma_coefficients():
    g = gamma_series(intro(), (0, 0), 6)
    expected = {(2, 0): -1 / 2, (0, 4): -1 / 16, (0, 6): 1 / 96, (4, 0): -1 / 48, (2, 4): -1 / 32}
    for alpha, c in expected.items():
        assert g[alpha] == pytest.approx(c, abs=1e-12)
    assert all(sum(a) % 2 == 0 for a, _ in g.terms())
    assert g.constant_term() == 0


def test_twopacket_gamma_coefficients():
    g = gamma_series(twopackets(), TWOPACKET_POINTS[0], 2)
    assert g[(0, 1)] == pytest.approx(1j * GAMMA, abs=1e-10)
    assert g[(1, 0)] == pytest.approx(0, abs=1e-10)
    assert g[(2, 0)] == pytest.approx(-(1 + 1j * GAMMA) / 4, abs=1e-10)
    assert g[(0, 2)] == pytest.approx(-GAMMA, abs=1e-10)


def test_shift_gamma_is_linear():
    g = gamma_series(LatticeFunction.delta(1, (1,)), (0,), 3)
    assert g[(1,)] == pytest.approx(1j, abs=1e-15)
    assert len(g) == 1


@pytest.mark.parametrize('builtin', [intro, twopackets])
def test_linear_terms_are_imaginary_at_every_maximizer(builtin):
    f = builtin()
    for point, _ in find_maximizers(f):
        g = gamma_series(f, point, 4)
        for j in range(f.dim):
            alpha = tuple(1 if k == j else 0 for k in range(f.dim))
            assert abs(g[alpha].real) <= 1e-10


def test_exp_of_gamma_reproduces_ratio():
    f = twopackets()
    xi0 = np.array(TWOPACKET_POINTS[1])
    order = 6
    g = gamma_series(f, xi0, order)
    base = eval_charfn(f, xi0)
    rng = np.random.default_rng(7)
    for _ in range(20):
        u = rng.standard_normal(2)
        xi = 1e-2 * u / np.linalg.norm(u)
        ratio = eval_charfn(f, xi0 + xi) / base
        assert cmath.exp(g(xi)) == pytest.approx(ratio, abs=1e-11)


def test_real_part_of_gamma_nonpositive_near_maximizer():
    f = intro()
    rng = np.random.default_rng(11)
    xis = rng.uniform(-0.1, 0.1, size=(100, 2))
    assert np.all(np.log(np.abs(charfn_values(f, xis))) <= 1e-12)


def test_gamma_order_limits():
    with pytest.raises(ValueError):
        gamma_series(intro(), (0, 0), 1)
    with pytest.raises(ResourceLimitError):
        gamma_series(intro(), (0, 0), 40)
    with pytest.raises(NormalizationError):
        gamma_series(intro(), (PI, 0), 4)
