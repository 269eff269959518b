"""
Tests for heat kernels, the attractor sum and exact Fourier inversion.
"""

import cmath
import math

import numpy as np
import pytest

from models.lattice import BoxDomain
from models.quadrature import AttractorTerm, QuadratureSpec
from models.series import PowerSeries
from models.spectral import FrequencyPoint
from utils.analysis import analyze_function, attractor_terms
from utils.attractor import (attractor_grid, attractor_sum, fourier_invert_power, heat_kernel_eval,
                             heat_kernel_grid, principal_weights, solve_quadrature_spec)
from utils.builtins import GAMMA, intro, twopackets
from utils.errors import ResourceLimitError
from utils.lattice import conv_power


def intro_P():
    return PowerSeries.polynomial(2, {(2, 0): 0.5, (0, 4): 1 / 16})


def twopacket_P():
    return PowerSeries.polynomial(2, {(2, 0): (1 + 1j * GAMMA) / 4, (0, 2): GAMMA})


def twopacket_kernel(t, x, y):
    root = cmath.sqrt(GAMMA * (1 + 1j * GAMMA))
    return cmath.exp(-x ** 2 / (t * (1 + 1j * GAMMA)) - y ** 2 / (4 * t * GAMMA)) / (2 * math.pi * t * root)


@pytest.fixture
def rng():
    return np.random.default_rng(31337)


@pytest.fixture(scope='module')
def intro_terms():
    return attractor_terms(analyze_function(intro(), rng=np.random.default_rng(5)))


# ---------------------------- QUADRATURE SPEC ---------------------------- #

def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec((1.0,), (15,))
    with pytest.raises(ValueError):
        QuadratureSpec((1.0,), (17,))
    with pytest.raises(ValueError):
        QuadratureSpec((0.0, 1.0), (16, 16))
    spec = QuadratureSpec((2.0, 3.0), (16, 32))
    assert spec.dim == 2 and spec.total_nodes == 512
    assert spec.doubled().nodes == (32, 64)


def test_solved_spec_grows_nodes_with_extent():
    P = intro_P()
    near = solve_quadrature_spec(P, 1.0, rng=np.random.default_rng(1))
    far = solve_quadrature_spec(P, 1.0, x_extent=(40, 40), rng=np.random.default_rng(1))
    assert near.halfwidths == far.halfwidths
    assert all(n % 2 == 0 and n >= 16 for n in far.nodes)
    assert all(a < b for a, b in zip(near.nodes, far.nodes))
    level = math.log(1 / far.target_eps)
    assert P(np.array([[far.halfwidths[0], 0.0]]))[0].real >= level


def test_principal_weights():
    assert principal_weights(intro_P()) == [1, 2]
    assert principal_weights(twopacket_P()) == [1, 1]


def test_non_positive_time_rejected():
    with pytest.raises(ValueError):
        solve_quadrature_spec(intro_P(), 0.0)


# ---------------------------- HEAT KERNEL ---------------------------- #

def test_gaussian_kernel_at_origin(rng):
    P = PowerSeries.polynomial(1, {(2,): 1.0})
    assert heat_kernel_eval(P, 1.0, (0.0,), rng=rng) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-10)


@pytest.mark.parametrize('t', [1.0, 3.0, 25.0])
def test_twopacket_kernel_closed_form(t, rng):
    P = twopacket_P()
    pts = np.array([[0.0, 0.0], [1.0, -2.0], [3.5, 0.5], [-4.0, 6.0]])
    values = heat_kernel_eval(P, t, pts, rng=rng)
    scale = abs(twopacket_kernel(t, 0, 0))
    for (x, y), v in zip(pts, values):
        assert abs(v - twopacket_kernel(t, x, y)) <= 1e-8 * scale


def test_kernel_scaling_in_time(rng):
    P = intro_P()
    h1 = heat_kernel_eval(P, 1.0, (0.0, 0.0), rng=rng)
    h4 = heat_kernel_eval(P, 4.0, (0.0, 0.0), rng=rng)
    assert h4 == pytest.approx(4 ** -0.75 * h1, rel=1e-8)


def random_semi_elliptic(rng):
    """a1 xi1^{2 m1} + a2 xi2^{2 m2} + c xi1^{m1} xi2^{m2}, Re a_j >= 1/2 and |c| <= 1/2."""
    m = tuple(int(v) for v in rng.integers(1, 3, size=2))
    a = rng.uniform(0.5, 2.0, size=2) + 1j * rng.uniform(-1.0, 1.0, size=2)
    terms = {(2 * m[0], 0): a[0], (0, 2 * m[1]): a[1]}
    terms[(m[0], m[1])] = terms.get((m[0], m[1]), 0) + rng.uniform(-0.5, 0.5)
    return PowerSeries.polynomial(2, terms), m


def assert_scaling_law(P, m, t, pts, rng):
    E = np.array([1 / (2 * mj) for mj in m])
    mu = E.sum()
    lhs = heat_kernel_eval(P, t, pts, rng=rng)
    rhs = t ** -mu * heat_kernel_eval(P, 1.0, pts * t ** -E, rng=rng)
    scale = abs(heat_kernel_eval(P, t, (0.0, 0.0), rng=rng))
    assert np.abs(lhs - rhs).max() <= 1e-8 * scale


@pytest.mark.parametrize('t', [4.0, 16.0])
def test_scaling_law_off_diagonal(t, rng):
    pts = np.array([[1.0, 2.0], [3.0, -1.5], [-2.5, 0.5]])
    assert_scaling_law(intro_P(), (1, 2), t, pts, rng)
    assert_scaling_law(twopacket_P(), (1, 1), t, pts, rng)


def test_scaling_law_random_semi_elliptic(rng):
    for _ in range(5):
        P, m = random_semi_elliptic(rng)
        t = float(rng.uniform(2.0, 20.0))
        assert_scaling_law(P, m, t, rng.uniform(-4.0, 4.0, size=(4, 2)), rng)


def test_conjugate_symmetry(rng):
    pts = np.array([[1.0, 2.0], [3.0, -1.5], [0.0, 4.0]])
    H = heat_kernel_eval(intro_P(), 9.0, pts, rng=rng)
    assert np.all(np.abs(H.imag) <= 1e-10 * abs(heat_kernel_eval(intro_P(), 9.0, (0.0, 0.0), rng=rng)))
    R = random_semi_elliptic(rng)[0].real_part()
    forward = heat_kernel_eval(R, 3.0, pts, rng=rng)
    backward = heat_kernel_eval(R, 3.0, -pts, rng=rng)
    scale = abs(heat_kernel_eval(R, 3.0, (0.0, 0.0), rng=rng))
    np.testing.assert_allclose(backward, np.conj(forward), rtol=0, atol=1e-9 * scale)


def test_twopacket_kernel_on_random_points(rng):
    P = twopacket_P()
    for _ in range(50):
        t = float(rng.uniform(1.0, 100.0))
        x, y = rng.uniform(-5 * t, 5 * t, size=2)
        value = heat_kernel_eval(P, t, (x, y), rng=rng)
        assert abs(value - twopacket_kernel(t, x, y)) <= 1e-8 * abs(twopacket_kernel(t, 0, 0))


def test_target_eps_reaches_the_quadrature():
    P = intro_P()
    loose = solve_quadrature_spec(P, 1.0, target_eps=1e-4, rng=np.random.default_rng(1))
    assert loose.target_eps == 1e-4
    value = heat_kernel_eval(P, 1.0, (1.0, 0.5), target_eps=1e-4, rng=np.random.default_rng(1))
    exact = heat_kernel_eval(P, 1.0, (1.0, 0.5), rng=np.random.default_rng(1))
    assert abs(value - exact) <= 1e-3 * abs(heat_kernel_eval(P, 1.0, (0.0, 0.0)))


def test_tensor_and_separable_paths_agree(rng):
    P = intro_P()
    pts = np.array([[0.0, 0.0], [1.0, 2.0], [-2.0, 0.5]])
    sep = heat_kernel_eval(P, 2.0, pts, separable=True, rng=rng)
    tensor = heat_kernel_eval(P, 2.0, pts, separable=False, rng=rng)
    np.testing.assert_allclose(sep, tensor, atol=1e-10 * abs(sep[0]))


def test_grid_matches_pointwise(rng):
    P = intro_P()
    axes = [np.arange(-3, 4, dtype=float), np.arange(-2, 3, dtype=float)]
    grid = heat_kernel_grid(P, 5.0, axes, rng=rng)
    assert grid.shape == (7, 5)
    assert grid[3, 2] == pytest.approx(heat_kernel_eval(P, 5.0, (0.0, 0.0), rng=rng), rel=1e-9)
    assert grid[0, 4] == pytest.approx(heat_kernel_eval(P, 5.0, (-3.0, 2.0), rng=rng), abs=1e-10 * abs(grid[3, 2]))


def test_node_budget_enforced(rng):
    with pytest.raises(ResourceLimitError):
        heat_kernel_eval(intro_P(), 1.0, (0.0, 0.0), separable=False, max_nodes=100, rng=rng)


# ---------------------------- ATTRACTOR ---------------------------- #

def test_intro_terms(intro_terms):
    assert len(intro_terms) == 2
    assert sorted(round(t.value.real) for t in intro_terms) == [-1, 1]
    for term in intro_terms:
        assert term.drift == pytest.approx((0.0, 0.0), abs=1e-12)
        assert term.P.max_coefficient_difference(intro_P()) <= 1e-10


@pytest.mark.parametrize('n', [10, 11])
def test_intro_attractor_parity(intro_terms, n):
    pts = [(0, 0), (1, 0), (2, -3), (4, 4)]
    H = heat_kernel_eval(intro_P(), n, np.array(pts, dtype=float))
    A = attractor_sum(intro_terms, n, np.array(pts, dtype=float))
    for (x, y), h, a in zip(pts, H, A):
        sign = (-1) ** (x + y + n)
        assert abs(a - (1 + sign) * h) <= 1e-9 * abs(H[0])


def test_attractor_grid_matches_sum(intro_terms):
    box = BoxDomain((-2, -2), (2, 2))
    grid = attractor_grid(intro_terms, 12, box)
    direct = attractor_sum(intro_terms, 12, box.points().astype(float))
    np.testing.assert_allclose(grid.ravel(), direct, atol=1e-10 * np.abs(direct).max())


def test_attractor_sum_rejects_zero_power(intro_terms):
    with pytest.raises(ValueError):
        attractor_sum(intro_terms, 0, (0.0, 0.0))


def test_attractor_term_requires_unit_value():
    with pytest.raises(ValueError):
        AttractorTerm(FrequencyPoint((0.0, 0.0)), 0.5, (0.0, 0.0), intro_P())


# ---------------------------- FOURIER INVERSION ---------------------------- #

def test_inversion_small_power():
    assert fourier_invert_power(intro(), 2, (0, 0)) == pytest.approx(0.265625, abs=1e-14)


def test_inversion_matches_convolution():
    f = intro()
    expected = conv_power(f, 100, method='fft')((3, -7))
    assert abs(fourier_invert_power(f, 100, (3, -7)) - expected) <= 1e-10


def test_inversion_batch_on_twopackets():
    f = twopackets()
    pts = np.array([[0, 0], [5, -3], [-8, 2]])
    power = conv_power(f, 20, method='direct')
    values = fourier_invert_power(f, 20, pts)
    for x, v in zip(pts, values):
        assert abs(v - power(tuple(x))) <= 1e-12


def test_inversion_budget():
    with pytest.raises(ResourceLimitError):
        fourier_invert_power(intro(), 50, (0, 0), max_nodes=1000)
