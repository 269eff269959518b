"""
Tests for envelopes, constant fitting and local-limit error decay.
"""

import math

import numpy as np
import pytest

from config import Config
from models.bounds import trend_is_bounded, trend_is_unbounded
from models.lattice import BoxDomain, LatticeFunction
from utils.analysis import analyze_function, attractor_terms, envelope_spec, shift_terms
from utils.bounds import (decay_slope, envelope_eval, far_field_check, fit_constant, gaussian_data,
                          llt_error_data, llt_error_function, regression, sup_statistic)
from utils.builtins import GAMMA, intro, srw1d, twopackets
from utils.lattice import conv_power


def _analysis(builtin):
    return analyze_function(builtin(), rng=np.random.default_rng(99))


@pytest.fixture(scope='module')
def intro_result():
    return _analysis(intro)


@pytest.fixture(scope='module')
def twopacket_result():
    return _analysis(twopackets)


@pytest.fixture(scope='module')
def intro_gauss_data():
    return gaussian_data(intro(), Config.GAUSS_N_LIST)


# ---------------------------- TRENDS ---------------------------- #

def test_trend_classification():
    assert trend_is_bounded([1.0, 2.0, 3.0, 3.0])
    assert not trend_is_bounded([1.0, 1.0, 1.0, 5.0])
    assert not trend_is_bounded([1.0, 1.0])
    assert trend_is_unbounded([1.0, 1.0, 1.0, 5.0])
    assert trend_is_unbounded([1.0, 1.0, 1.0, math.inf])
    assert not trend_is_unbounded([3.0, 2.0, 1.0, 1.0])


def test_regression_needs_four_points():
    slope, stderr = regression([1, 2, 3], [1.0, 0.5, 0.33])
    assert math.isnan(slope) and math.isnan(stderr)
    slope, _ = regression([1, 2, 4, 8], [1.0, 0.25, 1 / 16, 1 / 64])
    assert slope == pytest.approx(-2.0)


# ---------------------------- ENVELOPES ---------------------------- #

def test_intro_envelope_at_origin(intro_result):
    spec = envelope_spec(intro_result, use_lambda=False, C=0.3, M=0.5)
    assert envelope_eval(spec, 100, (0, 0)) == pytest.approx(2 * 0.3 * 100 ** -0.75, rel=1e-12)
    assert envelope_eval(spec, 100, (0, 0)) == pytest.approx(0.018974, abs=1e-6)


def test_envelope_is_monotone_in_constants(intro_result):
    spec = envelope_spec(intro_result, use_lambda=False, C=0.3, M=0.5)
    X = np.array([[5, 5], [20, -3], [0, 30]])
    base = envelope_eval(spec, 100, X)
    np.testing.assert_allclose(envelope_eval(spec.with_constants(C=0.6), 100, X), 2 * base, rtol=1e-12)
    assert np.all(envelope_eval(spec.with_constants(M=1.0), 100, X) < base)


def test_twopacket_envelope_on_packet_center(twopacket_result):
    spec = envelope_spec(twopacket_result, use_lambda=True, C=0.15, M=0.3)
    value = envelope_eval(spec, 100, (0, round(100 * GAMMA)))
    assert value == pytest.approx(2 * 0.15 * 100 ** -1.5, rel=0.1)


def test_envelope_rejects_zero_power(intro_result):
    with pytest.raises(ValueError):
        envelope_eval(envelope_spec(intro_result, use_lambda=False), 0, (0, 0))


# ---------------------------- GAUSSIAN BOUND ---------------------------- #

def test_intro_gaussian_constant(intro_result, intro_gauss_data):
    spec = envelope_spec(intro_result, use_lambda=False)
    (fit,) = fit_constant(intro_gauss_data, spec, [0.5])
    assert fit.M == 0.5
    assert fit.sup_C <= 0.3
    assert fit.bounded
    assert fit.to_dict()['sup_C'] == fit.sup_C


def test_simple_walk_constant_is_finite():
    result = _analysis(srw1d)
    data = gaussian_data(srw1d(), range(10, 101, 10))
    (fit,) = fit_constant(data, envelope_spec(result, use_lambda=False), [0.5])
    assert math.isfinite(fit.sup_C)
    assert fit.bounded


def test_shifted_drift_is_unbounded(intro_result, intro_gauss_data):
    spec = envelope_spec(intro_result, use_lambda=False, drift_shift=(0.2, 0.0))
    (fit,) = fit_constant(intro_gauss_data, spec, [0.5])
    assert fit.unbounded
    assert not fit.bounded


def test_fit_requires_data(intro_result):
    with pytest.raises(ValueError):
        fit_constant({}, envelope_spec(intro_result, use_lambda=False), [0.5])


# ---------------------------- LOCAL LIMIT ---------------------------- #

@pytest.mark.parametrize('n', [100, 1000])
def test_intro_error_under_envelope(intro_result, n):
    window = BoxDomain.cube(-50, 50, 2)
    error = llt_error_function(intro(), attractor_terms(intro_result), n, window)
    spec = envelope_spec(intro_result, use_lambda=True, C=0.042, M=0.15)
    env = envelope_eval(spec, n, window.points())
    assert np.all(np.abs(error.values_on(window)).ravel() <= env)


def test_twopacket_llt_constant(twopacket_result):
    terms = attractor_terms(twopacket_result)
    data = llt_error_data(twopackets(), terms, range(20, 201, 20))
    (fit,) = fit_constant(data, envelope_spec(twopacket_result, use_lambda=True), [0.3])
    assert fit.sup_C <= 0.15


@pytest.mark.parametrize('builtin, expected', [(intro, -1.25), (twopackets, -1.5)])
def test_error_decay_slope(builtin, expected):
    result = _analysis(builtin)
    fit = decay_slope(builtin(), attractor_terms(result), Config.LLT_N_LIST)
    assert fit.slope == pytest.approx(expected, abs=0.15)
    assert fit.window == (Config.LLT_N_LIST[0], Config.LLT_N_LIST[-1])


def test_shifted_attractor_stops_decaying(intro_result):
    terms = shift_terms(attractor_terms(intro_result), (0.2, 0.0))
    fit = decay_slope(intro(), terms, Config.LLT_N_LIST)
    assert fit.slope > -1.25 + 0.15


def test_decay_without_terms_is_on_diagonal_decay():
    fit = decay_slope(intro(), [], [16, 32, 64, 128], halfwidth=4, regression_window=(16, 128))
    assert fit.slope == pytest.approx(-0.75, abs=0.1)


def test_decay_window_defaults_to_given_powers():
    fit = decay_slope(intro(), [], [8, 16, 32, 64], halfwidth=4)
    assert fit.window == (8, 64)
    assert math.isfinite(fit.slope)
    assert fit.slope == pytest.approx(-0.75, abs=0.05)


def test_decay_slope_needs_four_powers(intro_result):
    with pytest.raises(ValueError):
        decay_slope(intro(), attractor_terms(intro_result), [50, 100, 200])


def test_sup_statistic_excludes_vanishing_errors():
    data = {n: LatticeFunction.from_entries(1, {(0,): 1.0 / n}) for n in (1, 2, 4, 8)}
    data[16] = LatticeFunction.from_entries(1, {})
    fit = sup_statistic(data, regression_window=(1, 16))
    assert fit.excluded == (16,)
    assert fit.slope == pytest.approx(-1.0)


# ---------------------------- FAR FIELD ---------------------------- #

def test_far_field_support():
    record = far_field_check(intro(), 7)
    assert record.L == 2
    assert record.holds
    assert record.support_hi == (14, 14)


def test_far_field_with_precomputed_power():
    f = twopackets()
    record = far_field_check(f, 5, power=conv_power(f, 5))
    assert record.holds and record.L == 1


def test_sup_statistic_window_defaults_to_data():
    data = {n: LatticeFunction.from_entries(1, {(0,): float(n) ** -2}) for n in (2, 3, 5, 7)}
    fit = sup_statistic(data)
    assert fit.window == (2, 7)
    assert fit.slope == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        sup_statistic({})
