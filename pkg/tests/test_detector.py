"""Windowed detector response: quadrature, transforms, bookkeeping, decay."""

import math

import numpy as np
import pytest

from adiavac.background import ScaleFactorModel
from adiavac.detector import (
    COINCIDENCE_DENSITY,
    WindowFunction,
    _simpson_weights,
    bound_exponent,
    detector_response,
    slope_fit,
)
from adiavac.errors import CutoffInadequate, InsufficientPoints

from oracles import polynomial_integral, window_transform

STATIC = ScaleFactorModel.constant(1.0)


def test_simpson_weights_integrate_cubics_exactly():
    # composite Simpson is exact on cubics, so the only discrepancy
    # against the symbolic integral is rounding
    coeffs = [0.3, -1.0, 2.5, 0.7]
    lo, hi = -1.0, 2.0
    xs = np.linspace(lo, hi, 13)
    ys = sum(c * xs**j for j, c in enumerate(coeffs))
    w = _simpson_weights(13, xs[1] - xs[0])
    assert w @ ys == pytest.approx(polynomial_integral(coeffs, lo, hi), rel=1e-14)
    with pytest.raises(ValueError):
        _simpson_weights(12, 0.1)
    with pytest.raises(ValueError):
        _simpson_weights(1, 0.1)


def test_window_shapes():
    bump = WindowFunction("smooth_bump", 0.0, 4.0)
    assert bump.support == (0.0, 4.0)
    assert bump(2.0) == 1.0
    assert bump(0.0) == 0.0 and bump(4.0) == 0.0
    assert bump(-0.5) == 0.0 and bump(4.5) == 0.0
    taus = np.linspace(0.0, 4.0, 101)
    vals = bump(taus)
    assert np.all(vals >= 0.0) and np.max(vals) == 1.0
    np.testing.assert_allclose(vals, vals[::-1], atol=1e-15)  # even about center

    g = WindowFunction("gaussian_truncated", -1.0, 1.0, rel_width=0.5)
    assert g(0.0) == 1.0
    assert g(0.5) == pytest.approx(math.exp(-0.5))
    assert g(1.0) == 0.0 and g(-1.0) == 0.0


def test_window_validation():
    with pytest.raises(ValueError):
        WindowFunction("hann", 0.0, 1.0)
    with pytest.raises(ValueError):
        WindowFunction("smooth_bump", 1.0, 1.0)
    with pytest.raises(ValueError):
        WindowFunction("gaussian_truncated", 0.0, 1.0, rel_width=0.0)
    with pytest.raises(ValueError):
        WindowFunction("gaussian_truncated", 0.0, 1.0, rel_width=1.5)


def test_bound_exponent_table():
    assert bound_exponent(0) is None
    assert bound_exponent(1) == 0
    assert bound_exponent(2) == 2
    assert bound_exponent(3) == 4


def test_transform_against_mpmath_quadrature():
    # one static channel compared with direct mpmath integration of the
    # same windowed oscillatory integral
    window = WindowFunction("smooth_bump", 0.0, 4.0)
    energies = np.array([2.0, 3.5, 5.0])
    curve = detector_response(STATIC, 1.0, 0, 0.0, window, energies, 8, tol=1e-10)
    assert curve.cutoff_adequate
    col = curve.ks.index(3)
    om3 = 4.0  # k(k+2) + 1 = 16 on the unit static background
    for i, E in enumerate(energies):
        I_o = window_transform(window, float(E), om3, 1.0, 0.0)
        expect = 16.0 * COINCIDENCE_DENSITY * abs(I_o) ** 2
        assert curve.contributions[i, col] == pytest.approx(expect, rel=5e-3)
    # the curve is the degeneracy-weighted sum of the per-mode terms
    np.testing.assert_allclose(
        curve.values, curve.contributions.sum(axis=1), rtol=1e-12
    )
    assert np.all(curve.values >= 0.0)


def test_translation_invariance_on_static_background():
    # shifting window and preparation time together only rotates the
    # transform phase, so F is unchanged on a constant background
    energies = np.geomspace(3.0, 8.0, 6)
    c1 = detector_response(
        STATIC, 1.0, 0, 0.0, WindowFunction("smooth_bump", 0.0, 8.0), energies, 20
    )
    c2 = detector_response(
        STATIC, 1.0, 0, 2.0, WindowFunction("smooth_bump", 2.0, 10.0), energies, 20
    )
    np.testing.assert_allclose(c1.values, c2.values, rtol=1e-6)


def test_cutoff_adequacy_gate():
    window = WindowFunction("smooth_bump", 0.0, 4.0)
    energies = np.array([5.0, 7.0])
    with pytest.raises(CutoffInadequate):
        detector_response(STATIC, 1.0, 0, 0.0, window, energies, 5, tol=1e-8)
    curve = detector_response(
        STATIC, 1.0, 0, 0.0, window, energies, 5, tol=1e-8, require_adequate=False
    )
    assert not curve.cutoff_adequate


def test_massless_sum_starts_at_one():
    window = WindowFunction("smooth_bump", 0.0, 4.0)
    curve = detector_response(
        STATIC, 0.0, 0, 0.0, window, np.array([1.0, 2.0]), 10, tol=1e-8
    )
    assert curve.ks[0] == 1


def test_energy_grid_validation():
    window = WindowFunction("smooth_bump", 0.0, 2.0)
    for bad in [np.array([]), np.array([-1.0, 2.0]), np.array([2.0, 1.0]),
                np.array([[1.0, 2.0]])]:
        with pytest.raises(ValueError):
            detector_response(STATIC, 1.0, 0, 0.0, window, bad, 30)


def test_unresolved_channels_are_reported_not_certified():
    # gaussian window against energies far below the high channels: their
    # transforms sit under the quadrature resolution floor and must land
    # in unresolved_ks instead of failing the Richardson check
    window = WindowFunction("gaussian_truncated", 0.0, 16.0, rel_width=0.15)
    energies = np.array([0.8, 1.0])
    curve = detector_response(STATIC, 1.0, 0, 0.0, window, energies, 40, tol=1e-8)
    assert len(curve.unresolved_ks) > 0
    assert set(curve.unresolved_ks) <= set(curve.ks)
    # the transform probes the window at E + omega_k, so only the first
    # few channels stay above the floor at these energies
    assert {0, 1}.isdisjoint(curve.unresolved_ks)
    assert max(curve.unresolved_ks) == 40
    assert np.all(curve.values >= 0.0)
    assert curve.quadrature_rel_err <= 1e-3


def test_restricted_reaggregates_contributions():
    window = WindowFunction("smooth_bump", 0.0, 6.0)
    energies = np.geomspace(2.0, 6.0, 5)
    curve = detector_response(STATIC, 1.0, 1, 0.0, window, energies, 25)
    sub = curve.restricted(12)
    assert sub.K == 12
    assert sub.ks == tuple(range(0, 13))
    np.testing.assert_allclose(
        sub.values, curve.contributions[:, :13].sum(axis=1), rtol=1e-12
    )
    assert curve.restricted(25) is curve
    assert curve.restricted(99) is curve
    # the dropped tail is positive, so the restricted curve sits below
    assert np.all(sub.values <= curve.values)


def test_static_ground_state_decay_is_fast():
    # scaled-down version of the full-curve check: on the static vacuum
    # the windowed response must fall faster than any few powers of E
    window = WindowFunction("smooth_bump", 0.0, 16.0)
    energies = np.geomspace(5.0, 10.0, 10)
    curve = detector_response(
        STATIC, 1.0, 0, 0.0, window, energies, 60, tol=1e-6, chunk_size=32
    )
    assert curve.cutoff_adequate
    fit = slope_fit(curve, (5.0, 10.0))
    assert fit.slope < -6.0
    assert np.all(curve.values > 0.0)


def test_slope_fit_needs_enough_points():
    window = WindowFunction("smooth_bump", 0.0, 4.0)
    energies = np.geomspace(2.0, 6.0, 9)
    curve = detector_response(STATIC, 1.0, 0, 0.0, window, energies, 20)
    fit = slope_fit(curve, (2.0, 6.0))
    assert math.isfinite(fit.slope)
    with pytest.raises(InsufficientPoints):
        slope_fit(curve, (2.0, 3.0))


def test_chunking_and_workers_do_not_change_values():
    window = WindowFunction("smooth_bump", 0.0, 6.0)
    energies = np.geomspace(2.0, 5.0, 5)
    base = detector_response(STATIC, 1.0, 0, 0.0, window, energies, 24, chunk_size=64)
    threaded = detector_response(
        STATIC, 1.0, 0, 0.0, window, energies, 24, chunk_size=8, workers=3
    )
    serial = detector_response(
        STATIC, 1.0, 0, 0.0, window, energies, 24, chunk_size=8, workers=1
    )
    # identical chunking must be bitwise reproducible regardless of threads
    assert np.array_equal(threaded.values, serial.values)
    # different chunking changes tau grids, so only quadrature-level agreement
    np.testing.assert_allclose(base.values, serial.values, rtol=5e-3)
