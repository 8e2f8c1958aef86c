"""Propagator: closed-form oracles, symmetry identities, accuracy contract."""

import math

import numpy as np
import pytest

from curverate.curves import CurveSpec, MINUS_SHIFT, PLUS_SHIFT, STRAIGHT
from curverate.errors import AccuracyError, DomainValidationError
from curverate.initial_data import (
    bourgain_profile,
    bump_dilated,
    gaussian_like,
    indicator_band,
    sobolev_norm,
    zero_profile,
)
from curverate.propagator import (
    QuadratureSpec,
    batch_values,
    certified_value,
    evaluate,
    evaluate_grid,
)

STRAIGHT_1D = CurveSpec(STRAIGHT, alpha=1.0)
TWO_PI = 2.0 * math.pi


def gaussian_closed_form(x, t):
    """(2 pi)^{-1} integral e^{i(x xi + t xi^2)} e^{-xi^2} dxi, exact."""
    z = 1.0 - 1j * t
    return (1.0 / TWO_PI) * np.sqrt(np.pi / z) * np.exp(-x * x / (4.0 * z))


def test_quadrature_spec_validation():
    with pytest.raises(DomainValidationError):
        QuadratureSpec(base_nodes=32)
    with pytest.raises(DomainValidationError):
        QuadratureSpec(max_nodes=128)
    with pytest.raises(DomainValidationError):
        QuadratureSpec(panel_order=2)


def test_time_zero_identity_exact():
    for profile in (gaussian_like(), bump_dilated(32.0), indicator_band(16.0)):
        s = evaluate(profile, STRAIGHT_1D, 2.0, 0.37, 0.0)
        assert s.value == s.initial


@pytest.mark.parametrize("x,t", [(0.3, 0.2), (0.0, 0.5), (-1.1, 0.05), (2.0, 1.0)])
def test_gaussian_closed_form_agreement(x, t):
    s = evaluate(gaussian_like(), STRAIGHT_1D, 2.0, x, t)
    assert abs(s.value - gaussian_closed_form(x, t)) < 1e-6


def test_modulation_covariance_identity():
    eta0 = 3.7
    shifted = gaussian_like(center=eta0)
    base = gaussian_like()
    for x, t in ((0.2, 0.3), (-0.4, 0.07), (0.1, 0.9)):
        a = evaluate(shifted, STRAIGHT_1D, 2.0, x, t).value
        b = evaluate(base, STRAIGHT_1D, 2.0, x + 2.0 * t * eta0, t).value
        assert abs(abs(a) - abs(b)) < 1e-8


def test_conservation_upper_bound_and_trend():
    profile = gaussian_like()
    mass = sobolev_norm(profile, 0.0) ** 2 / TWO_PI
    totals = []
    for L in (15.0, 30.0):
        xs = np.linspace(-L, L, int(40 * L))
        vals, _, _ = batch_values(profile, STRAIGHT_1D, 2.0, xs, [0.2])
        totals.append(float(np.sum(np.abs(vals[:, 0]) ** 2) * (xs[1] - xs[0])))
    for tot in totals:
        assert tot <= mass + 1e-6
    assert abs(totals[1] - mass) <= abs(totals[0] - mass) + 1e-12


def test_small_time_continuity_trend():
    curve = CurveSpec(MINUS_SHIFT, alpha=0.5)
    diffs = []
    for j in range(10, 21):
        s = evaluate(gaussian_like(), curve, 2.0, 0.3, 2.0 ** -j)
        diffs.append(abs(s.value - s.initial))
    assert all(b <= a for a, b in zip(diffs, diffs[1:]))
    assert diffs[-1] < 1e-4


def test_indicator_band_lower_bound_example():
    # plus-shift, alpha = 1/2, t0 = c R^{-2} with c = 0.01, x = 0.005
    curve = CurveSpec(PLUS_SHIFT, alpha=0.5)
    t0 = 0.01 * 8.0 ** -2
    s = evaluate(indicator_band(8.0), curve, 2.0, 0.005, t0)
    assert abs(s.value - s.initial) >= 0.01 ** 0.5 / (8.0 * math.pi)


def test_domain_errors():
    with pytest.raises(DomainValidationError):
        evaluate(gaussian_like(), STRAIGHT_1D, -1.0, 0.0, 0.1)
    with pytest.raises(DomainValidationError):
        evaluate(gaussian_like(), STRAIGHT_1D, 2.0, 0.0, 1.5)
    with pytest.raises(DomainValidationError):
        evaluate(bourgain_profile(16.0, d=2), CurveSpec(MINUS_SHIFT, alpha=0.5, d=2), 1.5,
                 np.array([0.1, 0.2]), 0.1)


def test_node_cap_accuracy_error_carries_both_estimates():
    tight = QuadratureSpec(base_nodes=64, max_nodes=128)
    with pytest.raises(AccuracyError) as err:
        evaluate(gaussian_like(), STRAIGHT_1D, 2.0, 40.0, 1.0, tight)
    assert err.value.coarse is not None and err.value.fine is not None


def test_fractional_dispersion_runs():
    s = evaluate(indicator_band(8.0), CurveSpec(PLUS_SHIFT, alpha=0.4), 1.5, 0.01, 1e-4)
    assert abs(s.value) > 0.0
    s2 = evaluate(gaussian_like(), STRAIGHT_1D, 0.5, 0.2, 0.3)
    assert abs(s2.value) > 0.0


def test_evaluate_grid_matches_pointwise_and_collects_failures():
    profile = gaussian_like()
    xs = [0.0, 0.4]
    ts = [0.0, 0.25]
    samples, failures = evaluate_grid(profile, STRAIGHT_1D, 2.0, xs, ts)
    assert not failures
    assert len(samples) == 4
    for s in samples:
        direct = evaluate(profile, STRAIGHT_1D, 2.0, s.x, s.t)
        assert s.value == direct.value and s.initial == direct.initial

    tight = QuadratureSpec(base_nodes=64, max_nodes=256)
    samples, failures = evaluate_grid(profile, STRAIGHT_1D, 2.0, [0.0, 40.0], [0.01], tight)
    assert len(failures) == 1 and len(samples) == 1
    assert failures[0][0] == 40.0


def test_batch_matches_pointwise():
    curve = CurveSpec(MINUS_SHIFT, alpha=0.5)
    profile = bump_dilated(64.0)
    xs = np.array([0.02, 0.05, 0.11])
    ts = [1e-5, 1e-4, 2.0 ** -9]
    vals, init, counts = batch_values(profile, curve, 2.0, xs, ts)
    mass = sobolev_norm(profile, 0.0)  # magnitude scale
    for i, x in enumerate(xs):
        direct0 = evaluate(profile, curve, 2.0, float(x), 0.0)
        assert abs(init[i] - direct0.value) < 5e-9 * max(1.0, mass)
        for j, t in enumerate(ts):
            v, _ = certified_value(profile, curve, 2.0, float(x), float(t))
            assert abs(vals[i, j] - v) < 5e-9


def test_batch_zero_profile():
    vals, init, _ = batch_values(zero_profile(), STRAIGHT_1D, 2.0, np.array([0.1, 0.2]), [0.1])
    assert np.all(vals == 0.0) and np.all(init == 0.0)


def test_cost_model_large_grid_stays_under_node_cap():
    # 10^3 x-points by 10^2 t-points on bump-dilated at R = 2^7: every
    # sample's doubled node budget stays below the default cap
    from curverate.initial_data import coordinate_factors
    from curverate.propagator import DEFAULT_QUAD, _node_budget, phase_variation

    (factor,) = coordinate_factors(bump_dilated(128.0))
    worst = 0
    for x in np.linspace(-1.0, 1.0, 10):       # |gamma| <= 1 + t^alpha <= 2
        for t in np.linspace(0.0, 1.0, 10):
            V = phase_variation(abs(x) + 1.0, t, 2.0, factor)
            worst = max(worst, 2 * _node_budget(V, DEFAULT_QUAD))
    assert worst <= DEFAULT_QUAD.max_nodes


def test_bourgain_d2_product_evaluation():
    profile = bourgain_profile(64.0, d=2)
    curve = CurveSpec(MINUS_SHIFT, alpha=0.5, d=2)
    s = evaluate(profile, curve, 2.0, np.array([-0.3, 0.2]), 0.002)
    assert np.isfinite(abs(s.value)) and abs(s.value) > 0.0
