"""Maximal module: time grids, critical times, suprema, local bounds."""

import math

import numpy as np
import pytest

from curverate.curves import CurveSpec, MINUS_SHIFT, PLUS_SHIFT
from curverate.errors import DomainValidationError, ResolutionError, WindowError
from curverate.exponents import LIPSCHITZ, Regime
from curverate.initial_data import (
    BOURGAIN,
    BUMP_DILATED,
    BUMP_MODULATED,
    BUMP_TENSOR,
    INDICATOR_BAND,
    bump_dilated,
    gaussian_like,
    indicator_band,
    zero_profile,
)
from curverate.maximal import (
    MaximalField,
    TimeGrid,
    admissible_window,
    calibrate_window_constant,
    critical_time,
    l2_over_ball,
    lemma_bound,
    lemma_empirical,
    lemma_profile,
    maximal_field,
    rate_ceiling_demo,
    rate_weighted_sup,
    window_grid,
)

MINUS_HALF = CurveSpec(MINUS_SHIFT, alpha=0.5)
PLUS_HALF = CurveSpec(PLUS_SHIFT, alpha=0.5)


def test_time_grid_basics():
    grid = TimeGrid(2, 4, points_per_octave=2)
    ts = grid.times()
    assert np.all(np.diff(ts) > 0)
    assert ts.min() == pytest.approx(2.0 ** -4) and ts.max() == pytest.approx(0.25)
    with pytest.raises(DomainValidationError):
        TimeGrid(3, 1)
    with pytest.raises(DomainValidationError):
        TimeGrid(None, 4)
    with pytest.raises(DomainValidationError):
        TimeGrid(injected=(2.0,))
    dropped = TimeGrid(injected=(2.0, 0.5), allow_outside=True)
    assert list(dropped.times()) == [0.5]
    with pytest.raises(DomainValidationError):
        TimeGrid().times()  # totally empty


def test_critical_time_dilated_example():
    assert critical_time(BUMP_DILATED, MINUS_HALF, 64.0, 0.0, 0.04) == pytest.approx(
        0.0016, abs=1e-18
    )


def test_critical_time_modulated_linear_case_matches_closed_form():
    curve = CurveSpec(MINUS_SHIFT, alpha=1.0)
    R = 32.0
    for x in (0.01, 0.2, 0.77):
        t = critical_time(BUMP_MODULATED, curve, R, 0.0, x)
        assert t == pytest.approx(x / (1.0 + 2.0 * R * R), rel=1e-12)


def test_critical_time_modulated_bisection_vs_scan_oracle():
    R, x = 256.0, 0.005
    t = critical_time(BUMP_MODULATED, MINUS_HALF, R, 0.0, x)
    h = lambda tt: x - tt ** 0.5 - 2.0 * R * R * tt
    assert abs(h(t)) <= 1e-10 * x
    # million-point scan oracle brackets the same root
    ts = np.linspace(0.0, 0.008 * R ** -2, 1_000_001)
    hs = x - np.sqrt(ts) - 2.0 * R * R * ts
    k = int(np.argmax(hs <= 0.0))
    assert ts[k - 1] <= t <= ts[k]
    # lies in (0, c R^{-2}) for the window constant c = 0.008 of this x
    assert 0.0 < t < 0.008 * R ** -2


def test_critical_time_tensor_and_indicator():
    assert critical_time(BUMP_TENSOR, MINUS_HALF, 16.0, 0.1, 0.02) == pytest.approx(
        0.02 / 16.0 ** 1.1
    )
    t0 = critical_time(INDICATOR_BAND, PLUS_HALF, 16.0, 0.0, 0.0, window_constant=0.01)
    assert t0 == pytest.approx(0.01 / 256.0)


def test_critical_time_bourgain_root():
    R = 64.0
    for x in (-0.9, -0.5):
        t = critical_time(BOURGAIN, MINUS_HALF, R, 0.0, x)
        assert abs(x - t ** 0.5 + 2.0 * R * t) <= 1e-10 * abs(x)


def test_critical_time_window_errors():
    with pytest.raises(WindowError):
        critical_time(BUMP_DILATED, MINUS_HALF, 64.0, 0.0, -0.1)
    with pytest.raises(WindowError):
        critical_time(BOURGAIN, MINUS_HALF, 64.0, 0.0, 0.5)
    with pytest.raises(DomainValidationError):
        critical_time(INDICATOR_BAND, MINUS_HALF, 64.0, 0.0, 0.0)  # wrong curve kind


def test_rate_weighted_sup_dominates_grid_members():
    from curverate.propagator import evaluate

    profile = bump_dilated(16.0)
    grid = TimeGrid(4, 10, points_per_octave=3, local_refinement=False)
    sup, arg = rate_weighted_sup(profile, MINUS_HALF, 2.0, 0.0, 0.05, grid)
    for t in grid.times():
        s = evaluate(profile, MINUS_HALF, 2.0, 0.05, float(t))
        assert sup >= abs(s.value - s.initial) - 1e-12
    assert any(abs(arg - t) < 1e-12 for t in grid.times())


def test_rate_weighted_sup_monotone_in_grid_and_delta():
    profile = bump_dilated(16.0)
    coarse = TimeGrid(4, 10, points_per_octave=2, local_refinement=False)
    fine = TimeGrid(4, 10, points_per_octave=4, local_refinement=False)
    s_coarse, _ = rate_weighted_sup(profile, MINUS_HALF, 2.0, 0.0, 0.05, coarse)
    s_fine, _ = rate_weighted_sup(profile, MINUS_HALF, 2.0, 0.0, 0.05, fine)
    assert s_fine >= s_coarse - 1e-15  # octave grid of ppo 4 contains the ppo-2 grid
    s_d0, _ = rate_weighted_sup(profile, MINUS_HALF, 2.0, 0.0, 0.05, coarse)
    s_d2, _ = rate_weighted_sup(profile, MINUS_HALF, 2.0, 0.2, 0.05, coarse)
    assert s_d2 >= s_d0 - 1e-15  # t <= 1 so t^{-delta} grows with delta


def test_rate_weighted_sup_indicator_lower_bound():
    R, c = 256.0, 0.01
    t0 = critical_time(INDICATOR_BAND, PLUS_HALF, R, 0.0, 0.005, window_constant=c)
    grid = TimeGrid(injected=(t0,), local_refinement=False)
    sup, arg = rate_weighted_sup(indicator_band(R), PLUS_HALF, 2.0, 0.0, 0.005, grid)
    assert sup >= c ** 0.5 / (8.0 * math.pi)
    assert arg == pytest.approx(t0)


def test_l2_over_ball_examples():
    xs = window_grid(-1.0, 1.0, 256)
    fld = MaximalField(xs, np.full(256, 3.0), np.full(256, 0.5), 0.0, (0.0, 1.0))
    assert l2_over_ball(fld) == pytest.approx(3.0 * math.sqrt(2.0), rel=1e-12)
    fld2 = MaximalField(xs, np.full(256, 6.0), np.full(256, 0.5), 0.0, (0.0, 1.0))
    assert l2_over_ball(fld2) == pytest.approx(2.0 * l2_over_ball(fld), rel=1e-12)
    zero = MaximalField(xs, np.zeros(256), np.full(256, 0.5), 0.0, (0.0, 1.0))
    assert l2_over_ball(zero) == 0.0
    coarse = MaximalField(window_grid(-1.0, 1.0, 16), np.ones(16), np.ones(16), 0.0, (0.0, 1.0))
    with pytest.raises(ResolutionError):
        l2_over_ball(coarse)


def test_l2_self_convergence_under_x_refinement():
    R, c = 64.0, 0.04
    lo, hi = admissible_window(INDICATOR_BAND, R, 0.5, 0.0, c)
    curve = PLUS_HALF
    vals = {}
    for n in (512, 1024):
        xs = window_grid(lo, hi, n)
        tc = np.full(n, critical_time(INDICATOR_BAND, curve, R, 0.0, 0.0, window_constant=c))
        grid = TimeGrid(8, 16, points_per_octave=4, local_refinement=False)
        fld = maximal_field(indicator_band(R), curve, 2.0, 0.1, xs, grid, critical_times=tc)
        vals[n] = l2_over_ball(fld)
    assert abs(vals[1024] - vals[512]) / vals[512] < 0.01


def test_lemma_bound_values():
    high = Regime(d=1, alpha=0.5, m=2)
    # the bound is 2^{(2k-j)/4}: at k=8, j=8 this is 2^2 = 4
    assert lemma_bound(high, 8, 8) == pytest.approx(4.0)
    assert lemma_bound(high, 8, 16) == pytest.approx(1.0)
    low = Regime(d=1, alpha=0.25, m=2)
    assert lemma_bound(low, 8, 32) == pytest.approx(1.0)
    assert lemma_bound(low, 8, 16) == pytest.approx(2.0 ** 2)
    mid = Regime(d=1, alpha=0.3, m=2)
    assert lemma_bound(mid, 10, 10) == pytest.approx(2.0 ** 2.5)
    assert lemma_bound(mid, 10, 12) == pytest.approx(2.0 ** 2.0)
    assert lemma_bound(mid, 10, 13) == pytest.approx(2.0 ** 2.0)  # flat middle case
    lip = Regime(d=2, alpha=1, m=2, smoothness=LIPSCHITZ)
    assert lemma_bound(lip, 6, 9) == pytest.approx(2.0 ** (3.0 * 2.0 / 6.0))


def test_lemma_bound_range_errors():
    high = Regime(d=1, alpha=0.5, m=2)
    with pytest.raises(DomainValidationError):
        lemma_bound(high, 8, 7)
    with pytest.raises(DomainValidationError):
        lemma_bound(high, 8, 17)
    low = Regime(d=1, alpha=0.25, m=2)
    with pytest.raises(DomainValidationError):
        lemma_bound(low, 8, 15)
    from curverate.errors import UnsupportedRegimeError

    with pytest.raises(UnsupportedRegimeError):
        lemma_bound(Regime(d=1, alpha=0.5, m=1.5), 8, 8)


def test_lemma_empirical_nested_monotone():
    regime = Regime(d=1, alpha=0.5, m=2)
    curve = MINUS_HALF
    js = [5, 7, 10]
    prof = lemma_profile(regime, 5, js, curve, points_per_octave=4, pad_octaves=4)
    assert prof[5] >= prof[7] >= prof[10] > 0.0
    single = lemma_empirical(regime, 5, 7, curve, points_per_octave=4, pad_octaves=4)
    assert single > 0.0


def test_general_curve_falls_back_to_pointwise_sup():
    from curverate.curves import CUSTOM
    from curverate.propagator import batch_values

    wobble = CurveSpec(CUSTOM, alpha=0.5, gamma_fn=lambda x, t: x - (1 + 0.05 * x) * t ** 0.5)
    profile = bump_dilated(16.0)
    grid = TimeGrid(4, 8, points_per_octave=2, local_refinement=False)
    sup, arg = rate_weighted_sup(profile, wobble, 2.0, 0.0, 0.05, grid)
    assert sup > 0.0 and 2.0 ** -8 <= arg <= 2.0 ** -4
    with pytest.raises(DomainValidationError):
        batch_values(profile, wobble, 2.0, np.array([0.05]), [0.01])


def test_lemma_empirical_rejects_higher_dimensions():
    lip2 = Regime(d=2, alpha=1, m=2, smoothness=LIPSCHITZ)
    with pytest.raises(DomainValidationError):
        lemma_empirical(lip2, 5, 7, CurveSpec(MINUS_SHIFT, alpha=1.0))


def test_rate_ceiling_demo():
    curve = MINUS_HALF
    pairs, running = rate_ceiling_demo(zero_profile(), curve, j_lo=4, j_hi=8)
    assert all(r == 0.0 for _, r in pairs)
    pairs, running = rate_ceiling_demo(gaussian_like(), curve, x_star=0.3, j_lo=4, j_hi=12)
    assert running[-1] > 0.0
    assert running[-1] <= min(r for _, r in pairs) + 1e-18
    with pytest.raises(DomainValidationError):
        rate_ceiling_demo(gaussian_like(), CurveSpec("straight"))


def test_calibrate_window_constants_deterministic():
    assert calibrate_window_constant(BUMP_MODULATED, 0.5, R_min=64.0) == 0.9
    assert calibrate_window_constant(BUMP_MODULATED, 0.5, R_min=32.0) == 0.9
    with pytest.raises(WindowError):
        calibrate_window_constant(BUMP_MODULATED, 0.5, R_min=16.0)  # R too small
    assert calibrate_window_constant(BUMP_DILATED, 0.2, R_min=32.0, R_max=1024.0) == 3.2
    assert calibrate_window_constant(INDICATOR_BAND, 0.25) == 0.01
    assert calibrate_window_constant(INDICATOR_BAND, 0.5) == 0.04
    assert calibrate_window_constant(BUMP_TENSOR, 0.5) == 0.04
    assert calibrate_window_constant(BOURGAIN, 0.5) == 0.9


def test_admissible_windows():
    assert admissible_window(BUMP_MODULATED, 64.0, 0.5, 0.0, 0.4) == (0.2, 0.4)
    lo, hi = admissible_window(BUMP_DILATED, 64.0, 0.2, 0.0, 3.2)
    assert lo == pytest.approx(1.6 * 64.0 ** -0.4) and hi == pytest.approx(3.2 * 64.0 ** -0.4)
    assert admissible_window(INDICATOR_BAND, 64.0, 0.25, 0.0, 0.01) == (-0.01, 0.01)
    assert admissible_window(BOURGAIN, 64.0, 0.5, 0.0, 0.9) == (-0.9, -0.45)
