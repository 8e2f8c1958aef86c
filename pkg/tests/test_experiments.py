"""Experiment harness: predicted slopes, OLS, round-trips, determinism."""

import pytest

from curverate.errors import DomainValidationError
from curverate.experiments import (
    ExperimentPlan,
    ScalingReport,
    _NUMERATOR_CACHE,
    fit_loglog,
    measure_lattice_set,
    predicted_slope,
    run,
    sharpness_sweep,
)


def test_predicted_slope_examples():
    assert predicted_slope("bump-dilated", 1, 0.2, 0.05, 0.0) == pytest.approx(0.4)
    assert predicted_slope("indicator-band", 1, 0.25, 0.1, 0.0) == pytest.approx(0.4)
    assert predicted_slope("bump-modulated", 1, 0.5, 0.0, 0.25) == pytest.approx(0.0)
    assert predicted_slope("bourgain", 1, 0.5, 0.1, 0.0) == pytest.approx(0.35)
    assert predicted_slope("bourgain", 2, 0.5, 0.0, 0.0) == pytest.approx(1.0 / 3.0)
    assert predicted_slope("bump-tensor", 1, 0.5, 0.1, 0.0, epsilon=0.1) == pytest.approx(0.25)


def test_predicted_slope_affine_coefficients_exact():
    for family, dds, dss in [
        ("bump-dilated", 2.0, -1.0),
        ("bump-modulated", 2.0, -2.0),
        ("indicator-band", 1.0 / 0.25, -1.0),
        ("bourgain", 1.0, -1.0),
        ("bump-tensor", 2.0, -(1.0 + 0.1)),
    ]:
        base = predicted_slope(family, 1, 0.25, 0.1, 0.2, epsilon=0.1)
        assert predicted_slope(family, 1, 0.25, 0.15, 0.2, epsilon=0.1) - base == pytest.approx(
            0.05 * dds
        )
        assert predicted_slope(family, 1, 0.25, 0.1, 0.3, epsilon=0.1) - base == pytest.approx(
            0.1 * dss
        )
    with pytest.raises(DomainValidationError):
        predicted_slope("mystery", 1, 0.5, 0.0, 0.0)


def test_fit_loglog_exact_power_law():
    Rs = [2.0 ** j for j in range(5, 11)]
    for p in (-0.7, 0.0, 0.35, 2.0):
        slope, err = fit_loglog(Rs, [R ** p for R in Rs])
        assert slope == pytest.approx(p, abs=1e-12)
        assert err == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainValidationError):
        fit_loglog([1.0], [1.0])
    with pytest.raises(DomainValidationError):
        fit_loglog([1.0, 2.0], [1.0, -1.0])


def test_plan_validation():
    with pytest.raises(DomainValidationError):
        ExperimentPlan(family="bump-modulated", alpha=0.5, delta=0.5, s=0.0)  # delta >= alpha
    with pytest.raises(DomainValidationError):
        ExperimentPlan(family="bump-dilated", alpha=0.7, delta=0.1, s=0.0)
    with pytest.raises(DomainValidationError):
        ExperimentPlan(family="bump-modulated", alpha=0.5, delta=0.0, s=0.0, R_sequence=(8.0, 4.0, 16.0, 32.0))
    with pytest.raises(DomainValidationError):
        ExperimentPlan(family="nope", alpha=0.5, delta=0.0, s=0.0)


SMALL_PLAN = ExperimentPlan(
    family="indicator-band",
    alpha=0.5,
    delta=0.2,
    s=0.0,
    R_sequence=(8.0, 16.0, 32.0, 64.0),
    x_points=129,
    points_per_octave=4,
)


def test_run_small_plan_structure_and_roundtrip():
    report = run(SMALL_PLAN)
    assert len(report.samples) == 4
    assert all(r > 0 for _, r in report.samples)
    assert report.verdict in ("consistent", "inconsistent")
    text = report.to_json()
    back = ScalingReport.from_json(text)
    assert back.to_json() == text
    assert back.plan == report.plan
    assert back.samples == report.samples


def test_run_deterministic_across_cache_clears():
    r1 = run(SMALL_PLAN)
    _NUMERATOR_CACHE.clear()
    r2 = run(SMALL_PLAN)
    assert r1.to_json() == r2.to_json()


def test_run_deterministic_across_worker_counts():
    from dataclasses import replace

    r1 = run(replace(SMALL_PLAN, workers=1))
    _NUMERATOR_CACHE.clear()
    r2 = run(replace(SMALL_PLAN, workers=4))
    assert r1.to_json() == r2.to_json()


def test_sweep_consistent_with_runs_and_crossing_interpolation():
    s_list = [0.0, 0.3, 0.6]
    rows, crossing = sharpness_sweep(SMALL_PLAN, s_list)
    from dataclasses import replace

    for s, slope in rows:
        direct = run(replace(SMALL_PLAN, s=s))
        assert slope == pytest.approx(direct.fitted_slope, abs=1e-12)
    (s0, m0), (s1, m1) = [(s, m) for s, m in rows if m > 0][-1:] + [
        (s, m) for s, m in rows if m <= 0
    ][:1]
    assert crossing == pytest.approx(s0 + (s1 - s0) * m0 / (m0 - m1))


def test_run_failure_preserves_partial_diagnostics():
    from curverate.errors import AccuracyError
    from curverate.propagator import QuadratureSpec

    plan = ExperimentPlan(
        family="bump-modulated",
        alpha=0.5,
        delta=0.0,
        s=0.0,
        R_sequence=(32.0, 64.0, 128.0, 256.0),
        points_per_octave=4,
        quad=QuadratureSpec(max_nodes=2 ** 13),
    )
    with pytest.raises(AccuracyError) as err:
        run(plan)
    partial = err.value.partial_diagnostics
    assert 1 <= len(partial) < 4
    assert [row["R"] for row in partial] == [32.0, 64.0][: len(partial)]


def test_measure_lattice_set_reports():
    out = measure_lattice_set(64.0, grid_points=24)
    assert set(out) == {"R", "fraction", "lattice_count", "target"}
    assert 0.0 <= out["fraction"] <= 1.0
    assert out["lattice_count"] >= 1
