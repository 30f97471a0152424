import math

import numpy as np
import pytest
from scipy import stats

from resil.errors import ValidationError
from resil.model import (
    ConstantRestore,
    EventModel,
    ExponentialRestore,
    LognormalRestore,
    OutageModel,
    area_closed_form,
    mean_performance,
    mean_restore_time,
    mean_outage_time,
    nadir,
)
from resil.montecarlo import (
    ConstantQuantity,
    SampleListQuantity,
    SimulationConfig,
    block_generator,
    default_count,
    estimate_mean_area,
    estimate_mean_curve,
    grid_agreement,
    sample_event,
    simulate,
    uniform_grid,
)

# 99.9% one-sample Kolmogorov-Smirnov critical value, asymptotic form
KS_999 = 1.95


def test_degenerate_lognormal_collapses_to_median():
    m = EventModel(5, OutageModel(2.0), LognormalRestore(0.3, 0.7, 1e-8))
    ev = sample_event(m, 1000, rng=np.random.default_rng(1))
    np.testing.assert_allclose(ev.restore_times, 0.3 + math.exp(0.7), rtol=1e-6)


def test_narrow_constant_restore_support():
    eps = 1e-6
    m = EventModel(5, OutageModel(2.0), ConstantRestore(3.0 - eps, 3.0))
    ev = sample_event(m, 5000, rng=np.random.default_rng(2))
    assert np.all((ev.restore_times >= 3.0 - eps) & (ev.restore_times <= 3.0))
    assert np.all((ev.outage_times >= 0) & (ev.outage_times <= 2.0))


def test_exponential_restores_after_first_restore():
    m = EventModel(5, OutageModel(2.0), ExponentialRestore(1.5, 0.2))
    ev = sample_event(m, 5000, rng=np.random.default_rng(3))
    assert ev.restore_times.min() >= 1.5


@pytest.mark.parametrize(
    "restore",
    [LognormalRestore(0.52, 1.64, 1.56), ExponentialRestore(0.4, 3.0), ConstantRestore(0.2, 4.0)],
)
def test_restore_samples_follow_closed_form_cdf(restore):
    m = EventModel(14, OutageModel(2.69), restore)
    ev = sample_event(m, 10_000, rng=block_generator(99, 0))
    d = stats.kstest(ev.restore_times, lambda t: np.asarray(restore.cdf(t))).statistic
    assert d < KS_999 / math.sqrt(10_000)


def test_sample_list_quantities_drawn_from_list():
    m = EventModel(30, OutageModel(2.0), ExponentialRestore(0.0, 1.0))
    ev = sample_event(m, 500, SampleListQuantity((1.0, 4.0, 9.0)), np.random.default_rng(4))
    assert set(ev.quantities.tolist()) <= {1.0, 4.0, 9.0}


def test_default_count():
    m = EventModel(13.5, OutageModel(2.0), ExponentialRestore(0.0, 1.0))
    assert default_count(m) == 14
    assert default_count(m, ConstantQuantity(4.5)) == 3
    assert default_count(m, ConstantQuantity(100.0)) == 1


def test_curve_is_exact_at_start_and_after_all_restores(typical_model):
    cfg = SimulationConfig(2000, 5, (0.0, 1e9))
    curve = estimate_mean_curve(typical_model, cfg)
    assert curve.mean.tolist() == [0.0, 0.0]
    assert curve.stderr.tolist() == [0.0, 0.0]


def test_typical_event_curve_at_end_of_outages(typical_model):
    cfg = SimulationConfig(100_000, 2024, (2.69,))
    curve = estimate_mean_curve(typical_model, cfg)
    target = mean_performance(typical_model, 2.69)
    assert abs(curve.mean[0] - target) <= 4 * curve.stderr[0]


def test_typical_event_mean_area(typical_model):
    est = estimate_mean_area(typical_model, SimulationConfig(100_000, 17))
    assert abs(est.mean - area_closed_form(typical_model)) <= 4 * est.stderr


def test_zero_area_model():
    m = EventModel(10, OutageModel(3.0), ConstantRestore(0.0, 3.0))
    est = estimate_mean_area(m, SimulationConfig(20_000, 8))
    assert abs(est.mean) <= 4 * est.stderr


def test_random_quantity_expectation_identity():
    m = EventModel(100, OutageModel(2.0), LognormalRestore(0.5, 0.8, 0.9))
    qm = SampleListQuantity((10.0, 250.0, 40.0, 5.0))
    cfg = SimulationConfig(20_000, 31, quantity_model=qm, n=20)
    est = estimate_mean_area(m, cfg)
    expected = 20 * qm.mean * (mean_restore_time(m) - mean_outage_time(m))
    assert abs(est.mean - expected) <= 4 * est.stderr


def test_deterministic_across_runs_and_workers(typical_model):
    grid = uniform_grid(30.0, 20)
    a = simulate(typical_model, SimulationConfig(3000, 42, grid))
    b = simulate(typical_model, SimulationConfig(3000, 42, grid))
    c = simulate(typical_model, SimulationConfig(3000, 42, grid, workers=4))
    for other in (b, c):
        assert other.area == a.area
        assert other.curve.mean.tobytes() == a.curve.mean.tobytes()
        assert other.curve.stderr.tobytes() == a.curve.stderr.tobytes()
        assert other.realized_nadir_mean == a.realized_nadir_mean


def test_area_does_not_depend_on_grid(typical_model):
    a = simulate(typical_model, SimulationConfig(1500, 3, uniform_grid(10.0, 5))).area
    b = simulate(typical_model, SimulationConfig(1500, 3)).area
    assert a == b


def test_different_seeds_differ(typical_model):
    a = estimate_mean_area(typical_model, SimulationConfig(600, 1))
    b = estimate_mean_area(typical_model, SimulationConfig(600, 2))
    assert a.mean != b.mean


def test_single_realization_has_no_stderr(typical_model):
    res = simulate(typical_model, SimulationConfig(1, 0, (0.0, 3.0)))
    assert math.isnan(res.area.stderr)
    assert np.isnan(res.curve.stderr).all()


def test_mean_of_realized_nadirs_exceeds_nadir_of_mean(typical_model):
    res = simulate(typical_model, SimulationConfig(20_000, 12))
    assert res.realized_nadir_mean >= nadir(typical_model).value


def test_positive_fraction_reported():
    # restores crowd the start of the outage window, so realizations overshoot
    m = EventModel(10, OutageModel(10.0), ExponentialRestore(0.0, 0.5))
    res = simulate(m, SimulationConfig(2000, 6, uniform_grid(10.0, 20)))
    assert 0.0 < res.positive_fraction < 1.0


def test_curve_agrees_with_analytic_pointwise():
    m = EventModel(25, OutageModel(4.0), ExponentialRestore(1.0, 2.5))
    grid = uniform_grid(12.0, 49)
    curve = estimate_mean_curve(m, SimulationConfig(10_000, 77, grid))
    assert grid_agreement(curve, mean_performance(m, np.array(grid))).all()


@pytest.mark.parametrize(
    "kw",
    [
        {"realizations": 0, "seed": 1},
        {"realizations": 10, "seed": -1},
        {"realizations": 10, "seed": 2**64},
        {"realizations": 10, "seed": 1, "grid": (2.0, 1.0)},
        {"realizations": 10, "seed": 1, "grid": (-1.0,)},
        {"realizations": 10, "seed": 1, "n": 0},
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValidationError):
        SimulationConfig(**kw)


def test_zero_spread_points_use_resolution_bound():
    # restores are ~6 sigma away at t=4.4, so every realization sits at -n_c
    m = EventModel(26, OutageModel(3.22), LognormalRestore(3.13, 2.17, 0.32))
    curve = estimate_mean_curve(m, SimulationConfig(10_000, 3, (4.4,)))
    analytic = mean_performance(m, np.array([4.4]))
    assert curve.stderr[0] == 0.0 and curve.mean[0] != analytic[0]
    assert grid_agreement(curve, analytic).all()
    assert not grid_agreement(curve, analytic + 0.02).all()
