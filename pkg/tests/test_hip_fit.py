import numpy as np
import pytest
from scipy.special import zeta

from hipengine.errors import InvalidArgument
from hipengine.hip_core import HipParams, simulate
from hipengine.hip_fit import (
    FitConfig,
    FitResult,
    fit,
    forecast,
    mape,
    mape_aggregate,
    objective,
)
from hipengine.series import DailySeries, SeriesKind


def views(values):
    return DailySeries(np.asarray(values, dtype=float), SeriesKind.VIEWS)


def shares(values):
    return DailySeries(np.asarray(values, dtype=float), SeriesKind.SHARES)


def synthetic_video(rng, total_days=120):
    """Noiseless views generated by a random subcritical parameter set."""
    theta = rng.uniform(0.4, 2.5)
    c = rng.uniform(0.5, 5.0)
    n_star = rng.uniform(0.2, 0.85)
    C = n_star / zeta(1 + theta, 1 + c)
    p = HipParams(rng.uniform(0.5, 20.0), C, c, theta)
    s = rng.gamma(2.0, 8.0, size=total_days) * np.exp(
        -np.arange(total_days) / rng.uniform(20, 80)
    )
    v = simulate(p, shares(s), total_days)
    return p, v, shares(s)


class TestObjective:
    def test_zero_on_exact_data(self):
        rng = np.random.default_rng(1)
        p, v, s = synthetic_video(rng)
        assert objective(p, v, s, 90) == pytest.approx(0.0, abs=1e-12)

    def test_hand_arithmetic(self):
        p = HipParams(1.0, 0.0, 1.0, 1.0)
        assert objective(p, views([2, 2]), shares([1, 1]), 2) == pytest.approx(2.0)

    def test_positive_for_perturbed_params(self):
        rng = np.random.default_rng(2)
        p, v, s = synthetic_video(rng)
        p2 = HipParams(p.mu * 1.1, p.C, p.c, p.theta)
        assert objective(p2, v, s, 90) > 0.0

    def test_window_validation(self):
        p = HipParams(1.0, 0.0, 1.0, 1.0)
        with pytest.raises(InvalidArgument):
            objective(p, views([1, 2]), shares([1, 2]), 5)


class TestFit:
    def test_noiseless_recovery_reproduces_series(self):
        rng = np.random.default_rng(10)
        p_true, v, s = synthetic_video(rng)
        result = fit(v, s, FitConfig(seed=123))
        model = simulate(result.params, s.prefix(90), 90)
        obs = v.values[:90]
        rms = np.sqrt(np.mean((model.values - obs) ** 2))
        scale = np.sqrt(np.mean(obs ** 2))
        assert rms / scale <= 1e-3

    def test_all_zero_input_returns_lower_bounds(self):
        cfg = FitConfig(seed=0)
        result = fit(views(np.zeros(120)), shares(np.zeros(120)), cfg)
        lo = [cfg.bounds[k][0] for k in ("mu", "C", "c", "theta")]
        assert result.params.as_tuple() == tuple(lo)
        assert result.objective_value == 0.0

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(11)
        _, v, s = synthetic_video(rng)
        r1 = fit(v, s, FitConfig(seed=7))
        r2 = fit(v, s, FitConfig(seed=7))
        assert r1 == r2

    def test_params_within_bounds(self):
        rng = np.random.default_rng(12)
        _, v, s = synthetic_video(rng)
        cfg = FitConfig(seed=5)
        result = fit(v, s, cfg)
        lo, hi = cfg.bounds_arrays()
        assert np.all(np.asarray(result.params.as_tuple()) >= lo)
        assert np.all(np.asarray(result.params.as_tuple()) <= hi)

    def test_best_of_rounds(self):
        rng = np.random.default_rng(13)
        _, v, s = synthetic_video(rng)
        result = fit(v, s, FitConfig(seed=3))
        assert result.objective_value == min(
            r.final_objective for r in result.rounds
        )
        assert len(result.rounds) == 10

    def test_roundtrip_serialization(self):
        rng = np.random.default_rng(14)
        _, v, s = synthetic_video(rng)
        result = fit(v, s, FitConfig(seed=1))
        assert FitResult.from_dict(result.to_dict()) == result


class TestForecast:
    def test_noiseless_continuation(self):
        rng = np.random.default_rng(20)
        p_true, v, s = synthetic_video(rng)
        result = fit(v, s, FitConfig(seed=42))
        pred = forecast(result, v.prefix(90), s, 90, 120)
        truth = v.values[90:120]
        np.testing.assert_allclose(pred.values, truth, rtol=2e-2)
        assert mape(pred, views(truth)) <= 1.0

    def test_exogenous_only_fit(self):
        result = FitResult(
            params=HipParams(2.0, 0.0, 1.0, 1.0),
            objective_value=0.0, branching_factor=0.0, train_days=90,
            rounds=(), best_round_index=0,
        )
        s = shares(np.arange(1, 11, dtype=float))
        pred = forecast(result, views(np.full(5, 99.0)), s, 5, 10)
        np.testing.assert_allclose(pred.values, 2.0 * s.values[5:10])

    def test_empty_window(self):
        result = FitResult(
            params=HipParams(1.0, 0.0, 1.0, 1.0),
            objective_value=0.0, branching_factor=0.0, train_days=90,
            rounds=(), best_round_index=0,
        )
        pred = forecast(result, views([1, 2, 3]), shares([1, 2, 3]), 3, 3)
        assert len(pred) == 0

    def test_from_day_zero_equals_simulate(self):
        rng = np.random.default_rng(21)
        p, v, s = synthetic_video(rng)
        result = FitResult(
            params=p, objective_value=0.0, branching_factor=0.0,
            train_days=90, rounds=(), best_round_index=0,
        )
        pred = forecast(result, views(np.zeros(0)), s, 0, 60)
        np.testing.assert_allclose(
            pred.values, simulate(p, s.prefix(60), 60).values, rtol=1e-12
        )

    def test_window_validation(self):
        result = FitResult(
            params=HipParams(1.0, 0.0, 1.0, 1.0),
            objective_value=0.0, branching_factor=0.0, train_days=90,
            rounds=(), best_round_index=0,
        )
        with pytest.raises(InvalidArgument):
            forecast(result, views([1]), shares([1, 2]), 5, 10)
        with pytest.raises(InvalidArgument):
            forecast(result, views([1, 2]), shares([1, 2]), 2, 10)


class TestMape:
    def test_exact_prediction(self):
        assert mape(views([1, 2, 3]), views([1, 2, 3])) == 0.0

    def test_ten_percent(self):
        assert mape(views([110]), views([100])) == pytest.approx(10.0)

    def test_zero_denominator_floor(self):
        assert mape(views([3]), views([0])) == pytest.approx(300.0)

    def test_aggregate_variant(self):
        assert mape_aggregate(views([110, 90]), views([100, 100])) == pytest.approx(0.0)
        assert mape_aggregate(views([110]), views([100])) == pytest.approx(10.0)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgument):
            mape(views([1]), views([1, 2]))
