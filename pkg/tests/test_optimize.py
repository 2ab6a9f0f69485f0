import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magic_cd.exceptions import NotNatural
from magic_cd.graph import NodeRecord, build_network
from magic_cd.metrics import coverage_ratio, f1_score
from magic_cd.model.likelihood import Mode, log_likelihood
from magic_cd.model.optimize import FitConfig, fit, line_search_step
from magic_cd.model.sampling import planted_network

from conftest import random_temporal_network


def parabola(x):
    return -(x - 1.0) ** 2


def test_line_search_parabola():
    step = line_search_step(parabola, 0.0, 2.0, step_init=1.0, shrink=0.5)
    # step 1 lands on x=2 with no gain and fails the Armijo test; step 0.5 hits the optimum
    assert step == 0.5
    assert 0 < step * 2.0 < 2 and parabola(step * 2.0) > parabola(0.0)


def test_line_search_zero_gradient():
    assert line_search_step(parabola, 1.0, 0.0) == 0.0


def test_line_search_blocked_by_projection():
    # ascent direction points below zero from the boundary; the projected point does not move
    assert line_search_step(lambda x: -x, 0.0, -1.0) == 0.0


def test_line_search_bad_direction():
    assert line_search_step(parabola, 0.0, -2.0) == 0.0


def test_line_search_vector_projection():
    f = lambda y: -float(np.sum((y - np.array([1.0, -1.0])) ** 2))
    x = np.array([0.0, 0.0])
    g = np.array([2.0, -2.0])
    step = line_search_step(f, x, g)
    y = np.maximum(0, x + step * g)
    assert step > 0 and f(y) > f(x) and y.min() >= 0


def test_fit_config_validation():
    with pytest.raises(ValueError):
        FitConfig(K=0)
    with pytest.raises(ValueError):
        FitConfig(K=2, shrink=1.5)
    assert FitConfig(K=2).with_(K=4).K == 4


def assert_monotone(trace):
    trace = np.asarray(trace)
    steps = np.diff(trace)
    assert np.all(steps >= -1e-9 * np.abs(trace[1:]))


@pytest.mark.parametrize("mode", [Mode.NET, Mode.RAW])
def test_fit_trace_monotone_and_nonnegative(rng, mode):
    net = random_temporal_network(60, rng, density=0.08, n_times=20, natural=mode is Mode.NET)
    model = fit(net, FitConfig(K=3, mode=mode, max_sweeps=40))
    assert_monotone(model.trace)
    assert model.F.min() >= 0 and model.eta.min() >= 0
    assert model.trace[-1] == pytest.approx(log_likelihood(net, model.F, model.eta, mode), rel=1e-12)
    if mode is Mode.RAW:
        assert np.array_equal(model.eta, model.eta.T)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_fit_monotone_property(seed, K):
    rng = np.random.default_rng(seed)
    net = random_temporal_network(25, rng, density=0.15, n_times=10)
    model = fit(net, FitConfig(K=K, max_sweeps=15, seed=seed))
    assert_monotone(model.trace)
    assert model.F.min() >= 0 and model.eta.min() >= 0


def test_fit_strict_rejects_complex_network():
    net = build_network([NodeRecord("a", 2), NodeRecord("b", 1)], [("a", "b")])
    with pytest.raises(NotNatural):
        fit(net, FitConfig(K=1, strict=True))
    with pytest.warns(UserWarning):
        fit(net, FitConfig(K=1, max_sweeps=2))


def test_fit_is_deterministic(rng):
    net = random_temporal_network(40, rng, density=0.1)
    a = fit(net, FitConfig(K=2, max_sweeps=10, seed=3))
    b = fit(net, FitConfig(K=2, max_sweeps=10, seed=3))
    assert np.array_equal(a.F, b.F) and np.array_equal(a.eta, b.eta)


def test_planted_recovery_single_seed():
    net, truth, _, _ = planted_network(300, 3, seed=0)
    model = fit(net, FitConfig(K=3))
    cover = model.cover()
    assert f1_score(cover, truth) >= 0.8
    assert coverage_ratio(cover) >= 0.95
