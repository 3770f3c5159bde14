import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoflow.inertia import (H1, H1_DOT, L2, MetricParams, apply_inertia, inertia_symbol,
                             invert_inertia, lagrangian)
from geoflow.spectral import GridField, make_grid


def test_params_validation():
    with pytest.raises(ValueError):
        MetricParams(0.0, 0.0)
    with pytest.raises(ValueError):
        MetricParams(-1.0, 1.0)
    assert H1_DOT.degenerate and not H1.degenerate and not L2.degenerate


def test_symbol():
    g = make_grid(8)
    np.testing.assert_allclose(inertia_symbol(H1, g), 1 + np.arange(5) ** 2)
    np.testing.assert_allclose(inertia_symbol(L2, g), 1.0)
    np.testing.assert_allclose(inertia_symbol(H1_DOT, g), np.arange(5) ** 2)


def test_apply_on_sine():
    g = make_grid(32)
    u = g.evaluate(lambda x: np.sin(3 * x))
    np.testing.assert_allclose(apply_inertia(H1, u).values, 10 * u.values, atol=1e-12)
    np.testing.assert_allclose(apply_inertia(H1_DOT, u).values, 9 * u.values, atol=1e-12)
    np.testing.assert_array_equal(apply_inertia(L2, u).values, u.values)


@given(st.one_of(st.just(0.0), st.floats(0.05, 3.0)), st.floats(0.1, 3.0), st.integers(0, 2 ** 31))
def test_round_trip(alpha, beta, seed):
    g = make_grid(32)
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=32)
    if alpha == 0:
        vals -= vals.mean()
    u = GridField(g, vals)
    p = MetricParams(alpha, beta)
    back = invert_inertia(p, apply_inertia(p, u))
    assert np.max(np.abs(back.values - u.values)) < 1e-9


def test_degenerate_requires_zero_mean():
    g = make_grid(16)
    m = g.evaluate(lambda x: 1 + np.sin(x))
    with pytest.raises(ValueError, match="zero-mean"):
        invert_inertia(H1_DOT, m)


def test_degenerate_returns_zero_mean_solution():
    g = make_grid(16)
    u = invert_inertia(H1_DOT, g.evaluate(lambda x: np.cos(2 * x)))
    assert abs(u.mean()) < 1e-15
    np.testing.assert_allclose(u.values, np.cos(2 * g.points) / 4, atol=1e-14)


@pytest.mark.parametrize("params,expected", [(L2, np.pi / 2), (H1, np.pi), (H1_DOT, np.pi / 2)])
def test_lagrangian_of_sine(params, expected):
    g = make_grid(32)
    assert lagrangian(params, g.evaluate(np.sin)) == pytest.approx(expected, abs=1e-13)
