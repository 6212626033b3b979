import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhl.quadrature import (BudgetError, DivergenceError, geometric_panels,
                            integrate, integrate_batched, integrate_halfline,
                            integrate_pv)


def test_constant():
    assert integrate(lambda x: np.ones_like(x), 0, 1).value == pytest.approx(1.0, abs=1e-12)


def test_odd_symmetry():
    assert integrate(lambda x: x, -1, 1).value == pytest.approx(0.0, abs=1e-12)


def test_endpoint_singularity():
    r = integrate(lambda x: 1.0 / np.sqrt(x), 0, 1, tol=1e-10)
    assert r.value == pytest.approx(2.0, abs=5e-8)


def test_budget_error_carries_partial():
    with pytest.raises(BudgetError) as exc:
        integrate(lambda x: 1.0 / np.sqrt(np.abs(np.sin(1000 * x)) + 1e-14),
                  0, 3, tol=1e-14, budget=500)
    assert exc.value.partial.evaluations <= 500


def test_halfline_exponential():
    assert integrate_halfline(lambda t: np.exp(-t)).value == pytest.approx(1.0, abs=1e-9)


def test_halfline_gamma_half():
    r = integrate_halfline(lambda t: np.exp(-t) / np.sqrt(t))
    assert r.value == pytest.approx(math.sqrt(math.pi), abs=1e-8)


def test_halfline_divergence_detected():
    r = integrate_halfline(lambda t: np.where(t < 1, 1.0 / t, 0.0))
    assert r.diverges and math.isinf(r.value)


def test_halfline_shifted_support():
    r = integrate_halfline(lambda t: 1.0 / t ** 2, support=(10.0, math.inf))
    assert r.value == pytest.approx(0.1, rel=1e-9)


def test_pv_odd():
    r = integrate_pv(lambda x: 1.0 / x, 0.0, -1, 1)
    assert abs(r.value) < 1e-10


def test_pv_off_center():
    # oracle: antiderivative log|x - 1| gives log(1) - log(3)
    r = integrate_pv(lambda x: 1.0 / (x - 1.0), 1.0, -2, 2)
    assert r.value == pytest.approx(-math.log(3.0), abs=1e-9)


def test_pv_even_cos():
    r = integrate_pv(lambda x: np.cos(x) / x, 0.0, -1, 1)
    assert abs(r.value) < 1e-10


def test_pv_non_cancelling_raises():
    with pytest.raises(DivergenceError):
        integrate_pv(lambda x: 1.0 / np.abs(x - 0.5), 0.5, 0, 1)


def test_vector_integrand():
    # one schedule, many components
    coefs = np.array([1.0, 2.0, 3.0])

    def g(x):
        return np.exp(-np.multiply.outer(x, coefs) ** 2 / 2.0)

    r = integrate(g, -30, 30, tol=1e-10)
    expect = math.sqrt(2 * math.pi) / coefs
    assert np.allclose(r.value, expect, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(a, b):
    g = lambda x: np.exp(-x * x)
    h = lambda x: np.cos(x)
    lhs = integrate(lambda x: a * g(x) + b * h(x), 0, 1, tol=1e-10).value
    rhs = a * integrate(g, 0, 1, tol=1e-10).value + b * integrate(h, 0, 1, tol=1e-10).value
    assert lhs == pytest.approx(rhs, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 0.9))
def test_interval_additivity(b):
    g = lambda x: np.sin(3 * x) + x * x
    whole = integrate(g, 0, 1, tol=1e-11).value
    split = integrate(g, 0, b, tol=1e-11).value + integrate(g, b, 1, tol=1e-11).value
    assert whole == pytest.approx(split, abs=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 3.0))
def test_pv_antisymmetry(width):
    # even numerator over a simple pole on a symmetric interval cancels
    r = integrate_pv(lambda x: np.exp(-np.abs(x)) / x, 0.0, -width, width)
    assert abs(r.value) < 1e-9


def test_batched_matches_plain():
    g = lambda x: np.exp(-x) * np.sin(x)
    panels = geometric_panels(0.5, 10.0)
    rb = integrate_batched(g, panels, tol=1e-11)
    rp = integrate(g, 0, 10, tol=1e-11)
    assert rb.value == pytest.approx(rp.value, abs=1e-9)


def test_budget_env_override(monkeypatch):
    from hhl.quadrature import eval_budget
    monkeypatch.setenv("HHL_BUDGET", "1234")
    assert eval_budget() == 1234
    monkeypatch.setenv("HHL_BUDGET", "150")
    with pytest.raises(BudgetError):
        integrate(lambda x: 1.0 / np.sqrt(np.abs(x) + 1e-15), 0, 1, tol=1e-14)
    monkeypatch.delenv("HHL_BUDGET")
    assert eval_budget() == 1_000_000
