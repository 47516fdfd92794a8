import numpy as np
import pytest

from trinion.filters import cost_component_gradients, cost_conj_gradient, squared_error_cost
from trinion.hypercomplex import tri_conj, tri_grad_conj, tri_mul, tri_scale

import oracles


def _instance(rng, L):
    return rng.standard_normal((L, 3)), rng.standard_normal((L, 3)), rng.standard_normal(3)


@pytest.mark.parametrize("L", [1, 2, 4])
def test_closed_form_matches_numerical_conj_gradient(L):
    rng = np.random.default_rng(L)
    for _ in range(20):
        w, x, d = _instance(rng, L)
        num = tri_grad_conj(lambda ww: squared_error_cost(ww, x, d), w)
        ana = cost_conj_gradient(w, x, d)
        np.testing.assert_allclose(ana, num, rtol=1e-5, atol=1e-7)


@pytest.mark.parametrize("L", [1, 3, 8])
def test_component_gradients_match_expanded_real_cost(L):
    rng = np.random.default_rng(10 + L)
    for _ in range(10):
        w, x, d = _instance(rng, L)
        num = oracles.central_difference(lambda ww: oracles.expanded_real_cost(ww, x, d), w)
        np.testing.assert_allclose(cost_component_gradients(w, x, d), num.T, rtol=1e-6, atol=1e-7)


def test_expanded_cost_equals_trinion_cost():
    rng = np.random.default_rng(3)
    w, x, d = _instance(rng, 5)
    assert squared_error_cost(w, x, d) == pytest.approx(oracles.expanded_real_cost(w, x, d), rel=1e-13)


def test_zero_error_gives_zero_gradient():
    rng = np.random.default_rng(4)
    w, x, _ = _instance(rng, 3)
    d = tri_mul(w, x).sum(axis=0)
    np.testing.assert_allclose(cost_conj_gradient(w, x, d), 0, atol=1e-14)


def test_positive_sign_version_points_uphill():
    # +(2/3) e conj(x) is the negated gradient: a small step along it raises the cost
    rng = np.random.default_rng(5)
    w, x, d = _instance(rng, 4)
    e = d - tri_mul(w, x).sum(axis=0)
    plus = tri_scale(2 / 3, tri_mul(e[None], tri_conj(x)))
    np.testing.assert_allclose(plus, -cost_conj_gradient(w, x, d))
    j0 = squared_error_cost(w, x, d)
    assert squared_error_cost(w + 1e-4 * plus, x, d) < j0
    assert squared_error_cost(w - 1e-4 * plus, x, d) > j0


def test_conj_gradient_is_combination_of_components():
    rng = np.random.default_rng(6)
    w, x, d = _instance(rng, 3)
    ga, gb, gc = cost_component_gradients(w, x, d)
    # (g_a + ı g_b + ȷ g_c) / 3 with real sub-gradients
    combo = np.stack([ga, np.zeros_like(ga), np.zeros_like(ga)], -1)
    combo = combo + tri_mul(np.array([0.0, 1.0, 0.0]), np.stack([gb, 0 * gb, 0 * gb], -1))
    combo = combo + tri_mul(np.array([0.0, 0.0, 1.0]), np.stack([gc, 0 * gc, 0 * gc], -1))
    np.testing.assert_allclose(combo / 3, cost_conj_gradient(w, x, d), atol=1e-12)
