"""
Tests for the Chernoff tail bound, its exponent, the union bounds and the Monte Carlo validator
"""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from suprec.analysis.tail_bounds import (
    chernoff_exponent,
    chernoff_exponent_closed_form,
    chernoff_objective,
    empirical_tail,
    lemma1_bound,
    make_u_profile,
    minimizing_lambda,
    union_bound_growing,
    union_bound_k1,
    validate_bounds_grid,
)
from suprec.models.config_models import TailQuery
from suprec.utils.errors import InvalidConfigError


def query(n, ratio=2.0, alpha=3.0, beta=1.0, sigma_v2=1.0):
    return TailQuery(n=n, alpha=alpha, beta=beta, gamma=(alpha - beta) / ratio, sigma_v2=sigma_v2)


##### Closed-form bound #####

def test_bound_examples():
    """Ratio 2 at n = 20 gives 2^-10, and doubling n squares the bound"""
    assert lemma1_bound(query(20)) == pytest.approx(2.0 ** -10, rel=1e-12)
    assert lemma1_bound(query(40)) == pytest.approx(lemma1_bound(query(20)) ** 2, rel=1e-12)


def test_bound_tends_to_one_at_the_window_edge():
    q = TailQuery(n=10, alpha=3.0, beta=1.0, gamma=1.999999, sigma_v2=1.0)
    assert lemma1_bound(q) == pytest.approx(1.0, abs=1e-4)


def test_bound_decreasing_in_n_and_ratio():
    by_n = [lemma1_bound(query(n)) for n in (1, 5, 10, 50)]
    by_ratio = [lemma1_bound(query(10, ratio=r)) for r in (1.1, 1.5, 2.0, 4.0)]
    assert by_n == sorted(by_n, reverse=True)
    assert by_ratio == sorted(by_ratio, reverse=True)


def test_query_window_checks():
    with pytest.raises(ValueError):
        TailQuery(n=10, alpha=3.0, beta=1.0, gamma=2.0, sigma_v2=1.0)
    with pytest.raises(ValueError):
        TailQuery(n=10, alpha=1.0, beta=1.5, gamma=0.1, sigma_v2=1.0)
    with pytest.raises(ValueError):
        TailQuery(n=10, alpha=3.0, beta=1.0, gamma=1.0, sigma_v2=0.0)


##### Exponent #####

def test_minimizing_lambda_example():
    assert minimizing_lambda(2.0, 1.0, 1.0) == pytest.approx(-0.5, abs=1e-12)


def test_minimizing_lambda_negative_with_finite_limit():
    """lambda* stays negative and tends to -1/(2 gamma) for large theta"""
    for theta in (0.1, 1.0, 10.0, 1e4):
        assert minimizing_lambda(2.0, theta, 1.0) < 0
    assert minimizing_lambda(2.0, 1e8, 0.25) == pytest.approx(-2.0, abs=1e-6)


def test_minimizing_lambda_is_stationary():
    """Central differences of the objective vanish at lambda*"""
    h = 1e-5
    for alpha_s, theta, gamma in [(2.0, 1.0, 1.0), (5.0, 0.3, 1.2), (1.5, 4.0, 0.2), (10.0, 2.0, 3.0)]:
        lam = minimizing_lambda(alpha_s, theta, gamma)
        slope = (
            chernoff_objective(lam + h, alpha_s, theta, gamma)
            - chernoff_objective(lam - h, alpha_s, theta, gamma)
        ) / (2 * h)
        assert abs(slope) < 1e-7


def test_minimizing_lambda_is_optimal_on_a_grid():
    alpha_s, theta, gamma = 3.0, 0.7, 1.1
    best = chernoff_objective(minimizing_lambda(alpha_s, theta, gamma), alpha_s, theta, gamma)
    for lam in np.linspace(-20.0, 0.99 / (2 * theta), 400):
        assert best <= chernoff_objective(float(lam), alpha_s, theta, gamma) + 1e-12


def test_exponent_at_matched_variance():
    """theta = alpha - gamma gives (1/2) log2(alpha / gamma)"""
    for alpha_s, gamma in [(2.0, 1.0), (3.0, 0.5), (10.0, 9.0)]:
        assert chernoff_exponent(alpha_s, alpha_s - gamma, gamma) == pytest.approx(
            0.5 * math.log2(alpha_s / gamma), abs=1e-12
        )


def test_matched_variance_is_the_tightest_theta():
    """Minimizing over theta lands at alpha - gamma with value 1/2 bit for alpha = 2, gamma = 1"""
    result = minimize_scalar(
        lambda t: chernoff_exponent(2.0, t, 1.0), bounds=(1e-6, 10.0), method="bounded",
        options={"xatol": 1e-10},
    )
    assert result.x == pytest.approx(1.0, abs=1e-3)
    assert result.fun == pytest.approx(0.5, abs=1e-9)


def test_closed_form_matches_plug_in():
    rng = np.random.default_rng(4)
    for _ in range(100):
        gamma = float(rng.uniform(0.1, 2.0))
        alpha_s = gamma + float(rng.uniform(0.01, 5.0))
        theta = float(rng.uniform(0.05, 5.0))
        assert chernoff_exponent_closed_form(alpha_s, theta, gamma) == pytest.approx(
            chernoff_exponent(alpha_s, theta, gamma), rel=1e-10, abs=1e-12
        )


def test_exponent_vanishes_as_gamma_reaches_alpha():
    assert chernoff_exponent(2.0, 1.0, 2.0 - 1e-9) == pytest.approx(0.0, abs=1e-6)


def test_exponent_requires_gamma_below_alpha():
    with pytest.raises(InvalidConfigError):
        chernoff_exponent(1.0, 1.0, 2.0)
    with pytest.raises(InvalidConfigError):
        chernoff_objective(1.0, 2.0, 1.0, 1.0)


##### Monte Carlo #####

@pytest.mark.parametrize("profile", ["constant", "ramp", "alternating"])
def test_profiles_have_requested_moment(profile):
    u = make_u_profile(profile, 11, 2.0)
    assert float(np.mean(u ** 2)) == pytest.approx(2.0, rel=1e-12)


def test_unknown_profile():
    with pytest.raises(InvalidConfigError):
        make_u_profile("zigzag", 5, 1.0)


@pytest.mark.parametrize("n", [10, 50, 200])
@pytest.mark.parametrize("ratio", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("sigma_v2", [0.5, 1.0, 2.0])
def test_empirical_tail_below_bound(n, ratio, sigma_v2):
    q = TailQuery(n=n, alpha=2.0, beta=0.5, gamma=1.5 / ratio, sigma_v2=sigma_v2)
    for profile in ("constant", "ramp", "alternating"):
        estimate = empirical_tail(q, profile, 20_000, 20100301)
        se = math.sqrt(max(estimate.estimate * (1 - estimate.estimate), 1e-12) / 20_000)
        assert estimate.estimate <= lemma1_bound(q) + 3 * se


def test_empirical_tail_near_zero_noise():
    """With almost no noise the statistic sits at alpha > gamma"""
    q = TailQuery(n=10, alpha=2.0, beta=0.5, gamma=1.0, sigma_v2=1e-12)
    assert empirical_tail(q, "constant", 1000, 1).estimate == 0.0


def test_empirical_tail_is_reproducible():
    q = query(10)
    assert empirical_tail(q, "ramp", 5000, 8) == empirical_tail(q, "ramp", 5000, 8)


def test_empirical_tail_rejects_u_outside_window():
    q = TailQuery(n=4, alpha=2.0, beta=0.5, gamma=1.0, sigma_v2=1.0)
    with pytest.raises(InvalidConfigError) as info:
        empirical_tail(q, [3.0, 3.0, 3.0, 3.0], 1000, 1)
    assert "9" in str(info.value)


def test_empirical_tail_needs_enough_trials():
    with pytest.raises(InvalidConfigError):
        empirical_tail(query(10), "constant", 999, 1)


def test_validation_grid_small():
    cells = validate_bounds_grid(2000, 3, ns=(10, 20), ratios=(1.0, 2.0), sigma_v2s=(1.0,), profiles=("constant",))
    print(cells)
    assert len(cells) == 4
    invalid = [cell for cell in cells if cell.verdict == "invalid"]
    assert len(invalid) == 2 and all(cell.ratio == 1.0 for cell in invalid)
    assert all(cell.verdict == "pass" for cell in cells if cell.ratio == 2.0)
    bounds = {cell.n: cell.bound for cell in cells if cell.ratio == 2.0}
    assert bounds[10] == pytest.approx(2.0 ** -5)
    assert bounds[20] == pytest.approx(2.0 ** -10)


def test_validation_grid_independent_of_jobs():
    kwargs = dict(ns=(10,), ratios=(1.5, 2.0), sigma_v2s=(0.5, 2.0), profiles=("constant", "ramp"))
    assert validate_bounds_grid(1000, 5, jobs=1, **kwargs) == validate_bounds_grid(1000, 5, jobs=2, **kwargs)


##### Union bounds #####

def test_union_bound_k1_rate_tends_to_threshold():
    """As epsilon -> 0 the exponent rate approaches c(w) = (1/2) log2(1 + w^2)"""
    bound = union_bound_k1(1024, 40, 1.0, 1.0, 1.0, 1e-6)
    assert bound.exponent_rate_bits == pytest.approx(0.5, abs=1e-9)
    assert bound.rate_bits == pytest.approx(0.25)
    assert bound.bound < 1e-2


def test_union_bound_k1_decreasing_in_n():
    bounds = [union_bound_k1(256, n, 1.0, 1.0, 1.0, 0.1).exponent_bits for n in (10, 20, 40, 80)]
    assert bounds == sorted(bounds, reverse=True)


def test_union_bound_k1_needs_gamma_below_alpha():
    with pytest.raises(InvalidConfigError):
        union_bound_k1(256, 10, 0.1, 1.0, 1.0, 0.5)


def test_union_bound_growing():
    small = union_bound_growing(64, 2, 50, 1.0, 1.0, 0.1, 1.0, 0.01)
    large = union_bound_growing(64, 2, 200, 1.0, 1.0, 0.1, 1.0, 0.01)
    assert math.isfinite(small.exponent_bits)
    assert large.exponent_bits < small.exponent_bits
    assert 0.0 <= large.bound <= 1.0
    with pytest.raises(InvalidConfigError):
        union_bound_growing(64, 1, 50, 1.0, 1.0, 0.1, 1.0, 0.01)
