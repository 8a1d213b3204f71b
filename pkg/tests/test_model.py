import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vetodel.errors import BadDistribution, BadUtility, ConfigError, OutOfDomain
from vetodel.interval import welfare
from vetodel.model import (DelegationSet, LQUtility, Normal, PiecewiseLinearDensity,
                           TabulatedCDF, TabulatedUtility, Uniform01, delegation_value,
                           distribution_from_json, distribution_to_json, example_e1_density,
                           induced_action, kappa, u, u_prime, utility_from_json,
                           utility_to_json, with_param)


@pytest.mark.parametrize("gamma,a,expected", [(0.0, 1.0, 0.0), (0.5, 0.0, -1.0), (1.0, 0.5, -0.25)])
def test_lq_values(gamma, a, expected):
    assert u(LQUtility(gamma), a) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("gamma,a,expected", [(0.0, 1.0, 1.0), (1.0, 1.0, 0.0), (0.5, 0.0, 1.5)])
def test_lq_left_derivative(gamma, a, expected):
    assert u_prime(LQUtility(gamma), a) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("gamma,expected", [(0.0, 0.0), (1.0, 2.0), (0.25, 0.5)])
def test_kappa(gamma, expected):
    assert kappa(LQUtility(gamma)) == expected


def test_gamma_outside_unit_interval_rejected():
    with pytest.raises(BadUtility):
        LQUtility(1.5)


def test_utility_guard_range():
    with pytest.raises(OutOfDomain):
        LQUtility(0.5).u(50.0)


def test_tabulated_utility_matches_linear_loss():
    tab = TabulatedUtility(((-1.0, -2.0), (0.0, -1.0), (1.0, 0.0), (2.0, -1.0)))
    a = np.linspace(0, 1, 11)
    np.testing.assert_allclose(tab.u(a), LQUtility(0.0).u(a), atol=1e-15)
    assert tab.u_prime(1.0) == 1.0
    assert tab.kappa == 0.0


def test_tabulated_utility_rejects_convex_knots():
    with pytest.raises(BadUtility):
        TabulatedUtility(((0.0, -1.0), (0.5, -0.9), (1.0, 0.0)))


def test_uniform_and_normal_basics():
    U = Uniform01()
    assert (U.cdf(0.5), U.pdf(0.5), U.pdf_prime(0.5)) == (0.5, 1.0, 0.0)
    assert Normal(0.45, 1.0).cdf(0.45) == pytest.approx(0.5, abs=1e-15)


def test_bad_normal_rejected():
    with pytest.raises(BadDistribution):
        Normal(0.0, -1.0)


def test_e1_density_has_local_max_at_dip_start():
    d = example_e1_density(0.05, 1.0)
    v = 0.45
    assert d.pdf(v - 1e-4) < d.pdf(v) and d.pdf(v + 1e-4) < d.pdf(v)
    assert d.cdf(1.0) == pytest.approx(1.0, abs=1e-14)


def test_pwl_normalisation_and_derivative():
    d = PiecewiseLinearDensity(((0.0, 1.0), (0.5, 3.0), (1.0, 1.0)))
    xs = np.linspace(0, 1, 2001)
    assert np.trapezoid(d.pdf(xs), xs) == pytest.approx(1.0, abs=1e-6)
    assert d.pdf_prime(0.25) > 0 > d.pdf_prime(0.75)


def test_tabulated_cdf_reproduces_uniform():
    d = TabulatedCDF(tuple((x, x) for x in np.linspace(0, 1, 11)))
    assert d.cdf(0.37) == pytest.approx(0.37, abs=1e-12)
    assert d.pdf(0.37) == pytest.approx(1.0, abs=1e-9)


def test_delegation_value_matches_interval_welfare():
    util, dist = LQUtility(0.3), Normal(0.45, 0.7)
    for c in (0.0, 0.4, 1.0):
        assert delegation_value(util, dist, DelegationSet.interval(c)) == pytest.approx(
            welfare(util, dist, c), abs=1e-10)


def test_induced_action_ties_go_up():
    menu = DelegationSet.from_points([0.6, 1.0])
    assert induced_action(menu, 0.8) == 1.0
    assert induced_action(menu, 0.3) == 0.6
    assert induced_action(menu, 0.2999) == 0.0
    assert induced_action(DelegationSet.interval(0.4), 0.7) == 0.7


def test_json_round_trip_and_field_errors():
    spec = {"family": "normal", "mu": 0.45, "sigma": 1.0}
    assert distribution_to_json(distribution_from_json(spec)) == spec
    assert utility_to_json(utility_from_json({"family": "lq", "gamma": 0.5})) == {
        "family": "lq", "gamma": 0.5}
    with pytest.raises(ConfigError, match="distribution.sigma"):
        distribution_from_json({"family": "normal", "mu": 0.0})
    with pytest.raises(ConfigError, match="utility.beta"):
        utility_from_json({"family": "lq", "gamma": 0.5, "beta": 1})


def test_with_param():
    util, dist = with_param(LQUtility(0.0), Normal(0.45, 1.0), "sigma", 0.2)
    assert dist.sigma == 0.2 and util.gamma == 0.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-1.0, 2.0), st.floats(0.05, 2.0))
def test_lq_concave_and_peaked_at_one(gamma, mu, sigma):
    util = LQUtility(gamma)
    a = np.linspace(-1.0, 2.0, 301)
    vals = util.u(a)
    assert np.argmax(vals) == np.argmin(np.abs(a - 1.0))
    assert np.all(np.diff(vals, 2) <= 1e-12)
    d = Normal(mu, sigma)
    assert np.all(np.diff(d.cdf(a)) >= 0)
