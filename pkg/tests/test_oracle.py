import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vetodel.errors import BadDelta, TooLarge
from vetodel.interval import welfare
from vetodel.model import LQUtility, Normal, Uniform01, example_e1_density, single_dipped_density
from vetodel.oracle import (DiscreteInstance, Lottery, best_delegation_exhaustive,
                            best_delegation_structured, best_stochastic_lp,
                            deterministic_allocation, example_e1_menu, exact_linprog_max,
                            exact_stochastic_value, lottery_menu_value, make_instance,
                            menu_value, tableau_text)

L0 = LQUtility(0.0)


def test_instance_weights_and_outside_value():
    d = Normal(0.45, 1.0)
    inst = make_instance(L0, d, 11, 21)
    assert inst.weights.sum() == pytest.approx(d.cdf(1.0) - d.cdf(0.0), abs=1e-14)
    assert 0.0 in inst.actions and 1.0 in inst.actions
    back = DiscreteInstance.from_json(json.loads(inst.dumps()))
    np.testing.assert_array_equal(back.weights, inst.weights)


def test_exhaustive_uniform_flat():
    r = best_delegation_exhaustive(make_instance(L0, Uniform01(), 11, 21))
    assert r.value == pytest.approx(-0.5, abs=0.03)
    assert r.n_ties > 1
    inst = make_instance(L0, Uniform01(), 11, 21)
    assert menu_value(inst, inst.actions[1:]) == pytest.approx(r.value, abs=1e-12)
    assert menu_value(inst, [1.0]) == pytest.approx(r.value, abs=1e-12)


def test_exhaustive_decreasing_density_gives_full_grid():
    inst = make_instance(L0, Normal(-0.5, 1.0), 11, 21)
    r = best_delegation_exhaustive(inst)
    np.testing.assert_allclose(r.menu.points, inst.actions[1:])


def test_exhaustive_right_shifted_gives_no_compromise():
    r = best_delegation_exhaustive(make_instance(L0, Normal(1.5, 0.5), 11, 21))
    assert r.menu.points == (1.0,)


def test_exhaustive_size_limit():
    with pytest.raises(TooLarge):
        best_delegation_exhaustive(make_instance(L0, Uniform01(), 23, 5))


def test_structured_examples():
    inst = make_instance(L0, Uniform01(), 21, 41)
    assert best_delegation_structured(inst).value == pytest.approx(-0.5, abs=0.03)
    d = Normal(0.45, 1.0)
    s = best_delegation_structured(make_instance(L0, d, 101, 1001))
    from vetodel.interval import solve_interval
    assert s.value == pytest.approx(solve_interval(L0, d).w_star, abs=5e-3)


def test_structured_single_dipped_cross_checked_by_enumeration():
    inst = make_instance(L0, single_dipped_density(0.6), 16, 301)
    s = best_delegation_structured(inst)
    e = best_delegation_exhaustive(inst)
    assert s.value == pytest.approx(e.value, abs=1e-12)
    pts = s.menu.points
    assert pts[-1] == 1.0 and pts[-2] < 0.6


def test_lp_dominates_deterministic_and_matches_full_delegation():
    inst = make_instance(L0, Uniform01(), 11, 11)
    lp = best_stochastic_lp(inst)
    assert lp.value >= best_delegation_exhaustive(inst).value - 1e-9
    d = Normal(-0.5, 1.0)
    inst = make_instance(L0, d, 11, 21, tail=(-1.0, -0.5))
    full = menu_value(inst, inst.actions[inst.actions > 0])
    assert best_stochastic_lp(inst).value == pytest.approx(full, abs=1e-7)


def test_lp_strictly_beats_menus_under_dip():
    inst = make_instance(L0, example_e1_density(0.05), 11, 41, extra_actions=(0.1,))
    assert best_stochastic_lp(inst).value > best_delegation_exhaustive(inst).value + 1e-6


def test_lp_mechanism_invariants():
    inst = make_instance(LQUtility(0.5), Normal(0.45, 0.5), 11, 21, tail=(-2.0, -1.0))
    r = best_stochastic_lp(inst)
    m = r.mechanism
    assert m.row_sum_error() <= 1e-9 and m.ic_violation() <= 1e-9 and m.ir_violation() <= 1e-9
    assert np.all(np.diff(m.expected_action()) >= -1e-9)
    assert m.probs[0, inst.index(0.0)] == pytest.approx(1.0)
    json.loads(m.dumps())


def test_exact_simplex_small_program():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    val, x = exact_linprog_max([1, 1], [[1, 2], [3, 1]], [4, 6], np.zeros((0, 2)), [])
    assert val == pytest.approx(2.8) and (x[0], x[1]) == (pytest.approx(1.6), pytest.approx(1.2))


@pytest.mark.parametrize("dist", [Uniform01(), Normal(0.45, 0.5), example_e1_density(0.05)])
def test_exact_simplex_agrees_with_highs(dist):
    inst = make_instance(LQUtility(0.3), dist, 6, 7, tail=(-1.0,))
    assert float(exact_stochastic_value(inst)) == pytest.approx(best_stochastic_lp(inst).value,
                                                                abs=1e-9)


def test_tableau_dump_shape():
    inst = make_instance(L0, Uniform01(), 3, 3)
    lines = tableau_text(inst).splitlines()
    assert lines[1].startswith("max ")
    assert sum(ln.startswith("<=") for ln in lines) == 3 * 2
    assert sum(ln.startswith("= ") for ln in lines) == 3 + 2


def test_deterministic_allocation_is_ic():
    from vetodel.oracle import Mechanism
    inst = make_instance(L0, Normal(0.45, 1.0), 11, 21)
    m = Mechanism(deterministic_allocation(inst, [0.5, 0.7, 1.0]), inst.actions, inst.types)
    assert m.ic_violation() <= 1e-12


def test_example_e1():
    r = example_e1_menu(0.05)
    assert r.p == pytest.approx(1 / 1.8) and r.tail == pytest.approx(0.1)
    assert r.gain > 0 and r.half_menu_loss > 0
    assert r.gain == pytest.approx(r.gain_closed_form, abs=1e-12)
    assert abs(example_e1_menu(1e-4).gain) < 1e-7
    with pytest.raises(BadDelta):
        example_e1_menu(0.3)


def test_lottery_menu_value_reduces_to_menus():
    d = Normal(0.45, 1.0)
    assert lottery_menu_value(L0, d, [Lottery.sure(1.0)]) == pytest.approx(welfare(L0, d, 1.0),
                                                                         abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-0.5, 1.5), st.floats(0.2, 1.0))
def test_sandwich(gamma, mu, sigma):
    util, dist = LQUtility(gamma), Normal(mu, sigma)
    inst = make_instance(util, dist, 9, 13)
    s = best_delegation_structured(inst).value
    e = best_delegation_exhaustive(inst).value
    lp = best_stochastic_lp(make_instance(util, dist, 9, 13, tail=(-1.0,))).value
    assert s <= e + 1e-9 <= lp + 2e-9
