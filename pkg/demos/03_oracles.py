"""Brute force on a grid: are the certified menus really optimal?

On a finite grid we can enumerate every menu and solve a linear program
over all incentive-compatible lotteries. When a condition checker certifies
a menu, the lottery optimum should not beat it beyond discretisation error.
"""
from vetodel import LQUtility, Normal, Uniform01, welfare
from vetodel.conditions import check_full_delegation
from vetodel.model import example_e1_density
from vetodel.oracle import (best_delegation_exhaustive, best_delegation_structured,
                            best_stochastic_lp, example_e1_menu, exact_stochastic_value,
                            make_instance)

# %% Decreasing density: full delegation is certified
util, dist = LQUtility(0.0), Normal(-0.5, 1.0)
print("full delegation certified:", check_full_delegation(util, dist).verdict)
for grid in [(11, 21), (21, 41), (41, 81)]:
    inst = make_instance(util, dist, *grid, tail=(-2.0, -1.0, -0.5))
    lp = best_stochastic_lp(inst).value
    print(f"  grid {grid}: lottery optimum {lp:.6f}  excess over W(0) {lp - welfare(util, dist, 0):.2e}")

# %% Deterministic searches sit below the lottery optimum
inst = make_instance(LQUtility(0.5), Normal(0.45, 0.5), 11, 21)
print("structured", round(best_delegation_structured(inst).value, 9),
      "<= exhaustive", round(best_delegation_exhaustive(inst).value, 9),
      "<= lotteries", round(best_stochastic_lp(inst).value, 9))

# %% Exact rational arithmetic agrees with the floating-point solver
small = make_instance(LQUtility(0.3), Uniform01(), 6, 7, tail=(-1.0,))
exact = exact_stochastic_value(small)
print("exact optimum", exact, "=", float(exact), " HiGHS:", best_stochastic_lp(small).value)

# %% A short decreasing stretch in the density: a lottery helps
r = example_e1_menu(0.05)
print(f"lottery: low action {r.tail:.2f} w.p. {r.p:.4f}, else 1")
print(f"  gain of {{lottery, 1}} over {{1}}: {r.gain:.3e} (closed form {r.gain_closed_form:.3e})")
print(f"  loss of {{1/2, 1}} against {{1}}: {r.half_menu_loss:.3e}")
inst = make_instance(LQUtility(0.0), example_e1_density(0.05), 11, 41)
print("  on a grid, lotteries beat the best menu by",
      best_stochastic_lp(inst).value - best_delegation_exhaustive(inst).value)
