"""Interval menus: how much discretion should Proposer leave?

Proposer offers every action in [c, 1]; Vetoer, whose ideal point v is
private, picks the nearest offered action or keeps the status quo 0.
"""
import numpy as np

from vetodel import LQUtility, Normal, Uniform01, solve_interval, welfare
from vetodel.conditions import check_full_delegation, check_interval, check_no_compromise
from vetodel.interval import welfare_grid

# %% Uniform types and linear loss: every threshold is equally good
util, dist = LQUtility(0.0), Uniform01()
print("W(c) for uniform types, linear loss:",
      np.round(welfare_grid(util, dist, np.linspace(0, 1, 6)), 12))
sol = solve_interval(util, dist)
print("optimal thresholds:", sol.c_set, "flat:", sol.flat)

# %% Quadratic loss makes Proposer risk averse, and full discretion wins
sol = solve_interval(LQUtility(1.0), dist)
print("quadratic loss:", sol.c_set, "W* =", round(sol.w_star, 12))

# %% A normal prior centred below 1/2 gives an interior threshold
dist = Normal(0.45, 1.0)
sol = solve_interval(LQUtility(0.0), dist)
print(f"Normal(0.45, 1): c* = {sol.c_star:.6f}, W* = {sol.w_star:.6f}")
print("  interval conditions hold at c*:", check_interval(LQUtility(0.0), dist, sol.c_star).verdict)
print("  full delegation certified:", check_full_delegation(LQUtility(0.0), dist).verdict)
print("  no compromise certified:", check_no_compromise(LQUtility(0.0), dist).verdict)

# %% Shrinking the spread: Proposer nearly knows v = 0.45 and the threshold
# creeps up toward the take-it-or-leave-it offer 0.9, but slowly
for sigma in (1.0, 0.1, 0.03, 0.01, 1e-3, 1e-4):
    c = solve_interval(LQUtility(0.0), Normal(0.45, sigma)).c_star
    print(f"  sigma = {sigma:<7g} c* = {c:.4f}")

# %% Risk aversion pushes the threshold down
for gamma in np.linspace(0, 1, 6):
    c = solve_interval(LQUtility(gamma), dist).c_star
    print(f"  gamma = {gamma:.1f}  c* = {c:.4f}  W(c*) = {welfare(LQUtility(gamma), dist, c):.5f}")
