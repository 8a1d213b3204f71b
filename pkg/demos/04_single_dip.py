"""When intervals are not enough.

A V-shaped density puts little mass around its dip. Proposer then prefers
to let low types choose freely, skip the middle, and offer 1 at the top.
"""
from vetodel import LQUtility, solve_interval
from vetodel.interval import stitch_with_default
from vetodel.model import DelegationSet, Normal, delegation_value, single_dipped_density
from vetodel.oracle import best_delegation_structured, make_instance

util, dist = LQUtility(0.0), single_dipped_density(0.6)
best_interval = solve_interval(util, dist)
print(f"best interval: {best_interval.c_set}, W = {best_interval.w_star:.5f}")

for n in (51, 101):
    r = best_delegation_structured(make_instance(util, dist, n, 10 * n - 9))
    pts = r.menu.points
    print(f"grid of {n}: best menu [0, {max(p for p in pts if p < 1):.2f}] U {{1}}, value {r.value:.5f}")

x = max(p for p in r.menu.points if p < 1)
print("continuum value of that menu:",
      round(delegation_value(util, dist, DelegationSet(intervals=((0, x),), points=(1.0,))), 5))

# %% A second veto option above 1 leaves the unimodal solution alone
dist = Normal(0.45, 1.0)
print("c* =", round(solve_interval(util, dist).c_star, 4))
print("menu with a second veto at 1.5:", [round(p, 3) for p in stitch_with_default(util, dist, 1.5).points])
