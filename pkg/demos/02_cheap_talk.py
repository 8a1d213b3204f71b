"""Talking instead of committing.

Without a menu, Vetoer can send a message first and Proposer then makes a
single offer. With uniform types and quadratic loss the two equilibrium
offers have closed forms: 2/3 when talk is ignored, 2 - sqrt(2) when it
splits types at (1 + a)/2.
"""
import numpy as np

from vetodel import LQUtility, Normal, Uniform01, pareto_compare
from vetodel.cheap_talk import influential_outcome, solve_cheap_talk
from vetodel.model import DelegationSet, induced_action

eq = solve_cheap_talk(LQUtility(1.0), Uniform01())
print("uninformative offer:", eq.a_U, " vs 2/3 =", 2 / 3)
print("informative offer:  ", eq.a_I, " vs 2 - sqrt 2 =", 2 - np.sqrt(2))

# %% The informative equilibrium is the same as offering the menu {a_I, 1}
v = np.linspace(0, 1, 2001)
a = eq.a_I[0]
same = np.array_equal(influential_outcome(a, v), induced_action(DelegationSet.from_points([a, 1]), v))
print("two-message outcome equals menu {a_I, 1} on 2001 types:", same)

# %% Committing to [c*, 1] beats both kinds of talk for both players
for gamma, dist in [(1.0, Uniform01()), (1.0, Normal(0.45, 1.0)), (0.0, Normal(-0.5, 1.0))]:
    rep = pareto_compare(LQUtility(gamma), dist)
    print(f"gamma={gamma} {dist}: c*={rep.c_star:.3f} a_I={np.round(rep.a_I, 3)} "
          f"a_U={np.round(rep.a_U, 3)} Proposer gain={rep.proposer_gain:.4f} "
          f"types strictly better off={rep.vetoer_gain_measure:.3f}")
