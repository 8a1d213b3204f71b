"""Optimal delegation in veto bargaining.

A Proposer offers a menu of actions, a privately informed Vetoer picks her
favourite or keeps the status quo 0. The package evaluates menus, checks
optimality conditions, solves for optimal interval menus, computes
cheap-talk equilibria, and provides brute-force oracles on finite grids.
"""
from .cheap_talk import (CheapTalkEquilibria, pareto_compare, solve_influential,
                         solve_noninfluential)
from .conditions import (ConditionReport, check_full_delegation, check_interval,
                         check_logconcave, check_no_compromise, check_risk_aversion_threshold)
from .interval import (IntervalSolutionSet, solve_interval, stitch_with_default, sweep,
                       welfare, welfare_foc)
from .model import (DelegationSet, LQUtility, Normal, PiecewiseLinearDensity,
                    TabulatedCDF, TabulatedUtility, Uniform01, delegation_value)

__version__ = "0.1.0"
