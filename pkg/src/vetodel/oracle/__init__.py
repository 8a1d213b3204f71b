"""Brute-force ground truth on finite grids: menu enumeration, the stochastic
linear program, and lottery menus."""
from .delegation import (DelegationResult, best_delegation_exhaustive,
                         best_delegation_structured, deterministic_allocation, menu_value)
from .instance import DiscreteInstance, cell_masses, make_instance, segment_instance
from .lottery import E1Result, Lottery, dip_lottery, example_e1_menu, lottery_menu_value
from .lp import LPResult, Mechanism, best_stochastic_lp, lp_matrices, tableau_text
from .simplex import exact_linprog_max, exact_stochastic_value

__all__ = [
    "DelegationResult", "best_delegation_exhaustive", "best_delegation_structured",
    "deterministic_allocation", "menu_value", "DiscreteInstance", "cell_masses",
    "make_instance", "segment_instance", "E1Result", "Lottery", "dip_lottery",
    "example_e1_menu", "lottery_menu_value", "LPResult", "Mechanism", "best_stochastic_lp",
    "lp_matrices", "tableau_text", "exact_linprog_max", "exact_stochastic_value",
]
