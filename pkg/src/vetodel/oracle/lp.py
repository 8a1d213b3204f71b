"""Optimal stochastic mechanism on a grid as a finite linear program."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..errors import Infeasible, TooLarge
from .instance import DiscreteInstance

MAX_VARIABLES = 20000
IC_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Mechanism:
    """Lottery over the instance's action grid for every type (rows)."""

    probs: np.ndarray
    actions: np.ndarray
    types: np.ndarray

    def expected_action(self) -> np.ndarray:
        return self.probs @ self.actions

    def vetoer_matrix(self) -> np.ndarray:
        """``U[i, j]``: payoff of type ``i`` from the lottery assigned to type ``j``."""
        first = self.probs @ self.actions
        second = self.probs @ self.actions ** 2
        return np.outer(self.types, first) - 0.5 * second[None, :]

    def ic_violation(self) -> float:
        """Largest gain any type gets by mimicking another (0 if IC)."""
        U = self.vetoer_matrix()
        return float(max(0.0, np.max(U - np.diag(U)[:, None])))

    def ir_violation(self) -> float:
        U = np.diag(self.vetoer_matrix())
        return float(max(0.0, -np.min(U)))

    def row_sum_error(self) -> float:
        return float(np.max(np.abs(self.probs.sum(axis=1) - 1.0)))

    def to_json(self) -> dict:
        return {"actions": self.actions.tolist(), "types": self.types.tolist(),
                "probs": self.probs.tolist()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class LPResult:
    mechanism: Mechanism
    value: float
    ic_violation: float
    ir_violation: float


def lp_matrices(inst: DiscreteInstance):
    """``(c, A_ub, b_ub, A_eq, b_eq)`` for the minimisation form of the program.

    Variable ``m[i, a]`` is flattened row-major. Constraints: every type
    prefers its own lottery to every other type's, rows sum to one, and the
    lowest type gets the status quo for sure.
    """
    nv, na = inst.n_types, inst.n_actions
    c = -np.kron(inst.weights, inst.proposer_u)
    S = inst.vetoer_payoffs()  # S[i, a] = v_i a - a^2/2
    rows = []
    for i in range(nv):
        for j in range(nv):
            if i == j:
                continue
            r = np.zeros(nv * na)
            r[j * na:(j + 1) * na] = S[i]
            r[i * na:(i + 1) * na] -= S[i]
            rows.append(r)
    A_ub = np.array(rows) if rows else np.zeros((0, nv * na))
    b_ub = np.zeros(len(rows))
    A_eq = np.kron(np.eye(nv), np.ones(na))
    b_eq = np.ones(nv)
    # the lowest type is pinned to the status quo
    pin = np.zeros((na - 1, nv * na))
    zero = inst.index(0.0)
    others = [a for a in range(na) if a != zero]
    pin[np.arange(na - 1), others] = 1.0
    A_eq = np.vstack([A_eq, pin])
    b_eq = np.concatenate([b_eq, np.zeros(na - 1)])
    return c, A_ub, b_ub, A_eq, b_eq


def best_stochastic_lp(inst: DiscreteInstance, tol: float = 1e-10) -> LPResult:
    """Maximise Proposer's expected payoff over IC lottery assignments.

    Solved with the HiGHS dual simplex at tight tolerances, then checked:
    IC and IR must hold within ``1e-9`` and rows must sum to one.
    """
    if inst.n_types * inst.n_actions > MAX_VARIABLES:
        raise TooLarge(f"{inst.n_types * inst.n_actions} variables exceed {MAX_VARIABLES}")
    if inst.types[0] != 0.0 or min(inst.defaults) != 0.0:
        raise ValueError("stochastic program needs type 0 and status quo 0 on the grids")
    c, A_ub, b_ub, A_eq, b_eq = lp_matrices(inst)
    res = optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None),
                           method="highs-ds",
                           options={"primal_feasibility_tolerance": tol,
                                    "dual_feasibility_tolerance": tol, "presolve": True})
    if res.status != 0:
        raise Infeasible(f"linear program failed: {res.message}")
    probs = np.clip(res.x, 0.0, None).reshape(inst.n_types, inst.n_actions)
    mech = Mechanism(probs, inst.actions, inst.types)
    if mech.row_sum_error() > IC_TOL:
        raise Infeasible("solution rows do not sum to one")
    ic, ir = mech.ic_violation(), mech.ir_violation()
    if ic > IC_TOL or ir > IC_TOL:
        raise Infeasible(f"solution violates IC ({ic:.3g}) or IR ({ir:.3g})")
    value = float(-res.fun + inst.outside_value)
    return LPResult(mech, value, ic, ir)


def tableau_text(inst: DiscreteInstance) -> str:
    """Plain-text dump of the program for external solvers.

    Format: a header line, the objective (maximise), then one line per
    constraint ``<kind> <rhs> : <coefficients>`` with kind ``<=`` or ``=``.
    Variables are ``m[i, a]`` in row-major order; all are nonnegative.
    """
    c, A_ub, b_ub, A_eq, b_eq = lp_matrices(inst)
    g = "%.17g"
    lines = [f"# maximise; {inst.n_types} types x {inst.n_actions} actions; x >= 0",
             "max " + " ".join(g % x for x in -c)]
    for row, rhs in zip(A_ub, b_ub):
        lines.append("<= " + g % rhs + " : " + " ".join(g % x for x in row))
    for row, rhs in zip(A_eq, b_eq):
        lines.append("= " + g % rhs + " : " + " ".join(g % x for x in row))
    return "\n".join(lines) + "\n"
