"""Optimal deterministic menus on a grid, by enumeration and by structured search."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import TooLarge
from ..model import DelegationSet
from .instance import DiscreteInstance

MAX_EXHAUSTIVE = 22
TIE_TOL = 1e-12
_CHUNK_ELEMS = 2_000_000


@dataclass(frozen=True)
class DelegationResult:
    menu: DelegationSet
    value: float
    n_ties: int = 1

    def to_json(self) -> dict:
        return {"menu": list(self.menu.points),
                "value": self.value, "n_ties": self.n_ties}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def menu_value(inst: DiscreteInstance, menu) -> float:
    """Proposer's value when each type picks the nearest of ``menu`` and the defaults.

    Ties between equidistant actions go to the one Proposer prefers.
    """
    acts = np.unique(np.concatenate([np.asarray(menu, float), inst.defaults]))
    idx = np.searchsorted(inst.actions, acts)
    u = inst.proposer_u[np.clip(idx, 0, inst.n_actions - 1)]
    u = np.where(np.isclose(inst.actions[np.clip(idx, 0, inst.n_actions - 1)], acts,
                            rtol=0, atol=1e-12), u, np.nan)
    if np.any(np.isnan(u)):
        raise ValueError("menu contains actions off the instance grid")
    return _value_sorted(inst, acts, u)


def _value_sorted(inst, acts, u) -> float:
    v = inst.types
    j = np.searchsorted(acts, v)
    left = np.clip(j - 1, 0, len(acts) - 1)
    right = np.clip(j, 0, len(acts) - 1)
    dl = np.abs(v - acts[left])
    dr = np.abs(acts[right] - v)
    take_right = (dr < dl - TIE_TOL) | ((np.abs(dr - dl) <= TIE_TOL) & (u[right] >= u[left]))
    chosen = np.where(take_right, u[right], u[left])
    return float(inst.weights @ chosen + inst.outside_value)


def _free_and_fixed(inst):
    fixed = np.zeros(inst.n_actions, dtype=bool)
    for x in (*inst.defaults, *inst.required):
        fixed[inst.index(x)] = True
    lo = min(inst.defaults)
    free = np.nonzero(~fixed & (inst.actions >= lo))[0]
    return free, fixed


def best_delegation_exhaustive(inst: DiscreteInstance) -> DelegationResult:
    """Best menu over every subset of the grid that contains the required actions.

    Actions below the lowest veto option are never offered. Among menus
    tied within ``1e-12`` the first in enumeration order (by bitmask over
    the free actions) is returned.
    """
    if inst.n_actions > MAX_EXHAUSTIVE:
        raise TooLarge(f"{inst.n_actions} actions; exhaustive search allows at most {MAX_EXHAUSTIVE}")
    free, fixed = _free_and_fixed(inst)
    k = len(free)
    payoff = inst.vetoer_payoffs()  # types x actions
    u = inst.proposer_u
    n_masks = 1 << k
    chunk = max(1, _CHUNK_ELEMS // (inst.n_types * inst.n_actions))
    bits = 1 << np.arange(k)
    values = np.empty(n_masks)
    for start in range(0, n_masks, chunk):
        ids = np.arange(start, min(start + chunk, n_masks))
        avail = np.tile(fixed, (len(ids), 1))
        avail[:, free] = (ids[:, None] & bits) != 0
        pm = np.where(avail[:, None, :], payoff[None], -np.inf)
        best = pm.max(axis=2, keepdims=True)
        chosen = np.where(pm >= best - TIE_TOL, u[None, None, :], -np.inf).max(axis=2)
        values[start:start + len(ids)] = chosen @ inst.weights
    values += inst.outside_value
    top = float(values.max())
    ties = np.nonzero(values >= top - TIE_TOL * (1 + abs(top)))[0]
    mask = int(ties[0])
    chosen_idx = sorted([*np.nonzero(fixed)[0], *(free[i] for i in range(k) if mask >> i & 1)])
    offered = [float(inst.actions[i]) for i in chosen_idx if inst.actions[i] not in inst.defaults
               or inst.actions[i] in inst.required]
    return DelegationResult(DelegationSet.from_points(offered), top, len(ties))


def best_delegation_structured(inst: DiscreteInstance) -> DelegationResult:
    """Best menu of the form ``[0, x] U [c, 1]`` or ``[0, x] U {y, 1}`` on the grid.

    Covers intervals ``[c, 1]`` (empty lower part), full delegation, no
    compromise and the two-piece shapes that beat intervals under
    single-dipped densities. Runs in ``O(n_a^2)`` menu evaluations.
    """
    acts = inst.actions[(inst.actions >= 0.0) & (inst.actions <= 1.0)]
    n = len(acts)
    top = acts[-1]
    best_val, best_menu, n_ties = -np.inf, None, 0

    def consider(menu):
        nonlocal best_val, best_menu, n_ties
        val = menu_value(inst, menu)
        if best_menu is None or val > best_val + TIE_TOL * (1 + abs(best_val)):
            best_val, best_menu, n_ties = val, menu, 1
        elif val >= best_val - TIE_TOL * (1 + abs(best_val)):
            n_ties += 1

    # x index: -1 means no lower block beyond the status quo
    for xi in range(-1, n - 1):
        lower = acts[:xi + 1]
        for ci in range(xi + 1, n):
            consider(np.concatenate([lower, acts[ci:]]))
        for yi in range(xi + 1, n - 1):
            if yi + 1 < n - 1:  # {y, 1} with a gap; adjacent y is already an interval
                consider(np.concatenate([lower, [acts[yi], top]]))
    return DelegationResult(DelegationSet.from_points(best_menu), float(best_val), n_ties)


def deterministic_allocation(inst: DiscreteInstance, menu) -> np.ndarray:
    """Row-stochastic 0/1 matrix (types x actions) induced by ``menu``."""
    acts = np.unique(np.concatenate([np.asarray(menu, float), inst.defaults]))
    cols = np.array([inst.index(a) for a in acts])
    payoff = inst.vetoer_payoffs()[:, cols]
    best = payoff.max(axis=1, keepdims=True)
    u = np.where(payoff >= best - TIE_TOL, inst.proposer_u[cols][None, :], -np.inf)
    pick = cols[np.argmax(u, axis=1)]
    m = np.zeros((inst.n_types, inst.n_actions))
    m[np.arange(inst.n_types), pick] = 1.0
    return m
