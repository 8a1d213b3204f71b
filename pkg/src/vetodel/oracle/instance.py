"""Finite discretisations of the delegation problem."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import OutOfDomain


@dataclass(frozen=True, eq=False)
class DiscreteInstance:
    """Action grid, type grid with probability masses, and Proposer payoffs.

    ``defaults`` are the veto options every type can fall back on and
    ``required`` the actions every deterministic menu must contain.
    ``outside_value`` is the fixed contribution of types off the grid
    (types below 0 keep the status quo, types above 1 get 1).
    """

    actions: np.ndarray
    types: np.ndarray
    weights: np.ndarray
    proposer_u: np.ndarray
    defaults: tuple = (0.0,)
    required: tuple = (1.0,)
    outside_value: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.actions, dtype=float)
        if np.any(np.diff(a) <= 0):
            raise OutOfDomain("action grid must be strictly increasing")
        for x in (*self.defaults, *self.required):
            if not np.any(np.isclose(a, x, rtol=0, atol=1e-12)):
                raise OutOfDomain(f"action {x} missing from the grid")
        object.__setattr__(self, "actions", a)
        object.__setattr__(self, "types", np.asarray(self.types, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "proposer_u", np.asarray(self.proposer_u, dtype=float))

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_types(self) -> int:
        return len(self.types)

    def index(self, a: float) -> int:
        return int(np.argmin(np.abs(self.actions - a)))

    def vetoer_payoffs(self) -> np.ndarray:
        """``v a - a^2 / 2`` with types on rows and actions on columns."""
        return np.outer(self.types, self.actions) - 0.5 * self.actions ** 2

    def to_json(self) -> dict:
        return {
            "actions": self.actions.tolist(),
            "types": self.types.tolist(),
            "weights": self.weights.tolist(),
            "proposer_u": self.proposer_u.tolist(),
            "defaults": list(self.defaults),
            "required": list(self.required),
            "outside_value": self.outside_value,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteInstance":
        return cls(np.array(obj["actions"]), np.array(obj["types"]), np.array(obj["weights"]),
                   np.array(obj["proposer_u"]), tuple(obj["defaults"]), tuple(obj["required"]),
                   float(obj["outside_value"]))


def cell_masses(dist, types: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Mass of the cell around each type, split at midpoints and clipped to ``[lo, hi]``."""
    edges = np.concatenate([[lo], 0.5 * (types[1:] + types[:-1]), [hi]])
    return np.diff(dist.cdf(edges))


def make_instance(util, dist, n_actions: int = 11, n_types: int = 21,
                  tail: tuple = (), extra_actions: tuple = ()) -> DiscreteInstance:
    """Uniform grids on ``[0, 1]`` for actions and types.

    ``tail`` adds action points below 0 for lotteries; ``extra_actions``
    adds specific points (such as a lottery's low action) inside the range.
    """
    if n_actions < 2 or n_types < 2:
        raise OutOfDomain("grids need at least two points")
    acts = np.unique(np.concatenate([np.linspace(0.0, 1.0, n_actions),
                                     np.asarray(tail, float), np.asarray(extra_actions, float)]))
    types = np.linspace(0.0, 1.0, n_types)
    weights = cell_masses(dist, types, 0.0, 1.0)
    outside = float(util.u(0.0) * dist.cdf(0.0) + util.u(1.0) * (1.0 - dist.cdf(1.0)))
    return DiscreteInstance(acts, types, weights, util.u(acts), (0.0,), (1.0,), outside)


def segment_instance(util, dist, lo: float, hi: float, veto=(0.0,), required=(1.0,),
                     n_actions: int = 15, n_types: int = 401) -> DiscreteInstance:
    """Grid instance restricted to types and actions in ``[lo, hi]``.

    Types outside the segment are ignored (``outside_value`` is 0), so only
    the argmax, not the value, is comparable across segments.
    """
    acts = np.unique(np.concatenate([np.linspace(lo, hi, n_actions), veto, required]))
    types = np.linspace(lo, hi, n_types)
    weights = cell_masses(dist, types, lo, hi)
    return DiscreteInstance(acts, types, weights, util.u(acts), tuple(map(float, veto)),
                            tuple(map(float, required)), 0.0)
