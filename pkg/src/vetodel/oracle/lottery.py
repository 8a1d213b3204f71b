"""Menus of lotteries with a continuum of types, and the dip example where a
lottery beats every deterministic menu."""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import BadDelta
from ..model import LQUtility, example_e1_density


@dataclass(frozen=True)
class Lottery:
    actions: tuple
    probs: tuple

    def __post_init__(self):
        if abs(sum(self.probs) - 1.0) > 1e-12 or min(self.probs) < 0:
            raise ValueError("lottery probabilities must be nonnegative and sum to one")

    @classmethod
    def sure(cls, a: float) -> "Lottery":
        return cls((float(a),), (1.0,))

    @property
    def mean(self) -> float:
        return float(np.dot(self.actions, self.probs))

    @property
    def second_moment(self) -> float:
        return float(np.dot(np.square(self.actions), self.probs))

    def vetoer_payoff(self, v):
        """Quadratic-loss index ``v E[a] - E[a^2] / 2``."""
        return np.asarray(v) * self.mean - 0.5 * self.second_moment

    def proposer_payoff(self, util) -> float:
        return float(np.dot(util.u(np.asarray(self.actions)), self.probs))


def lottery_menu_value(util, dist, menu) -> float:
    """Proposer's expected payoff when every type picks its best lottery.

    The status quo is always available. Each lottery's payoff to type ``v``
    is a line in ``v``, so types split at pairwise crossings; ties on a
    crossing have probability zero.
    """
    opts = [Lottery.sure(0.0), *menu]
    cuts = set()
    for a, b in combinations(opts, 2):
        dm = a.mean - b.mean
        if dm != 0.0:
            cuts.add(0.5 * (a.second_moment - b.second_moment) / dm)
    cuts = sorted(cuts)
    edges = [-np.inf, *cuts, np.inf]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if np.isinf(lo) and np.isinf(hi):
            probe = 0.5
        elif np.isinf(lo):
            probe = hi - 1.0
        elif np.isinf(hi):
            probe = lo + 1.0
        else:
            probe = 0.5 * (lo + hi)
        scores = [o.vetoer_payoff(probe) for o in opts]
        best = opts[int(np.argmax(scores))]
        total += best.proposer_payoff(util) * (dist.cdf(hi) - dist.cdf(lo))
    return float(total)


@dataclass(frozen=True)
class E1Result:
    delta: float
    slope: float
    p: float
    tail: float
    gain: float
    gain_closed_form: float
    half_menu_loss: float
    indifference_low: float
    indifference_high: float

    def to_json(self) -> dict:
        return {"delta": self.delta, "slope": self.slope, "p": self.p, "tail": self.tail,
                "gain": self.gain, "gain_closed_form": self.gain_closed_form,
                "half_menu_loss": self.half_menu_loss,
                "indifference_low": self.indifference_low,
                "indifference_high": self.indifference_high}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def dip_lottery(delta: float) -> Lottery:
    """Lottery with mean 1/2 that makes types ``1/2 -+ delta`` indifferent to 0 and 1."""
    p = 1.0 / (2.0 - 4.0 * delta)
    return Lottery((1.0 - 1.0 / (2.0 * p), 1.0), (p, 1.0 - p))


def example_e1_menu(delta: float = 0.05, slope: float = 1.0, base: float = 1.0) -> E1Result:
    """Linear-loss Proposer facing a density with a short decreasing stretch.

    Compares the menu ``{lottery, 1}`` against ``{1}`` and against
    ``{1/2, 1}``. ``gain`` is the payoff of ``{lottery, 1}`` minus that of
    ``{1}`` and ``half_menu_loss`` the payoff of ``{1}`` minus that of
    ``{1/2, 1}``; both are positive in the example.
    """
    if not (0.0 < delta < 0.25):
        raise BadDelta("delta must lie in (0, 1/4)")
    if not slope > 0:
        raise BadDelta("slope must be positive")
    util = LQUtility(0.0)
    dist = example_e1_density(delta, slope, base)
    lot = dip_lottery(delta)
    one = Lottery.sure(1.0)
    v_lo, v_hi = 0.5 - delta, 0.5 + delta
    ind_lo = float(lot.vetoer_payoff(v_lo))
    ind_hi = float(lot.vetoer_payoff(v_hi) - one.vetoer_payoff(v_hi))
    base_val = lottery_menu_value(util, dist, [one])
    gain = lottery_menu_value(util, dist, [lot, one]) - base_val
    F = dist.cdf
    closed = 0.5 * (F(0.5) - F(v_lo)) - 0.5 * (F(v_hi) - F(0.5))
    loss = base_val - lottery_menu_value(util, dist, [Lottery.sure(0.5), one])
    return E1Result(delta, slope, lot.probs[0], lot.actions[0], float(gain), float(closed),
                    float(loss), ind_lo, ind_hi)
