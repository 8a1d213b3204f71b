"""Two-message cheap-talk equilibria before a take-it-or-leave-it proposal,
and their comparison with the optimal interval menu."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._numerics import downcrossing, sign_change_roots
from .conditions import check_no_compromise
from .errors import HypothesisFailed
from .interval import solve_interval, welfare, welfare_foc
from .model import DelegationSet, delegation_value, induced_action, vetoer_payoff

N_GRID = 4001
DOWNCROSS_MARGIN = 1e-12


@dataclass(frozen=True)
class CheapTalkEquilibria:
    a_U: tuple
    a_I: tuple

    @property
    def v_I(self) -> tuple:
        return tuple((1.0 + a) / 2.0 for a in self.a_I)

    def to_json(self) -> dict:
        return {"a_U": list(self.a_U), "a_I": list(self.a_I), "v_I": list(self.v_I)}


def noninfluential_objective(util, dist, a):
    """Proposer's payoff from offering ``a`` to the prior: ``u(0)F(a/2) + u(a)(1 - F(a/2))``."""
    Fh = dist.cdf(np.multiply(a, 0.5))
    return util.u(0.0) * Fh + util.u(a) * (1.0 - Fh)


def noninfluential_foc(util, dist, a):
    """``2u'(a)[1 - F(a/2)] - f(a/2)[u(a) - u(0)]``."""
    h = np.multiply(a, 0.5)
    return 2.0 * util.u_prime(a) * (1.0 - dist.cdf(h)) - dist.pdf(h) * (util.u(a) - util.u(0.0))


def influential_foc(util, dist, a):
    """``2u'(a)[F((1+a)/2) - F(a/2)] - f(a/2)[u(a) - u(0)]``."""
    h = np.multiply(a, 0.5)
    return (2.0 * util.u_prime(a) * (dist.cdf(0.5 + h) - dist.cdf(h))
            - dist.pdf(h) * (util.u(a) - util.u(0.0)))


def _eps(x: float) -> float:
    return 1e-9 * (1.0 + abs(x))


def solve_noninfluential(util, dist, n: int = N_GRID) -> list:
    """All global maximisers of the uninformed proposal problem on ``(0, 1]``.

    Candidates are the bracketed roots of the first-order condition and the
    endpoint 1; the grid maximum only guards against missed roots.
    """
    grid = np.linspace(0.0, 1.0, n)[1:]
    vals = noninfluential_objective(util, dist, grid)
    foc = noninfluential_foc(util, dist, grid)
    roots = sign_change_roots(lambda a: noninfluential_foc(util, dist, a), grid, foc,
                              zero_tol=1e-13 * (1.0 + float(np.max(np.abs(foc)))))
    cand = sorted({*roots, 1.0})
    cvals = [float(noninfluential_objective(util, dist, a)) for a in cand]
    top = max(max(cvals), float(np.max(vals)))
    best = [a for a, v in zip(cand, cvals) if v >= top - _eps(top)]
    if not best:  # maximiser sits between grid roots we failed to bracket
        best = [float(grid[int(np.argmax(vals))])]
    return best


def low_message_objective(util, dist, b, v_I: float):
    """Proposer's payoff (unnormalised) from offering ``b`` to types below ``v_I``."""
    FI = dist.cdf(v_I)
    Fb = np.minimum(dist.cdf(np.multiply(b, 0.5)), FI)
    return util.u(0.0) * Fb + util.u(b) * (FI - Fb)


def is_low_message_best_response(util, dist, a: float, n: int = N_GRID) -> bool:
    v_I = (1.0 + a) / 2.0
    grid = np.linspace(0.0, 1.0, n)
    own = float(low_message_objective(util, dist, a, v_I))
    return bool(np.max(low_message_objective(util, dist, grid, v_I)) <= own + _eps(own))


def solve_influential(util, dist, n: int = N_GRID) -> list:
    """Proposals ``a`` in ``(0, 1)`` sustaining a two-message equilibrium.

    Each root of the influential first-order condition is kept only if
    offering it is a best response to the prior truncated at ``(1 + a)/2``.
    """
    grid = np.linspace(0.0, 1.0, n)[1:-1]
    foc = influential_foc(util, dist, grid)
    roots = sign_change_roots(lambda a: influential_foc(util, dist, a), grid, foc,
                              zero_tol=1e-13 * (1.0 + float(np.max(np.abs(foc)))))
    return [float(a) for a in roots if is_low_message_best_response(util, dist, a)]


def solve_cheap_talk(util, dist) -> CheapTalkEquilibria:
    return CheapTalkEquilibria(tuple(solve_noninfluential(util, dist)),
                               tuple(solve_influential(util, dist)))


def influential_outcome(a_I: float, v):
    """Action reached by type ``v`` in the two-message equilibrium.

    Types below ``(1 + a_I)/2`` send the low message and accept ``a_I``
    unless it is farther than the status quo; the rest accept 1.
    """
    v = np.asarray(v, dtype=float)
    v_I = (1.0 + a_I) / 2.0
    low = np.where(v >= a_I / 2.0, a_I, 0.0)
    return np.where(v >= v_I, 1.0, low)


def downcrossing_hypotheses(util, dist, n: int = N_GRID) -> dict:
    """Strict downcrossing of the welfare and influential first-order conditions."""
    grid = np.linspace(0.0, 1.0, n)
    return {
        "welfare_foc": downcrossing(np.asarray(welfare_foc(util, dist, grid)), DOWNCROSS_MARGIN),
        "influential_foc": downcrossing(np.asarray(influential_foc(util, dist, grid)),
                                        DOWNCROSS_MARGIN),
    }


@dataclass(frozen=True)
class ParetoReport:
    c_star: float
    a_I: tuple
    a_U: tuple
    proposer_gain: float
    vetoer_gain_measure: float
    ordering: bool
    vetoer_weakly_better: bool
    hypotheses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"c_star": self.c_star, "a_I": list(self.a_I), "a_U": list(self.a_U),
                "proposer_gain": self.proposer_gain,
                "vetoer_gain_measure": self.vetoer_gain_measure,
                "ordering": self.ordering, "vetoer_weakly_better": self.vetoer_weakly_better,
                "hypotheses": dict(self.hypotheses)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def pareto_compare(util, dist, n_types: int = 2001) -> ParetoReport:
    """Compare the optimal interval menu with every cheap-talk outcome.

    ``proposer_gain`` is the smallest welfare gain of ``[c*, 1]`` over the
    cheap-talk outcomes and ``vetoer_gain_measure`` the smallest probability
    mass of types in ``[0, 1]`` strictly better off under ``[c*, 1]``.

    Raises
    ------
    HypothesisFailed
        If no compromise is optimal, or neither first-order condition is
        verifiably strictly downcrossing.
    """
    if util.is_lq and check_no_compromise(util, dist).verdict:
        raise HypothesisFailed("no compromise is optimal; the comparison is vacuous")
    hyp = downcrossing_hypotheses(util, dist)
    if not any(hyp.values()):
        raise HypothesisFailed("neither first-order condition is strictly downcrossing")

    sol = solve_interval(util, dist)
    c = sol.c_star
    eq = solve_cheap_talk(util, dist)
    outcomes = [DelegationSet.from_points([a, 1.0]) for a in eq.a_I]
    outcomes += [DelegationSet.from_points([a]) for a in eq.a_U]
    ordering = all(c < a for a in (*eq.a_I, *eq.a_U))
    if eq.a_I and eq.a_U:
        ordering = ordering and max(eq.a_I) < min(eq.a_U)

    w_c = welfare(util, dist, c)
    gains = [w_c - delegation_value(util, dist, d) for d in outcomes]

    v = np.linspace(0.0, 1.0, n_types)
    edges = np.concatenate([[0.0], 0.5 * (v[1:] + v[:-1]), [1.0]])
    mass = np.diff(dist.cdf(edges))
    mine = vetoer_payoff(v, induced_action(DelegationSet.interval(c), v))
    weakly, measures = True, []
    for d in outcomes:
        diff = mine - vetoer_payoff(v, induced_action(d, v))
        weakly = weakly and bool(np.all(diff >= -1e-12))
        measures.append(float(mass[diff > 1e-12].sum()))
    return ParetoReport(c, eq.a_I, eq.a_U, float(min(gains)) if gains else 0.0,
                        float(min(measures)) if measures else 0.0, ordering, weakly, hyp)
