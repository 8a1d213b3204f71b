"""Numerical checks of the optimality conditions for delegation sets.

Each check evaluates the relevant inequality on a grid and returns a
:class:`ConditionReport`. Verdicts are numeric: an inequality passes when
its worst slack is at least ``-1e-9`` times the largest absolute value of
the tested expression on the grid. For non-LQ utilities only the sufficiency direction holds, so a
failed check does not certify that the delegation set is suboptimal; the
report's ``necessary`` flag records this.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NotLQ
from .model import ProposerUtility, TypeDistribution

REL_TOL = 1e-9


@dataclass(frozen=True)
class ConditionReport:
    name: str
    verdict: bool
    worst_margin: float
    witness: dict
    grid_resolution: int
    tolerance: float
    necessary: bool = True
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        out["witness"] = {k: float(v) for k, v in self.witness.items()}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def g_function(util: ProposerUtility, dist: TypeDistribution, v):
    """``kappa F(v) - u'(v) f(v)``."""
    return util.kappa * dist.cdf(v) - util.u_prime(v) * dist.pdf(v)


def _tol(*arrays) -> float:
    # relative to the expression's own scale: densities far in a normal tail are tiny
    scale = max((float(np.max(np.abs(a))) for a in arrays if np.size(a)), default=0.0)
    return REL_TOL * max(scale, 1e-300)


def _monotone_margin(xs, gs):
    diffs = np.diff(gs)
    i = int(np.argmin(diffs))
    return float(diffs[i]), float(xs[i])


def check_full_delegation(util, dist, n: int = 10001) -> ConditionReport:
    """Is ``kappa F - u' f`` nondecreasing on ``[0, 1]``?"""
    v = np.linspace(0.0, 1.0, n)
    g = g_function(util, dist, v)
    margin, at = _monotone_margin(v, g)
    tol = _tol(g)
    return ConditionReport("full_delegation", margin >= -tol, margin, {"v": at}, n, tol,
                           necessary=util.is_lq)


def _no_compromise_sides(util, dist, n):
    k = util.kappa
    fh = dist.pdf(0.5)
    Fh = dist.cdf(0.5)
    t = np.linspace(0.5, 1.0, n)[1:]
    lhs = (util.u_prime(1.0) + k * (1.0 - t)) * (dist.cdf(t) - Fh) / (t - 0.5)
    t = np.concatenate([[0.5], t])
    lhs = np.concatenate([[(util.u_prime(1.0) + k * 0.5) * fh], lhs])
    s = np.linspace(0.0, 0.5, n)[:-1]
    rhs = (util.u_prime(0.0) - k * s) * (Fh - dist.cdf(s)) / (0.5 - s)
    s = np.concatenate([s, [0.5]])
    rhs = np.concatenate([rhs, [(util.u_prime(0.0) - k * 0.5) * fh]])
    return t, lhs, s, rhs


def check_no_compromise(util, dist, n: int = 2001) -> ConditionReport:
    """Pairwise inequality characterising optimality of the menu ``{1}``.

    The left side depends on ``t`` only and the right side on ``s`` only, so
    the scan over all pairs ``(t, s)`` reduces to comparing the minimum of one
    against the maximum of the other. Endpoints ``t = s = 1/2`` use the
    density limits.
    """
    if not util.is_lq:
        raise NotLQ("the no-compromise characterisation assumes an LQ utility")
    t, lhs, s, rhs = _no_compromise_sides(util, dist, n)
    i, j = int(np.argmin(lhs)), int(np.argmax(rhs))
    margin = float(lhs[i] - rhs[j])
    tol = _tol(lhs, rhs)
    return ConditionReport("no_compromise", margin >= -tol, margin,
                           {"t": t[i], "s": s[j]}, n * n, tol)


def check_interval(util, dist, c_star: float, n: int = 10001) -> ConditionReport:
    """Conditions (increasing G on ``[c, 1]`` and the two average-density
    inequalities around ``c/2``) for the menu ``[c_star, 1]``."""
    c = float(c_star)
    if not 0.0 <= c <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    k = util.kappa
    parts = {}
    arrays = []

    v = np.linspace(c, 1.0, n)
    if c < 1.0:
        g = g_function(util, dist, v)
        parts["increasing"] = _monotone_margin(v, g)
        arrays.append(g)

    if c > 0.0:
        h = c / 2.0
        Fh, fh = dist.cdf(h), dist.pdf(h)
        up = util.u_prime(c)
        K = up * (dist.cdf(c) - Fh) / h
        t = np.linspace(h, c, n)[1:]
        left = (up + k * (c - t)) * (dist.cdf(t) - Fh) / (t - h)
        left = np.concatenate([[(up + k * h) * fh], left])
        t = np.concatenate([[h], t])
        i = int(np.argmin(left))
        parts["upper"] = (float(left[i] - K), float(t[i]))
        s = np.linspace(0.0, h, n)[:-1]
        right = (util.u_prime(0.0) - k * s) * (Fh - dist.cdf(s)) / (h - s)
        right = np.concatenate([right, [(util.u_prime(0.0) - k * h) * fh]])
        s = np.concatenate([s, [h]])
        j = int(np.argmax(right))
        parts["lower"] = (float(K - right[j]), float(s[j]))
        arrays += [left, right, np.array([K])]

    if not parts:
        return ConditionReport("interval", True, 0.0, {"c": c}, n, REL_TOL, util.is_lq)
    name = min(parts, key=lambda p: parts[p][0])
    margin, at = parts[name]
    key = {"increasing": "v", "upper": "t", "lower": "s"}[name]
    tol = _tol(*arrays)
    details = {p: m for p, (m, _) in parts.items()}
    necessary = util.is_lq and 0.0 < c < 1.0
    return ConditionReport("interval", margin >= -tol, margin, {"c": c, key: at}, n, tol,
                           necessary, details)


def check_logconcave(dist, n: int = 10001) -> ConditionReport:
    """Logconcavity of f on ``[0, 1]``: the score ``f'/f`` must be nonincreasing."""
    v = np.linspace(0.0, 1.0, n)
    r = dist.score(v)
    margin, at = _monotone_margin(v, -r)
    tol = _tol(r)
    return ConditionReport("logconcave", margin >= -tol, margin, {"v": at}, n, tol)


def check_risk_aversion_threshold(util, dist, n: int = 10001) -> float:
    """``sup f'/f - inf(-u''/u')`` over ``[0, 1)``.

    A nonpositive value means Proposer is risk averse enough for full
    delegation to be optimal.
    """
    v = np.linspace(0.0, 1.0, n)[:-1]
    score = dist.score(v)
    arrow_pratt = util.neg_u_second(v) / util.u_prime(v)
    return float(np.max(score) - np.min(arrow_pratt))
