"""Interval delegation: welfare of menus ``[c, 1]``, optimal thresholds,
comparative statics sweeps and the stitching construction for a second
veto option.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate

from ._numerics import sign_change_roots, tail_integrals
from .conditions import g_function
from .errors import BadDefault, NotLQ
from .model import (DelegationSet, LQUtility, ProposerUtility, TypeDistribution,
                    integrate_uf, with_param)


def welfare(util: ProposerUtility, dist: TypeDistribution, c: float,
            epsabs: float = 1e-10) -> float:
    """Proposer's expected utility from the menu ``[c, 1]``.

    Types below ``c/2`` veto, types in ``[c/2, c]`` take ``c``, types in
    ``[c, 1]`` take their ideal point and types above 1 take 1.
    """
    c = float(c)
    F = dist.cdf
    u0, uc, u1 = util.u(0.0), util.u(c), util.u(1.0)
    return (u0 * F(c / 2) + uc * (F(c) - F(c / 2))
            + integrate_uf(util, dist, c, 1.0, epsabs=epsabs) + u1 * (1.0 - F(1.0)))


def welfare_grid(util, dist, grid: np.ndarray) -> np.ndarray:
    """Vectorised :func:`welfare` on a grid of thresholds in ``[0, 1]``."""
    grid = np.asarray(grid, dtype=float)
    F = dist.cdf
    tails = tail_integrals(lambda v: util.u(v) * dist.pdf(v), grid, 1.0,
                           breaks=dist.breakpoints())
    return (util.u(0.0) * F(grid / 2) + util.u(grid) * (F(grid) - F(grid / 2))
            + tails + util.u(1.0) * (1.0 - F(1.0)))


def welfare_foc(util, dist, c):
    """``2u'(c)[F(c) - F(c/2)] - f(c/2)[u(c) - u(0)]``, which is twice ``W'(c)``."""
    F = dist.cdf
    return (2.0 * util.u_prime(c) * (F(c) - F(np.multiply(c, 0.5)))
            - dist.pdf(np.multiply(c, 0.5)) * (util.u(c) - util.u(0.0)))


def welfare_foc_lq(gamma: float, dist, c):
    """Closed form of :func:`welfare_foc` under LQ utility."""
    F = dist.cdf
    c = np.asarray(c, dtype=float)
    out = (2.0 * (1 + gamma - 2 * gamma * c) * (F(c) - F(c / 2))
           - c * (1 + gamma - gamma * c) * dist.pdf(c / 2))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IntervalSolutionSet:
    """Optimal thresholds ``C*`` for interval delegation.

    ``c_set`` holds one ``(lo, hi)`` pair per connected run of eps-optimal
    thresholds. ``flat`` is true when some run has positive length and
    welfare varies by less than ``flat_tol`` across it.
    """

    c_set: tuple
    w_star: float
    flat: bool
    foc_roots: tuple
    eps_opt: float

    @property
    def c_lo(self) -> float:
        return self.c_set[0][0]

    @property
    def c_hi(self) -> float:
        return self.c_set[-1][1]

    @property
    def c_star(self) -> float:
        return self.c_lo

    def contains(self, c: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= c <= hi + tol for lo, hi in self.c_set)

    def to_json(self) -> dict:
        return {
            "c_set": [self.c_lo, self.c_hi],
            "intervals": [list(iv) for iv in self.c_set],
            "w_star": self.w_star,
            "flat": self.flat,
            "foc_roots": list(self.foc_roots),
        }


def solve_interval(util, dist, n_grid: int = 4001, xtol: float = 1e-10) -> IntervalSolutionSet:
    """Maximise welfare over thresholds ``c`` in ``[0, 1]``.

    Scans welfare and its first-order condition on a uniform grid, refines
    every bracketed root of the first-order condition by bisection, and
    compares interior candidates against the endpoints. ``C*`` collects the
    eps-optimal candidates: endpoints, refined roots, and grid points where
    the first-order condition vanishes (flat welfare).
    """
    grid = np.linspace(0.0, 1.0, n_grid)
    w_grid = welfare_grid(util, dist, grid)
    inner = grid[1:-1]
    foc = welfare_foc(util, dist, inner)
    zero_tol = 1e-13 * (1.0 + float(np.max(np.abs(foc))))
    roots = sign_change_roots(lambda c: welfare_foc(util, dist, c), inner, foc,
                              xtol=xtol, zero_tol=zero_tol)

    cand = np.array(sorted({0.0, 1.0, *roots}))
    w_cand = np.array([welfare(util, dist, c) for c in cand])
    w_star = float(max(np.max(w_cand), np.max(w_grid)))
    eps = 1e-9 * (1.0 + abs(w_star))

    # interior grid points count only where welfare is stationary, so a
    # strict optimum is not smeared over its eps-neighbourhood
    foc_tol = 1e-9 * (1.0 + float(np.max(np.abs(foc))))
    stationary = np.concatenate([[True], np.abs(foc) <= foc_tol, [True]])
    cs = np.concatenate([grid, cand])
    ws = np.concatenate([w_grid, w_cand])
    ok = np.concatenate([stationary, np.ones(len(cand), dtype=bool)])
    order = np.lexsort((ws, cs))
    cs, ws, ok = cs[order], ws[order], ok[order]
    good = (ws >= w_star - eps) & ok

    runs = []
    flat = False
    i = 0
    while i < len(cs):
        if not good[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(cs) and good[j + 1]:
            j += 1
        lo, hi = float(cs[i]), float(cs[j])
        if hi > lo and np.ptp(ws[i:j + 1]) < eps:
            flat = True
        runs.append((lo, hi))
        i = j + 1
    return IntervalSolutionSet(tuple(runs), w_star, flat, tuple(float(r) for r in roots), eps)


@dataclass(frozen=True)
class GCurve:
    v: np.ndarray
    G: np.ndarray
    G_prime: np.ndarray


def g_prime(util, dist, v):
    """Derivative of ``kappa F - u' f``; closed form under LQ."""
    if isinstance(util, LQUtility):
        g = util.gamma
        return 4 * g * dist.pdf(v) - (1 + g - 2 * g * np.asarray(v)) * dist.pdf_prime(v)
    raise NotLQ("closed-form G' needs an LQ utility")


def g_curve(util, dist, n: int = 10001) -> GCurve:
    v = np.linspace(0.0, 1.0, n)
    G = g_function(util, dist, v)
    if isinstance(util, LQUtility):
        Gp = g_prime(util, dist, v)
    else:
        Gp = np.gradient(G, v)
    return GCurve(v, G, Gp)


def foc_integral_identity_check(util, dist, c: float, h: float = 1e-5) -> float:
    """``|int_{c/2}^c (v - c) G'(v) dv - W'(c)|`` with ``W'`` by central differences."""
    if not isinstance(util, LQUtility):
        raise NotLQ("the integral identity is stated for LQ utilities")
    lo, hi = c / 2.0, c
    pts = [p for p in dist.breakpoints() if lo < p < hi]
    edges = [lo, *pts, hi]
    lhs = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda v: (v - c) * g_prime(util, dist, v), a, b,
                                epsabs=1e-14, epsrel=1e-13, limit=200)
        lhs += val
    w_plus = welfare(util, dist, c + h, epsabs=1e-15)
    w_minus = welfare(util, dist, c - h, epsabs=1e-15)
    return abs(lhs - (w_plus - w_minus) / (2 * h))


class SweepRow(NamedTuple):
    param: float
    c_lo: float
    c_hi: float
    w_star: float


def _sweep_point(args):
    util, dist, param, value, n_grid = args
    u2, d2 = with_param(util, dist, param, value)
    sol = solve_interval(u2, d2, n_grid=n_grid)
    return SweepRow(float(value), sol.c_lo, sol.c_hi, sol.w_star)


def sweep(util, dist, param: str, start: float, stop: float, steps: int,
          workers: int = 1, n_grid: int = 4001) -> list:
    """Solve for ``C*`` along ``steps`` evenly spaced values of one parameter.

    ``param`` is one of ``gamma`` (LQ utility), ``mu`` or ``sigma`` (normal
    types). Rows come back sorted by parameter value whatever the order of
    ``start`` and ``stop``.
    """
    values = np.linspace(start, stop, steps)
    with_param(util, dist, param, float(values[0]))  # validate before fanning out
    jobs = [(util, dist, param, float(x), n_grid) for x in values]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    return sorted(rows, key=lambda r: r.param)


def fmt(x: float) -> str:
    return "%.12g" % x


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SweepRow._fields)
    for r in rows:
        writer.writerow([fmt(x) for x in r])
    return buf.getvalue()


def stitch_with_default(util, dist, a_star: float, n_actions: int = 15,
                        n_types: int = 401) -> DelegationSet:
    """Optimal menu when Vetoer can veto to either 0 or ``a_star``.

    The problem splits at ``min(a_star, 1)``: each side is a separate
    delegation problem with a single veto option, solved by exhaustive
    enumeration over an action grid, and the two menus are joined.
    """
    from .oracle import best_delegation_exhaustive, segment_instance

    if not a_star > 0:
        raise BadDefault("second veto option must be strictly positive")
    a_star = float(a_star)
    if a_star > 1.0:
        left = segment_instance(util, dist, 0.0, 1.0, veto=(0.0,), required=(1.0,),
                                n_actions=n_actions, n_types=n_types)
        right = segment_instance(util, dist, 1.0, a_star, veto=(a_star,), required=(1.0,),
                                 n_actions=n_actions, n_types=n_types)
    elif a_star < 1.0:
        left = segment_instance(util, dist, 0.0, a_star, veto=(0.0, a_star), required=(),
                                n_actions=n_actions, n_types=n_types)
        right = segment_instance(util, dist, a_star, 1.0, veto=(a_star,), required=(1.0,),
                                 n_actions=n_actions, n_types=n_types)
    else:
        only = segment_instance(util, dist, 0.0, 1.0, veto=(0.0, 1.0), required=(1.0,),
                                n_actions=n_actions, n_types=n_types)
        return best_delegation_exhaustive(only).menu
    return best_delegation_exhaustive(left).menu.union(best_delegation_exhaustive(right).menu)
