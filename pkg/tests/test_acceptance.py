"""Acceptance suite: one check per published criterion, each printing a
PASS/FAIL line at the stated tolerance.

Run under pytest (lines are collected into the terminal summary) or as a
script: ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import time

import numpy as np

from vetodel import cheap_talk, conditions, interval, oracle
from vetodel._numerics import quasiconcave_margin, quasiconvex_margin
from vetodel.model import (DelegationSet, LQUtility, Normal, PiecewiseLinearDensity,
                           Uniform01, delegation_value, single_dipped_density)

RESULTS: list = []


def report(n: int, ok: bool, msg: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {msg}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1. narrow-spread limit of the optimal threshold
# ---------------------------------------------------------------------------

def test_criterion_1_narrow_spread_threshold():
    t0 = time.perf_counter()
    sol = interval.solve_interval(LQUtility(0.0), Normal(0.45, 0.01))
    dt = time.perf_counter() - t0
    c = sol.c_star
    ok = abs(c - 0.9) <= 0.01 and dt < 1.0
    report(1, ok, f"c* = {c:.6f} at sigma=0.01 (target 0.9 +- 0.01), {dt:.3f}s (< 1s)")


# ---------------------------------------------------------------------------
# 2. comparative statics of the threshold
# ---------------------------------------------------------------------------

def test_criterion_2_monotone_thresholds():
    t0 = time.perf_counter()
    g_rows = interval.sweep(LQUtility(0.0), Normal(0.45, 1.0), "gamma", 0.0, 1.0, 11)
    m_rows = interval.sweep(LQUtility(0.0), Normal(0.0, 1.0), "mu", 0.0, 1.0, 11)
    dt = time.perf_counter() - t0
    tol = 1e-9
    g_lo, g_hi = np.array([r.c_lo for r in g_rows]), np.array([r.c_hi for r in g_rows])
    m_lo, m_hi = np.array([r.c_lo for r in m_rows]), np.array([r.c_hi for r in m_rows])
    g_ok = np.all(np.diff(g_lo) <= tol) and np.all(np.diff(g_hi) <= tol)
    m_ok = np.all(np.diff(m_lo) >= -tol) and np.all(np.diff(m_hi) >= -tol)
    report(2, bool(g_ok and m_ok and dt < 10.0),
           f"c* nonincreasing in gamma: {bool(g_ok)}; nondecreasing in mu: {bool(m_ok)}; "
           f"{dt:.2f}s (< 10s)")


# ---------------------------------------------------------------------------
# 3. flat welfare under uniform types and linear loss
# ---------------------------------------------------------------------------

def test_criterion_3_uniform_cases():
    U = Uniform01()
    cs = np.linspace(0.0, 1.0, 101)
    ws = np.array([interval.welfare(LQUtility(0.0), U, c) for c in cs])
    flat_err = float(np.max(np.abs(ws + 0.5)))
    sol = interval.solve_interval(LQUtility(1.0), U)
    quad_ok = sol.c_set == ((0.0, 0.0),) and abs(sol.w_star + 1.0 / 3.0) <= 1e-9
    report(3, flat_err <= 1e-9 and quad_ok,
           f"max |W(c) + 0.5| = {flat_err:.2e} over 101 thresholds; quadratic: "
           f"c_set = {sol.c_set}, w* = {sol.w_star:.12f}")


# ---------------------------------------------------------------------------
# 4. cheap-talk closed forms
# ---------------------------------------------------------------------------

def test_criterion_4_cheap_talk_closed_forms():
    U = Uniform01()
    eq1 = cheap_talk.solve_cheap_talk(LQUtility(1.0), U)
    c1 = interval.solve_interval(LQUtility(1.0), U).c_star
    eq0 = cheap_talk.solve_cheap_talk(LQUtility(0.0), U)
    ok1 = (len(eq1.a_U) == 1 and len(eq1.a_I) == 1
           and abs(eq1.a_U[0] - 2.0 / 3.0) <= 1e-8
           and abs(eq1.a_I[0] - (2.0 - np.sqrt(2.0))) <= 1e-8
           and c1 == 0.0 < eq1.a_I[0] < eq1.a_U[0])
    ok0 = eq0.a_U == (1.0,) and eq0.a_I == ()
    report(4, ok1 and ok0,
           f"quadratic: a_U = {eq1.a_U}, a_I = {eq1.a_I}, c* = {c1}; "
           f"linear: a_U = {eq0.a_U}, a_I = {eq0.a_I}")


# ---------------------------------------------------------------------------
# 5. certified menus are optimal among stochastic mechanisms
# ---------------------------------------------------------------------------

BATTERY = [
    (0.0, Uniform01()),
    (1.0, Uniform01()),
    (0.0, Normal(-0.5, 1.0)),
    (0.0, Normal(1.5, 0.5)),
    (0.0, Normal(0.45, 1.0)),
    (0.5, Normal(0.45, 1.0)),
    (1.0, Normal(0.3, 0.3)),
    (0.5, Normal(0.7, 0.2)),
    (0.25, Normal(0.45, 0.5)),
    (1.0, Normal(0.6, 0.25)),
]
COARSE, FINE = (11, 21), (21, 41)
TAIL = (-2.0, -1.0, -0.5)
# safety factor for a two-grid convergence estimate (grid convergence index)
GCI_SAFETY = 1.25


def certified_sets(util, dist):
    out = []
    if conditions.check_full_delegation(util, dist).verdict:
        out.append(("full", interval.welfare(util, dist, 0.0)))
    if conditions.check_no_compromise(util, dist).verdict:
        out.append(("no-compromise", interval.welfare(util, dist, 1.0)))
    sol = interval.solve_interval(util, dist)
    if conditions.check_interval(util, dist, sol.c_star).verdict:
        out.append((f"[{sol.c_star:.4f},1]", sol.w_star))
    return out


def test_criterion_5_oracle_agreement():
    t0 = time.perf_counter()
    worst, n_checked, failures = np.inf, 0, []
    for gamma, dist in BATTERY:
        util = LQUtility(gamma)
        certs = certified_sets(util, dist)
        if not certs:
            continue
        lp_h = oracle.best_stochastic_lp(oracle.make_instance(util, dist, *COARSE, tail=TAIL)).value
        lp_h2 = oracle.best_stochastic_lp(oracle.make_instance(util, dist, *FINE, tail=TAIL)).value
        # first-order convergence: error of the coarse value is about twice the
        # difference between the two grids
        bound = GCI_SAFETY * 2.0 * abs(lp_h - lp_h2)
        for name, w in certs:
            excess = lp_h - w
            slack = 1e-6 + bound - excess
            worst = min(worst, slack)
            n_checked += 1
            if slack <= 0:
                failures.append(f"gamma={gamma} {dist} {name}: excess {excess:.3g} > {bound:.3g}")
    dt = time.perf_counter() - t0
    ok = not failures and n_checked > 0 and dt < 60.0
    report(5, ok, f"{n_checked} certified menus, worst slack {worst:.3g}, {dt:.1f}s (< 60s)"
           + ("; " + "; ".join(failures) if failures else ""))


# ---------------------------------------------------------------------------
# 6. lottery example
# ---------------------------------------------------------------------------

def test_criterion_6_lottery_example():
    r = oracle.example_e1_menu(0.05)
    ok = (abs(r.p - 1.0 / 1.8) <= 1e-12 and r.gain > 1e-10 and r.half_menu_loss > 1e-10
          and abs(r.indifference_low) < 1e-12 and abs(r.indifference_high) < 1e-12)
    report(6, ok, f"p = {r.p:.10f}, gain = {r.gain:.3e}, {{1/2,1}} loss = "
           f"{r.half_menu_loss:.3e}, indifference residuals "
           f"{abs(r.indifference_low):.1e}/{abs(r.indifference_high):.1e}")


# ---------------------------------------------------------------------------
# 7. derivative identity and shape properties
# ---------------------------------------------------------------------------

LOGCONCAVE = [Uniform01(), Normal(0.45, 1.0), Normal(-0.5, 1.0), Normal(1.5, 0.5),
              Normal(0.3, 0.3), Normal(0.7, 0.2), Normal(0.45, 0.1)]


def test_criterion_7_identity_and_shapes():
    rng = np.random.default_rng(20240607)
    resid = []
    for _ in range(20):
        util = LQUtility(float(rng.uniform(0.0, 1.0)))
        dist = Normal(float(rng.uniform(-0.5, 1.5)), float(rng.uniform(0.2, 1.5)))
        c = float(rng.uniform(0.05, 0.95))
        resid.append(interval.foc_integral_identity_check(util, dist, c))
    max_resid = max(resid)
    grid = np.linspace(0.0, 1.0, 2001)
    w_margin, g_margin = np.inf, np.inf
    for dist in LOGCONCAVE:
        for gamma in (0.0, 0.25, 0.5, 1.0):
            util = LQUtility(gamma)
            w_margin = min(w_margin, quasiconcave_margin(interval.welfare_grid(util, dist, grid)))
            g_margin = min(g_margin, quasiconvex_margin(interval.g_curve(util, dist, 2001).G))
    ok = max_resid < 1e-6 and w_margin >= -1e-9 and g_margin >= -1e-9
    report(7, ok, f"max identity residual {max_resid:.2e} (< 1e-6) on 20 instances; "
           f"quasiconcavity margin of W {w_margin:.2e}, quasiconvexity margin of G "
           f"{g_margin:.2e} (>= -1e-9)")


# ---------------------------------------------------------------------------
# 8. single-dipped density: two-piece menus beat every interval
# ---------------------------------------------------------------------------

def _is_lower_block_plus_one(points, grid):
    pts = np.asarray(points)
    if pts[-1] != 1.0 or len(pts) < 2:
        return False
    body = pts[:-1]
    on_grid = grid[grid <= body[-1] + 1e-12]
    return len(body) == len(on_grid) and np.allclose(body, on_grid) and body[-1] < grid[-2]


def test_criterion_8_single_dipped():
    util, dist = LQUtility(0.0), single_dipped_density(0.6)
    results = {}
    for n in (51, 101):
        inst = oracle.make_instance(util, dist, n, 10 * n - 9)
        r = oracle.best_delegation_structured(inst)
        grid = inst.actions[inst.actions >= 0]
        results[n] = (r, _is_lower_block_plus_one(r.menu.points, grid))
    grid_err = abs(results[51][0].value - results[101][0].value)
    r, shaped = results[101]
    x = max(p for p in r.menu.points if p < 1.0)
    menu = DelegationSet(intervals=((0.0, x),), points=(1.0,))
    best_interval = interval.solve_interval(util, dist).w_star
    margin = delegation_value(util, dist, menu) - best_interval
    ok = shaped and results[51][1] and margin > grid_err
    report(8, ok, f"best structured menu [0, {x:.2f}] U {{1}}; beats best interval by "
           f"{margin:.4e} > grid error {grid_err:.2e}")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
