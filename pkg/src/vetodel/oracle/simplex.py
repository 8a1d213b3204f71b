"""Exact two-phase simplex in rational arithmetic for tiny programs.

Used to cross-check the floating-point LP oracle: every float input is
converted to the exact rational it represents, and Bland's rule
guarantees termination.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import Infeasible, TooLarge
from .instance import DiscreteInstance

MAX_EXACT = 8


def _frac_matrix(a):
    return [[Fraction(float(x)) for x in row] for row in np.atleast_2d(a)]


def _pivot(T, basis, r, col):
    piv = T[r][col]
    T[r] = [x / piv for x in T[r]]
    for i, row in enumerate(T):
        if i != r and row[col] != 0:
            f = row[col]
            T[i] = [x - f * y for x, y in zip(row, T[r])]
    basis[r] = col


def _run(T, basis, obj, allowed, max_pivots):
    for _ in range(max_pivots):
        cb = [obj[b] for b in basis]
        enter = None
        for j in allowed:
            rc = obj[j] - sum(cb[i] * T[i][j] for i in range(len(T)) if T[i][j] != 0)
            if rc > 0:
                enter = j
                break
        if enter is None:
            return
        best = None
        for i, row in enumerate(T):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Infeasible("program is unbounded")
        _pivot(T, basis, best[1], enter)
    raise RuntimeError("pivot limit reached")


def exact_linprog_max(c, A_ub, b_ub, A_eq, b_eq, max_pivots: int = 100000):
    """Maximise ``c x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Returns ``(value, x)`` as Fractions.
    """
    c = [Fraction(float(x)) for x in c]
    n = len(c)
    ub, bu = _frac_matrix(A_ub) if len(b_ub) else [], [Fraction(float(x)) for x in b_ub]
    eq, be = _frac_matrix(A_eq) if len(b_eq) else [], [Fraction(float(x)) for x in b_eq]
    m_ub, m_eq = len(ub), len(eq)
    rows, rhs, needs_art = [], [], []
    for i, (row, b) in enumerate(zip(ub, bu)):
        slack = [Fraction(0)] * m_ub
        slack[i] = Fraction(1)
        full = row + slack
        if b < 0:
            full, b = [-x for x in full], -b
            needs_art.append(True)
        else:
            needs_art.append(False)
        rows.append(full)
        rhs.append(b)
    for row, b in zip(eq, be):
        full = row + [Fraction(0)] * m_ub
        if b < 0:
            full, b = [-x for x in full], -b
        rows.append(full)
        rhs.append(b)
        needs_art.append(True)
    n_struct = n + m_ub
    art_cols = {}
    for i, need in enumerate(needs_art):
        if need:
            art_cols[i] = n_struct + len(art_cols)
    width = n_struct + len(art_cols)
    T, basis = [], []
    for i, (row, b) in enumerate(zip(rows, rhs)):
        full = row + [Fraction(0)] * len(art_cols)
        if i in art_cols:
            full[art_cols[i]] = Fraction(1)
            basis.append(art_cols[i])
        else:
            basis.append(n + i)
        T.append(full + [b])

    # phase 1: drive artificials to zero
    obj1 = [Fraction(0)] * n_struct + [Fraction(-1)] * len(art_cols)
    _run(T, basis, obj1, range(width), max_pivots)
    if sum(T[i][-1] for i, b in enumerate(basis) if b >= n_struct) > 0:
        raise Infeasible("program has no feasible point")
    keep = []
    for i, b in enumerate(basis):
        if b >= n_struct:
            col = next((j for j in range(n_struct) if T[i][j] != 0), None)
            if col is None:
                continue  # redundant equality
            _pivot(T, basis, i, col)
        keep.append(i)
    T = [T[i] for i in keep]
    basis = [basis[i] for i in keep]

    obj2 = c + [Fraction(0)] * (width - n)
    _run(T, basis, obj2, range(n_struct), max_pivots)
    x = [Fraction(0)] * n_struct
    for i, b in enumerate(basis):
        x[b] = T[i][-1]
    value = sum(ci * xi for ci, xi in zip(c, x[:n]))
    return value, x[:n]


def exact_stochastic_value(inst: DiscreteInstance) -> Fraction:
    """Exact optimum of the stochastic program for instances with at most 8 types and actions."""
    from .lp import lp_matrices

    if inst.n_types > MAX_EXACT or inst.n_actions > MAX_EXACT:
        raise TooLarge(f"exact simplex allows at most {MAX_EXACT} types and actions")
    c, A_ub, b_ub, A_eq, b_eq = lp_matrices(inst)
    value, _ = exact_linprog_max(-c, A_ub, b_ub, A_eq, b_eq)
    return value + Fraction(float(inst.outside_value))
