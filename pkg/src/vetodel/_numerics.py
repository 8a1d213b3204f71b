"""Small numerical helpers shared by the solver modules."""
from __future__ import annotations

import numpy as np
from scipy import optimize

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def cell_integrals(func, edges: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integral of vectorised ``func`` over each cell of ``edges``."""
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return half * (func(x) @ _GL_WEIGHTS)


def tail_integrals(func, grid: np.ndarray, top: float, breaks=()) -> np.ndarray:
    """``int_{grid[i]}^{top} func`` for every grid point, splitting at ``breaks``."""
    extra = [b for b in breaks if grid[0] < b < top]
    nodes = np.unique(np.concatenate([grid, extra, [top]]))
    cells = cell_integrals(func, nodes)
    tails = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
    idx = np.searchsorted(nodes, grid)
    return tails[idx]


def sign_change_roots(func, xs: np.ndarray, values: np.ndarray, xtol: float = 1e-10,
                      zero_tol: float = 0.0) -> list:
    """Roots of ``func`` bracketed by strict sign changes of ``values`` on ``xs``.

    Grid points where ``|value| <= zero_tol`` count as roots only when both
    neighbours are nonzero with opposite signs; runs of zeros are skipped.
    """
    sgn = np.where(np.abs(values) <= zero_tol, 0, np.sign(values)).astype(int)
    roots = []
    i = 0
    n = len(xs)
    while i < n - 1:
        if sgn[i] != 0 and sgn[i + 1] != 0 and sgn[i] != sgn[i + 1]:
            roots.append(optimize.bisect(func, xs[i], xs[i + 1], xtol=xtol, maxiter=200))
        elif sgn[i + 1] == 0 and sgn[i] != 0:
            j = i + 1
            while j < n and sgn[j] == 0:
                j += 1
            if j == i + 2 and j < n and sgn[j] == -sgn[i]:
                roots.append(float(xs[i + 1]))
            i = j - 1
        i += 1
    return roots


def quasiconcave_margin(values: np.ndarray) -> float:
    """Min of ``values[j] - min(max(values[:j]), max(values[j+1:]))`` over interior j."""
    if len(values) < 3:
        return 0.0
    pre = np.maximum.accumulate(values)[:-2]
    suf = np.maximum.accumulate(values[::-1])[::-1][2:]
    return float(np.min(values[1:-1] - np.minimum(pre, suf)))


def quasiconvex_margin(values: np.ndarray) -> float:
    """Min of ``max(min(values[:j]), min(values[j+1:])) - values[j]`` over interior j."""
    return quasiconcave_margin(-np.asarray(values))


def downcrossing(values: np.ndarray, margin: float = 1e-12) -> bool:
    """Strict downcrossing on a grid: once ``<= 0`` it stays below ``-margin``."""
    nonpos = np.nonzero(values <= 0.0)[0]
    if len(nonpos) == 0:
        return True
    return bool(np.all(values[nonpos[0] + 1:] < -margin))
