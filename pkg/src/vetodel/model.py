"""Primitives of the veto bargaining model.

Proposer has a concave utility ``u`` peaked at action 1. Vetoer has ideal
point ``v`` drawn from a type distribution and quadratic loss ``-(v - a)**2``,
which ranks lotteries exactly as the payoff index ``v*E[a] - E[a**2]/2``.
The status quo action 0 is always available to Vetoer.

All classes are immutable and every accessor accepts scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

from .errors import BadDistribution, BadUtility, ConfigError, OutOfDomain

# actions outside this range are never needed, even for lottery tails
GUARD_LO, GUARD_HI = -10.0, 10.0
ATOL = 1e-8


def _as_float_or_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


# ---------------------------------------------------------------------------
# Proposer utilities
# ---------------------------------------------------------------------------


class ProposerUtility:
    """Concave Proposer utility uniquely maximised at ``a = 1``."""

    is_lq = False

    def u(self, a):
        raise NotImplementedError

    def u_prime(self, a):
        raise NotImplementedError

    def neg_u_second(self, a):
        """``-u''(a)`` on ``[0, 1)``."""
        raise NotImplementedError

    @property
    def kappa(self) -> float:
        raise NotImplementedError

    def scaled(self, factor: float) -> "ScaledUtility":
        return ScaledUtility(self, factor)

    def _guard(self, a):
        arr, scalar = _as_float_or_array(a)
        if np.any(arr < GUARD_LO) or np.any(arr > GUARD_HI) or np.any(np.isnan(arr)):
            raise OutOfDomain(f"action outside guard range [{GUARD_LO}, {GUARD_HI}]")
        return arr, scalar


@dataclass(frozen=True)
class LQUtility(ProposerUtility):
    """Linear-quadratic loss ``u(a) = -(1-gamma)|1-a| - gamma(1-a)^2``."""

    gamma: float = 0.0
    is_lq = True

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise BadUtility(f"gamma must lie in [0, 1], got {self.gamma}")

    def u(self, a):
        arr, scalar = self._guard(a)
        g = self.gamma
        out = -(1.0 - g) * np.abs(1.0 - arr) - g * (1.0 - arr) ** 2
        return _ret(out, scalar)

    def u_prime(self, a):
        # left derivative at the peak
        arr, scalar = self._guard(a)
        if np.any(arr > 1.0):
            raise OutOfDomain("u_prime is defined for a <= 1 only")
        out = 1.0 + self.gamma - 2.0 * self.gamma * arr
        return _ret(out, scalar)

    def neg_u_second(self, a):
        arr, scalar = _as_float_or_array(a)
        return _ret(np.full_like(arr, 2.0 * self.gamma), scalar)

    @property
    def kappa(self) -> float:
        return 2.0 * self.gamma


@dataclass(frozen=True)
class TabulatedUtility(ProposerUtility):
    """Piecewise-linear utility through ``knots = ((a0, u0), (a1, u1), ...)``.

    The knot range must cover ``[0, 1]``, 1 must be a knot and the unique
    maximiser, and slopes must be nonincreasing.
    """

    knots: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.knots, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise BadUtility("need at least three (a, u) knots")
        xs, ys = pts[:, 0], pts[:, 1]
        if np.any(np.diff(xs) <= 0):
            raise BadUtility("knots must be strictly increasing in a")
        if xs[0] > 0.0 or xs[-1] < 1.0:
            raise BadUtility("knot range must cover [0, 1]")
        if not np.any(np.isclose(xs, 1.0, rtol=0, atol=1e-14)):
            raise BadUtility("a = 1 must be a knot")
        slopes = np.diff(ys) / np.diff(xs)
        if np.any(np.diff(slopes) > 1e-12):
            raise BadUtility("tabulated utility is not concave")
        left = xs[1:] <= 1.0 + 1e-14
        if np.any(slopes[left] <= 0) or np.any(slopes[~left] >= 0):
            raise BadUtility("utility must be uniquely maximised at a = 1")
        object.__setattr__(self, "knots", tuple(map(tuple, pts.tolist())))
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)
        object.__setattr__(self, "_slopes", slopes)

    def _in_range(self, a):
        arr, scalar = self._guard(a)
        if np.any(arr < self._xs[0] - 1e-14) or np.any(arr > self._xs[-1] + 1e-14):
            raise OutOfDomain("action outside tabulated range")
        return arr, scalar

    def u(self, a):
        arr, scalar = self._in_range(a)
        return _ret(np.interp(arr, self._xs, self._ys), scalar)

    def u_prime(self, a):
        arr, scalar = self._in_range(a)
        if np.any(arr > 1.0):
            raise OutOfDomain("u_prime is defined for a <= 1 only")
        # left derivative: segment whose right end is >= a
        idx = np.searchsorted(self._xs, arr, side="left") - 1
        idx = np.clip(idx, 0, len(self._slopes) - 1)
        return _ret(self._slopes[idx], scalar)

    def _curvatures(self):
        xs, s = self._xs, self._slopes
        mids = xs[1:-1]
        curv = (s[:-1] - s[1:]) / ((xs[2:] - xs[:-2]) / 2.0)
        return mids, curv

    def neg_u_second(self, a):
        arr, scalar = _as_float_or_array(a)
        mids, curv = self._curvatures()
        out = np.interp(arr, mids, curv)
        return _ret(out, scalar)

    @property
    def kappa(self) -> float:
        mids, curv = self._curvatures()
        sel = (mids >= 0.0) & (mids < 1.0)
        if not np.any(sel):
            return 0.0
        return max(0.0, float(np.min(curv[sel])))


@dataclass(frozen=True)
class ScaledUtility(ProposerUtility):
    """Positive multiple of another utility; same preferences over lotteries."""

    base: ProposerUtility = field(default_factory=LQUtility)
    factor: float = 1.0

    def __post_init__(self):
        if not self.factor > 0:
            raise BadUtility("scale factor must be positive")

    def u(self, a):
        return self.factor * self.base.u(a)

    def u_prime(self, a):
        return self.factor * self.base.u_prime(a)

    def neg_u_second(self, a):
        return self.factor * self.base.neg_u_second(a)

    @property
    def kappa(self) -> float:
        return self.factor * self.base.kappa


def u(util: ProposerUtility, a):
    return util.u(a)


def u_prime(util: ProposerUtility, a):
    return util.u_prime(a)


def kappa(util: ProposerUtility) -> float:
    return util.kappa


# ---------------------------------------------------------------------------
# Type distributions
# ---------------------------------------------------------------------------


class TypeDistribution:
    """Distribution of Vetoer's ideal point with cdf, density and slope."""

    support: tuple = (-math.inf, math.inf)

    def cdf(self, v):
        raise NotImplementedError

    def pdf(self, v):
        raise NotImplementedError

    def pdf_prime(self, v):
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        """Points where the density is not smooth, or where it concentrates."""
        return ()

    def modes(self) -> tuple:
        return ()

    def score(self, v):
        """``f'(v) / f(v)``, the slope of ``log f``."""
        return self.pdf_prime(v) / self.pdf(v)

    def _validate(self, check_positive: bool = True):
        grid = np.linspace(0.0, 1.0, 1001)
        f = self.pdf(grid)
        if not np.all(np.isfinite(f)) or (check_positive and np.any(f <= 0.0)):
            raise BadDistribution("density must be strictly positive on [0, 1]")
        lo, hi = self.support
        if self.cdf(lo) != 0.0 or abs(self.cdf(hi) - 1.0) > ATOL:
            raise BadDistribution("cdf must run from 0 to 1 over the support")


@dataclass(frozen=True)
class Normal(TypeDistribution):
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise BadDistribution("sigma must be positive")
        # positive everywhere analytically; tails may underflow in floating point
        self._validate(check_positive=False)

    def cdf(self, v):
        arr, scalar = _as_float_or_array(v)
        return _ret(special.ndtr((arr - self.mu) / self.sigma), scalar)

    def pdf(self, v):
        arr, scalar = _as_float_or_array(v)
        z = (arr - self.mu) / self.sigma
        return _ret(np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi)), scalar)

    def pdf_prime(self, v):
        arr, scalar = _as_float_or_array(v)
        return _ret(-(arr - self.mu) / self.sigma**2 * self.pdf(arr), scalar)

    def score(self, v):
        arr, scalar = _as_float_or_array(v)
        return _ret(-(arr - self.mu) / self.sigma**2, scalar)

    def breakpoints(self):
        return tuple(self.mu + k * self.sigma for k in range(-8, 9))

    def modes(self):
        return (self.mu,)


@dataclass(frozen=True)
class Uniform01(TypeDistribution):
    support = (0.0, 1.0)

    def __post_init__(self):
        self._validate()

    def cdf(self, v):
        arr, scalar = _as_float_or_array(v)
        return _ret(np.clip(arr, 0.0, 1.0), scalar)

    def pdf(self, v):
        arr, scalar = _as_float_or_array(v)
        return _ret(np.where((arr >= 0.0) & (arr <= 1.0), 1.0, 0.0), scalar)

    def pdf_prime(self, v):
        arr, scalar = _as_float_or_array(v)
        return _ret(np.zeros_like(arr), scalar)

    def breakpoints(self):
        return (0.0, 1.0)


@dataclass(frozen=True)
class PiecewiseLinearDensity(TypeDistribution):
    """Continuous piecewise-linear density through ``knots = ((v, f), ...)``.

    Heights are rescaled at construction so the density integrates to one.
    At a kink ``pdf_prime`` reports the right-hand slope.
    """

    knots: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.knots, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise BadDistribution("need at least two (v, f) knots")
        xs, ys = pts[:, 0], pts[:, 1]
        if np.any(np.diff(xs) <= 0):
            raise BadDistribution("knots must be strictly increasing in v")
        if np.any(ys < 0):
            raise BadDistribution("density heights must be nonnegative")
        if xs[0] > 0.0 or xs[-1] < 1.0:
            raise BadDistribution("support must cover [0, 1]")
        mass = float(np.sum(np.diff(xs) * (ys[1:] + ys[:-1]) / 2.0))
        if not mass > 0:
            raise BadDistribution("density has zero mass")
        ys = ys / mass
        cum = np.concatenate([[0.0], np.cumsum(np.diff(xs) * (ys[1:] + ys[:-1]) / 2.0)])
        object.__setattr__(self, "knots", tuple(map(tuple, np.column_stack([xs, ys]).tolist())))
        object.__setattr__(self, "support", (float(xs[0]), float(xs[-1])))
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)
        object.__setattr__(self, "_slopes", np.diff(ys) / np.diff(xs))
        object.__setattr__(self, "_cum", cum / cum[-1])
        self._validate()
        if abs(cum[-1] - 1.0) > ATOL:
            raise BadDistribution("normalisation failed")

    def _segment(self, arr):
        idx = np.searchsorted(self._xs, arr, side="right") - 1
        return np.clip(idx, 0, len(self._slopes) - 1)

    def cdf(self, v):
        arr, scalar = _as_float_or_array(v)
        idx = self._segment(arr)
        d = np.clip(arr, self._xs[0], self._xs[-1]) - self._xs[idx]
        out = self._cum[idx] + self._ys[idx] * d + 0.5 * self._slopes[idx] * d * d
        out = np.where(arr <= self._xs[0], 0.0, np.where(arr >= self._xs[-1], 1.0, out))
        return _ret(out, scalar)

    def pdf(self, v):
        arr, scalar = _as_float_or_array(v)
        inside = (arr >= self._xs[0]) & (arr <= self._xs[-1])
        return _ret(np.where(inside, np.interp(arr, self._xs, self._ys), 0.0), scalar)

    def pdf_prime(self, v):
        arr, scalar = _as_float_or_array(v)
        inside = (arr >= self._xs[0]) & (arr <= self._xs[-1])
        return _ret(np.where(inside, self._slopes[self._segment(arr)], 0.0), scalar)

    def breakpoints(self):
        return tuple(float(x) for x in self._xs)

    def modes(self):
        i = int(np.argmax(self._ys))
        return (float(self._xs[i]),)


@dataclass(frozen=True)
class TabulatedCDF(TypeDistribution):
    """Distribution given by cdf values on a grid, interpolated monotonically.

    The tabulated values are rescaled affinely so that the cdf runs from 0 at
    the first grid point to 1 at the last.
    """

    grid: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.grid, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise BadDistribution("need at least three (v, F) grid points")
        xs, Fs = pts[:, 0], pts[:, 1]
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(Fs) < 0):
            raise BadDistribution("grid must be increasing in v and nondecreasing in F")
        if xs[0] > 0.0 or xs[-1] < 1.0:
            raise BadDistribution("support must cover [0, 1]")
        Fs = (Fs - Fs[0]) / (Fs[-1] - Fs[0])
        interp = PchipInterpolator(xs, Fs, extrapolate=False)
        object.__setattr__(self, "grid", tuple(map(tuple, np.column_stack([xs, Fs]).tolist())))
        object.__setattr__(self, "support", (float(xs[0]), float(xs[-1])))
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_F", interp)
        object.__setattr__(self, "_f", interp.derivative(1))
        object.__setattr__(self, "_fp", interp.derivative(2))
        self._validate()

    def cdf(self, v):
        arr, scalar = _as_float_or_array(v)
        out = self._F(np.clip(arr, self._xs[0], self._xs[-1]))
        out = np.where(arr <= self._xs[0], 0.0, np.where(arr >= self._xs[-1], 1.0, out))
        return _ret(out, scalar)

    def pdf(self, v):
        arr, scalar = _as_float_or_array(v)
        out = np.nan_to_num(self._f(arr), nan=0.0)
        return _ret(np.where((arr < self._xs[0]) | (arr > self._xs[-1]), 0.0, out), scalar)

    def pdf_prime(self, v):
        arr, scalar = _as_float_or_array(v)
        out = np.nan_to_num(self._fp(arr), nan=0.0)
        return _ret(np.where((arr < self._xs[0]) | (arr > self._xs[-1]), 0.0, out), scalar)

    def breakpoints(self):
        xs = self._xs[(self._xs >= 0.0) & (self._xs <= 1.0)]
        return tuple(float(x) for x in xs[:50])


def cdf(dist: TypeDistribution, v):
    return dist.cdf(v)


def pdf(dist: TypeDistribution, v):
    return dist.pdf(v)


def pdf_prime(dist: TypeDistribution, v):
    return dist.pdf_prime(v)


def integrate_uf(util: ProposerUtility, dist: TypeDistribution, lo: float, hi: float,
                 epsabs: float = 1e-12) -> float:
    """``int_lo^hi u(v) f(v) dv`` by adaptive quadrature, split at kinks."""
    if hi <= lo:
        return 0.0
    lo_s, hi_s = dist.support
    lo, hi = max(lo, lo_s), min(hi, hi_s)
    if hi <= lo:
        return 0.0
    pts = sorted({p for p in (*dist.breakpoints(), 1.0) if lo < p < hi})
    edges = [lo, *pts, hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda v: util.u(v) * dist.pdf(v), a, b,
                                epsabs=epsabs, epsrel=1e-12, limit=200)
        total += val
    return total


# ---------------------------------------------------------------------------
# Delegation sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DelegationSet:
    """Closed menu of actions: a union of intervals and isolated points.

    The status quo (and any other veto option) is always available on top of
    the menu and need not be listed.
    """

    intervals: tuple = ()
    points: tuple = ()

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        for a, b in ivs:
            if b < a:
                raise ValueError(f"empty interval [{a}, {b}]")
        pts = tuple(sorted({float(p) for p in self.points}))
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "points", pts)

    @classmethod
    def interval(cls, c: float, top: float = 1.0) -> "DelegationSet":
        return cls(intervals=((c, top),))

    @classmethod
    def from_points(cls, points: Sequence[float]) -> "DelegationSet":
        return cls(points=tuple(points))

    def components(self, extra: Sequence[float] = ()) -> list:
        """Sorted, merged ``(lo, hi)`` pieces of the menu plus ``extra`` points."""
        pieces = [*self.intervals, *((p, p) for p in self.points), *((e, e) for e in extra)]
        pieces.sort()
        merged: list = []
        for a, b in pieces:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return merged

    def union(self, other: "DelegationSet") -> "DelegationSet":
        return DelegationSet(self.intervals + other.intervals, self.points + other.points)

    def contains(self, a: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= a <= hi + tol for lo, hi in self.components())

    def to_json(self) -> dict:
        return {"intervals": [list(iv) for iv in self.intervals], "points": list(self.points)}


def induced_action(dset: DelegationSet, v, defaults: Sequence[float] = (0.0,)):
    """Vetoer's choice from the menu plus veto options (nearest action).

    Ties go to the higher action.
    """
    arr, scalar = _as_float_or_array(v)
    comps = dset.components(defaults)
    out = np.empty_like(arr)
    lo = np.array([c[0] for c in comps])
    hi = np.array([c[1] for c in comps])
    # project onto each component and keep the closest; equidistant ties go
    # to the higher action, which Proposer prefers on [0, 1]
    proj = np.clip(arr[..., None], lo, hi)
    dist = np.abs(proj - arr[..., None])
    near = dist <= dist.min(axis=-1, keepdims=True) + 1e-12
    pick = near.shape[-1] - 1 - np.argmax(near[..., ::-1], axis=-1)
    out = np.take_along_axis(proj, pick[..., None], axis=-1)[..., 0]
    return _ret(out, scalar)


def delegation_value(util: ProposerUtility, dist: TypeDistribution, dset: DelegationSet,
                     defaults: Sequence[float] = (0.0,)) -> float:
    """Proposer's expected utility when Vetoer picks from ``dset`` plus ``defaults``."""
    comps = dset.components(defaults)
    F = dist.cdf
    total = util.u(comps[0][0]) * F(comps[0][0])
    for i, (lo, hi) in enumerate(comps):
        if hi > lo:
            total += integrate_uf(util, dist, lo, hi)
        if i + 1 < len(comps):
            nxt = comps[i + 1][0]
            mid = 0.5 * (hi + nxt)
            total += util.u(hi) * (F(mid) - F(hi)) + util.u(nxt) * (F(nxt) - F(mid))
    top = comps[-1][1]
    total += util.u(top) * (1.0 - F(top))
    return float(total)


def vetoer_payoff(v, a):
    """Vetoer's utility ``-(v - a)**2``."""
    return -(np.asarray(v, dtype=float) - a) ** 2


# ---------------------------------------------------------------------------
# JSON construction
# ---------------------------------------------------------------------------

_UTILITY_FIELDS = {"lq": {"family", "gamma"}, "tabulated": {"family", "knots"}}
_DIST_FIELDS = {
    "normal": {"family", "mu", "sigma"},
    "uniform": {"family"},
    "uniform01": {"family"},
    "pwl": {"family", "knots"},
    "tabulated_cdf": {"family", "grid"},
}


def _check_fields(spec: dict, allowed: dict, what: str):
    if not isinstance(spec, dict):
        raise ConfigError(f"{what}: expected an object")
    family = spec.get("family")
    if family not in allowed:
        raise ConfigError(f"{what}.family: unknown family {family!r}")
    extra = set(spec) - allowed[family]
    if extra:
        raise ConfigError(f"{what}.{sorted(extra)[0]}: unknown field")
    missing = allowed[family] - set(spec)
    if missing:
        raise ConfigError(f"{what}.{sorted(missing)[0]}: missing field")
    return family


def utility_from_json(spec: dict) -> ProposerUtility:
    family = _check_fields(spec, _UTILITY_FIELDS, "utility")
    try:
        if family == "lq":
            return LQUtility(float(spec["gamma"]))
        return TabulatedUtility(tuple(map(tuple, spec["knots"])))
    except (BadUtility, TypeError, ValueError) as exc:
        raise ConfigError(f"utility: {exc}") from exc


def distribution_from_json(spec: dict) -> TypeDistribution:
    family = _check_fields(spec, _DIST_FIELDS, "distribution")
    try:
        if family == "normal":
            return Normal(float(spec["mu"]), float(spec["sigma"]))
        if family in ("uniform", "uniform01"):
            return Uniform01()
        if family == "pwl":
            return PiecewiseLinearDensity(tuple(map(tuple, spec["knots"])))
        return TabulatedCDF(tuple(map(tuple, spec["grid"])))
    except (BadDistribution, TypeError, ValueError) as exc:
        raise ConfigError(f"distribution: {exc}") from exc


def utility_to_json(util: ProposerUtility) -> dict:
    if isinstance(util, LQUtility):
        return {"family": "lq", "gamma": util.gamma}
    if isinstance(util, TabulatedUtility):
        return {"family": "tabulated", "knots": [list(k) for k in util.knots]}
    raise TypeError(f"cannot serialise {type(util).__name__}")


def distribution_to_json(dist: TypeDistribution) -> dict:
    if isinstance(dist, Normal):
        return {"family": "normal", "mu": dist.mu, "sigma": dist.sigma}
    if isinstance(dist, Uniform01):
        return {"family": "uniform"}
    if isinstance(dist, PiecewiseLinearDensity):
        return {"family": "pwl", "knots": [list(k) for k in dist.knots]}
    if isinstance(dist, TabulatedCDF):
        return {"family": "tabulated_cdf", "grid": [list(k) for k in dist.grid]}
    raise TypeError(f"cannot serialise {type(dist).__name__}")


def with_param(util: ProposerUtility, dist: TypeDistribution, name: str, value: float):
    """Copy of ``(util, dist)`` with one of ``gamma``, ``mu``, ``sigma`` replaced."""
    if name == "gamma":
        if not isinstance(util, LQUtility):
            raise ConfigError("gamma sweeps need an LQ utility")
        return replace(util, gamma=value), dist
    if name in ("mu", "sigma"):
        if not isinstance(dist, Normal):
            raise ConfigError(f"{name} sweeps need a normal distribution")
        return util, replace(dist, **{name: value})
    raise ConfigError(f"cannot sweep parameter {name!r}")


# ---------------------------------------------------------------------------
# Example distributions used throughout the tests and demos
# ---------------------------------------------------------------------------


def example_e1_density(delta: float = 0.05, slope: float = 1.0, base: float = 1.0):
    """Density rising with slope ``slope`` except on ``(1/2-delta, 1/2+delta)``.

    On the dip window it falls at the same absolute slope; the result is
    rescaled to integrate to one.
    """
    lo, hi = 0.5 - delta, 0.5 + delta
    f_lo = base + slope * lo
    f_hi = f_lo - slope * 2 * delta
    f_1 = f_hi + slope * (1.0 - hi)
    return PiecewiseLinearDensity(((0.0, base), (lo, f_lo), (hi, f_hi), (1.0, f_1)))


def single_dipped_density(dip: float = 0.6, left: float = 2.0, bottom: float = 0.4,
                          right: float = 2.0):
    """V-shaped density on ``[0, 1]`` with its minimum at ``dip``."""
    return PiecewiseLinearDensity(((0.0, left), (dip, bottom), (1.0, right)))
