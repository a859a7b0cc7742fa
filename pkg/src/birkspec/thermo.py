"""Pressure, Gibbs measures and the Birkhoff spectrum of locally constant
potentials.

The spectrum at an interior level ``alpha`` is the Legendre transform of the
pressure ``P(t) = log rho(M_t)``: with ``t`` solving ``P'(t) = alpha``,

    S(alpha) = (P(t) - t * alpha) / log 2.

At the two support endpoints the value is the entropy of the tight subgraph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import perron
from .debruijn import (
    WeightedDeBruijn,
    build_graph,
    endpoints,
    max_mean_cycle,
    potential,
    subgraph_entropy,
    tight_subgraph,
)
from .shift_core import (
    PccFunction,
    PreconditionError,
    integrate,
    sup_distance,
)

LOG2 = math.log(2.0)
DEGENERATE_WIDTH = 1e-12
T_START = 64.0


def _side(side: str) -> str:
    if side not in ("min", "max"):
        raise PreconditionError(f"side must be 'min' or 'max', got {side!r}")
    return side


@lru_cache(maxsize=256)
def _gauge(f: PccFunction, side: str):
    """Maximum cycle mean of ``+f`` or ``-f`` and a matching potential."""
    g = f if side == "max" else f.negated()
    G = build_graph(g)
    lam = float(max_mean_cycle(G, tie_break=False).mean)
    return lam, np.asarray(potential(G, lam), dtype=float)


class _Transfer:
    """The transfer matrix ``M_t`` (entries ``exp(t f(u))`` on edges) in a
    balanced gauge.

    Conjugating by ``diag(exp(t phi))`` and dividing by ``exp(t alpha*)``
    leaves every entry at most 1 and the spectral radius in [1, 2]; the
    Perron root, the stationary vector and the Markov transitions are
    unchanged by the conjugation.  ``shift`` is the log of the scale
    factor that was divided out.
    """

    def __init__(self, f: PccFunction, t: float):
        k = f.depth
        self.n = 1 << k
        side = "max" if t >= 0 else "min"
        lam, phi = _gauge(f, side)
        s = abs(t)
        g = s * (f.array if side == "max" else -f.array)
        self.shift = s * lam
        u = np.arange(self.n)
        mask = self.n - 1
        self.c0 = (u << 1) & mask
        self.c1 = self.c0 | 1
        self.p0 = u >> 1
        self.p1 = self.p0 | (1 << (k - 1))
        base = g - self.shift + s * phi
        self.w0 = np.exp(np.minimum(base - s * phi[self.c0], 0.0))
        self.w1 = np.exp(np.minimum(base - s * phi[self.c1], 0.0))

    def right(self, x):
        return self.w0 * x[self.c0] + self.w1 * x[self.c1]

    def left(self, y):
        z0, z1 = y * self.w0, y * self.w1
        odd = (np.arange(self.n) & 1).astype(bool)
        return np.where(odd, z1[self.p0] + z1[self.p1], z0[self.p0] + z0[self.p1])

    def dense(self):
        if self.n > perron.DENSE_LIMIT:
            return None
        M = np.zeros((self.n, self.n))
        rows = np.arange(self.n)
        M[rows, self.c0] = self.w0
        M[rows, self.c1] = self.w1
        return M

    def triple(self, need_left=True):
        return perron.perron_triple(
            self.n, self.right, self.left, self.dense(), need_left=need_left, shift=1.0
        )


def pressure(f: PccFunction, t: float) -> float:
    """Topological pressure ``P(t f) = log rho(M_t)``."""
    T = _Transfer(f.as_float(), float(t))
    rho, _, _ = T.triple(need_left=False)
    return math.log(rho) + T.shift


@dataclass(frozen=True)
class MarkovMeasure:
    graph: WeightedDeBruijn
    transitions: np.ndarray
    stationary: np.ndarray

    @property
    def entropy(self) -> float:
        P = self.transitions
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(P > 0, P * np.log(P), 0.0)
        return float(-np.dot(self.stationary, terms.sum(axis=1)))

    @property
    def mean(self) -> float:
        return float(np.dot(self.stationary, self.graph.function.array))


def _stationary(r, l):
    pi = l * r
    s = pi.sum()
    if not np.isfinite(s) or s <= 0:
        raise PreconditionError("Perron vectors have no overlap")
    return pi / s


def _mean_at(f: PccFunction, t: float) -> float:
    _, r, l = _Transfer(f, t).triple()
    return float(np.dot(_stationary(r, l), f.array))


def gibbs_measure(f: PccFunction, t: float) -> MarkovMeasure:
    """Equilibrium state of ``t f`` as a Markov chain on the de Bruijn graph."""
    f = f.as_float()
    T = _Transfer(f, float(t))
    _, r, l = T.triple()
    n = T.n
    a, b = T.w0 * r[T.c0], T.w1 * r[T.c1]
    # a + b equals rho * r up to rounding; dividing by it keeps rows stochastic
    total = a + b
    dead = total <= 0
    if np.any(dead):
        # r underflowed at these rows; they carry no stationary mass
        a, b = np.where(dead, 0.5, a), np.where(dead, 0.5, b)
        total = a + b
    P = np.zeros((n, n))
    rows = np.arange(n)
    P[rows, T.c0] = a / total
    P[rows, T.c1] += b / total
    return MarkovMeasure(build_graph(f), P, _stationary(r, l))


def _degenerate(lo, hi) -> bool:
    return hi - lo <= DEGENERATE_WIDTH


def endpoint_dimension(f: PccFunction, side: str = "max") -> float:
    """Spectrum value at the ``side`` endpoint of its support."""
    sub = tight_subgraph(build_graph(f), _side(side))
    return subgraph_entropy(sub) / LOG2


@lru_cache(maxsize=256)
def _cached_endpoint_dimension(f: PccFunction, side: str) -> float:
    return endpoint_dimension(f, side)


@lru_cache(maxsize=256)
def _cached_endpoints(f: PccFunction):
    lo, hi = endpoints(f)
    return float(lo), float(hi)


def _solve_t(f: PccFunction, alpha: float, mean0: float):
    """Return ``t`` with ``mean(t) = alpha``, or None if not bracketed."""
    sign = 1.0 if alpha > mean0 else -1.0
    t_cap = 2.0**20 / max(float(f.norm), 1e-300)
    T = T_START
    while True:
        edge = sign * min(T, t_cap)
        m = _mean_at(f, edge)
        if (m - alpha) * sign >= 0:
            break
        if T >= t_cap:
            return None
        T *= 2.0
    lo, hi = (0.0, edge) if sign > 0 else (edge, 0.0)
    return brentq(lambda t: _mean_at(f, t) - alpha, lo, hi, xtol=1e-14, rtol=1e-15)


def spectrum_at(f: PccFunction, alpha: float) -> float:
    """Birkhoff spectrum ``S_f(alpha)``."""
    f = f.as_float()
    alpha = float(alpha)
    lo, hi = _cached_endpoints(f)
    if _degenerate(lo, hi):
        return 1.0 if abs(alpha - lo) <= DEGENERATE_WIDTH else 0.0
    tol = 1e-12 * max(1.0, float(f.norm))
    if alpha < lo - tol or alpha > hi + tol:
        return 0.0
    if abs(alpha - lo) <= tol:
        return _cached_endpoint_dimension(f, "min")
    if abs(alpha - hi) <= tol:
        return _cached_endpoint_dimension(f, "max")
    mean0 = float(integrate(f))
    if alpha == mean0:
        return 1.0
    t = _solve_t(f, alpha, mean0)
    if t is None:
        side = "max" if alpha > mean0 else "min"
        return _cached_endpoint_dimension(f, side)
    s = (pressure(f, t) - t * alpha) / LOG2
    return min(max(s, 0.0), 1.0)


@dataclass(frozen=True)
class SpectrumCurve:
    function: PccFunction
    alpha_min: float
    alpha_max: float
    alphas: np.ndarray
    values: np.ndarray
    integral_alpha: float

    @property
    def samples(self):
        return list(zip(self.alphas.tolist(), self.values.tolist()))

    @property
    def degenerate(self) -> bool:
        return _degenerate(self.alpha_min, self.alpha_max)

    def is_concave(self, tol=1e-8) -> bool:
        a, s = self.alphas, self.values
        if len(a) < 3:
            return True
        # s_i >= interpolation of its neighbours
        w = (a[1:-1] - a[:-2]) / (a[2:] - a[:-2])
        chord = s[:-2] + w * (s[2:] - s[:-2])
        return bool(np.all(s[1:-1] >= chord - tol))


def spectrum_curve(f: PccFunction, grid_points: int = 101) -> SpectrumCurve:
    """Sample the spectrum on a uniform grid spanning its support."""
    if grid_points < 3:
        raise PreconditionError("grid_points must be at least 3")
    f = f.as_float()
    lo, hi = _cached_endpoints(f)
    if _degenerate(lo, hi):
        alphas = np.array([lo])
    else:
        alphas = lo + (hi - lo) * np.arange(grid_points) / (grid_points - 1)
        alphas[-1] = hi
    values = np.array([spectrum_at(f, a) for a in alphas])
    return SpectrumCurve(f, lo, hi, alphas, values, float(integrate(f)))


def is_spectrum_continuous(f: PccFunction, tol: float = 1e-9) -> bool:
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    return all(endpoint_dimension(f, s) < tol for s in ("min", "max"))


def one_sided_slopes(curve: SpectrumCurve, side: str, deltas) -> list:
    """Difference quotients of the spectrum at a support endpoint.

    For ``side="max"`` each entry is ``(S(a - d) - S(a)) / (-d)`` with ``a``
    the right endpoint; for ``side="min"`` it is ``(S(a + d) - S(a)) / d``.
    """
    _side(side)
    if curve.degenerate:
        raise PreconditionError("spectrum support is a single point")
    width = curve.alpha_max - curve.alpha_min
    f = curve.function
    if side == "max":
        a, sgn = curve.alpha_max, -1.0
    else:
        a, sgn = curve.alpha_min, 1.0
    s_end = spectrum_at(f, a)
    out = []
    for d in deltas:
        d = float(d)
        if not 0 < d < width:
            raise PreconditionError(f"delta {d} outside (0, {width})")
        out.append((spectrum_at(f, a + sgn * d) - s_end) / (sgn * d))
    return out


@dataclass(frozen=True)
class NormContinuityReport:
    passed: bool
    worst_gap: float
    worst_alpha: float


def _best_nearby(g: PccFunction, alpha: float, eps: float) -> float:
    """max of S_g over [alpha - eps, alpha + eps].

    S_g is concave on its support and peaks at the integral of g, so the
    maximum sits at the point of the window nearest that integral.
    """
    lo, hi = _cached_endpoints(g)
    a, b = max(alpha - eps, lo), min(alpha + eps, hi)
    if a > b:
        return 0.0
    peak = float(integrate(g))
    return spectrum_at(g, min(max(peak, a), b))


def norm_continuity_check(
    f: PccFunction, g: PccFunction, eps: float, grid_points: int = 33, slack=1e-6
) -> NormContinuityReport:
    """Check that S_g reaches S_f(alpha) within eps of every grid alpha."""
    dist = float(sup_distance(f, g))
    if not dist < eps:
        raise PreconditionError(f"sup distance {dist!r} is not below eps={eps!r}")
    curve = spectrum_curve(f, grid_points)
    worst, worst_alpha = -math.inf, float(curve.alphas[0])
    for a, s in zip(curve.alphas, curve.values):
        gap = s - _best_nearby(g.as_float(), float(a), eps)
        if gap > worst:
            worst, worst_alpha = gap, float(a)
    return NormContinuityReport(worst <= slack, float(worst), worst_alpha)
