"""Generators for explicit potentials and perturbations, with verifiers.

Word-heavy routines here work on ``str`` words of '0'/'1' internally since
slicing and comparison of strings is fast; public results use the tuple
words of :mod:`shift_core`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .debruijn import build_graph, endpoints, max_mean_cycle
from .dimension import moran_dimension
from .shift_core import (
    PccFunction,
    PreconditionError,
    ProceduralFunction,
    all_words,
    conjugate,
    from_index,
    index,
    indicator,
    integrate,
    refine,
    word,
    word_str,
)

TABLE_DEPTH_CAP = 16


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def example_indicator(exact=False) -> PccFunction:
    """1 on sequences starting with 1, else 0."""
    return indicator("1", exact)


def example23(exact=False) -> PccFunction:
    """Depth-3 odd potential whose spectrum is positive at both endpoints."""
    base = {"000": -2, "010": -2, "001": -3, "100": -1}
    table = [0] * 8
    for w, v in base.items():
        table[index(word(w))] = v
        table[index(conjugate(word(w)))] = -v
    return PccFunction(3, tuple(table), exact)


# ---------------------------------------------------------------------------
# the X/Y block construction


@dataclass(frozen=True)
class ConstructionT41:
    base: PccFunction
    eps: float
    A: tuple
    B: tuple
    ell: int
    alpha_star_max: float
    h: ProceduralFunction = field(repr=False, compare=False)

    @property
    def k_A(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return self.ell + 7

    @property
    def X(self) -> tuple:
        return self.A * (2 * self.ell) + self.A + self.A + self.B + self.A + self.A

    @property
    def Y(self) -> tuple:
        return self.A * (2 * self.ell) + self.A + self.B + self.A * 3

    @property
    def block_length(self) -> int:
        return (2 * self.ell + 5) * self.k_A

    @property
    def h_depth(self) -> int:
        return self.m * self.block_length

    @property
    def bump(self) -> float:
        return float(self.eps) / 4

    @property
    def threshold(self) -> float:
        """alpha*_max + eps / (32 k_A)."""
        return float(self.alpha_star_max) + float(self.eps) / (32 * self.k_A)

    @property
    def alpha_ell(self) -> float:
        """Block average of the base function along any point of {X, Y}^inf."""
        w = self.X + self.Y
        d = self.base.depth
        return math.fsum(
            self.base.evaluate(w[j : j + d]) for j in range(self.block_length)
        ) / self.block_length

    @property
    def b_star(self) -> float:
        """Window average of h over one block, on the point (XY)^inf."""
        return sp7a_windows(self, ("X", "Y"), 0)[0]

    @property
    def b_star_closed_form(self) -> float:
        return self.alpha_ell + self.ell * self.bump / self.block_length

    @property
    def dim_H(self) -> float:
        return 1.0 / self.block_length

    def moran_dim_H(self) -> float:
        return moran_dimension([self.X, self.Y])

    def g(self, w) -> float:
        return self.bump if in_P(self, word_str(w)) else 0.0

    def to_json(self) -> dict:
        return {
            "A": word_str(self.A),
            "B": word_str(self.B),
            "X": word_str(self.X),
            "Y": word_str(self.Y),
            "ell": self.ell,
            "m": self.m,
            "k_A": self.k_A,
            "eps": float(self.eps),
            "alpha_star_max": float(self.alpha_star_max),
            "b_star": self.b_star,
            "threshold": self.threshold,
            "h_depth": self.h_depth,
            "dim_H": self.dim_H,
        }


def _leading_repeats(s: str, a: str, limit: int) -> int:
    k, r = len(a), 0
    while r < limit and s[r * k : (r + 1) * k] == a:
        r += 1
    return r


def in_P(c: ConstructionT41, s: str) -> bool:
    """Whether a sequence with prefix ``s`` lies in the bump set of ``g``.

    That set consists of the points beginning with ``U_1[i k_A:] U_2 ... U_m``
    for some i < ell and blocks ``U_j`` in {X, Y}.
    """
    a, b = word_str(c.A), word_str(c.B)
    k, ell, L = c.k_A, c.ell, c.block_length
    X, Y = word_str(c.X), word_str(c.Y)
    r = _leading_repeats(s, a, 2 * ell + 3)
    if s[r * k : (r + 1) * k] != b:
        return False
    starts = []
    # tail of X is A^(2l-i+2) B A A, tail of Y is A^(2l-i+1) B A A A
    if ell + 3 <= r <= 2 * ell + 2 and s[(r + 1) * k : (r + 3) * k] == a + a:
        starts.append((r + 3) * k)
    if ell + 2 <= r <= 2 * ell + 1 and s[(r + 1) * k : (r + 4) * k] == a * 3:
        starts.append((r + 4) * k)
    for pos in starts:
        if all(s[pos + j * L : pos + (j + 1) * L] in (X, Y) for j in range(c.m - 1)):
            return True
    return False


def _min_ell(kA: int, spread: Fraction, eps: Fraction) -> int:
    # ell * eps / 8 > 5 k_A spread, and ell / (8 (2 ell + 5)) > 1/32 iff ell >= 3
    return max(3, math.floor(40 * kA * spread / eps) + 1)


def theorem41(f: PccFunction, eps, ell_override: Optional[int] = None) -> ConstructionT41:
    """Perturb ``f`` by at most ``eps/4`` so the new maximal level set has
    positive dimension."""
    eps_x = _exact(eps)
    if eps_x <= 0:
        raise PreconditionError("eps must be positive")
    fe = f.as_exact()
    lo, hi = endpoints(fe)
    if hi - lo == 0:
        raise PreconditionError("base function has a one-point spectrum")
    p_word = max_mean_cycle(build_graph(fe)).witness.canonical().period_word
    p = len(p_word)
    kA = p * f.depth // math.gcd(p, f.depth)
    A = p_word * (kA // p)
    B = (1,) * kA if A == (0,) * kA else (0,) * kA
    spread = hi - fe.alpha_min
    ell_min = _min_ell(kA, spread, eps_x)
    if ell_override is None:
        ell = ell_min
    else:
        ell = int(ell_override)
        if ell < ell_min:
            raise PreconditionError(
                f"ell={ell} violates the size conditions; minimum is {ell_min}"
            )
    holder = {}

    def rule(w):
        return float(f.evaluate(w)) + holder["c"].g(w)

    depth = (ell + 7) * (2 * ell + 5) * kA
    h = ProceduralFunction(max(depth, f.depth), rule, "theorem41_h")
    c = ConstructionT41(f.as_float(), float(eps_x), A, B, ell, float(hi), h)
    holder["c"] = c
    return c


def _point_prefix(c: ConstructionT41, u_choices: Sequence[str], n_blocks: int) -> str:
    blocks = {"X": word_str(c.X), "Y": word_str(c.Y)}
    try:
        seq = [blocks[u] for u in u_choices]
    except KeyError as exc:
        raise PreconditionError(f"block choices must be 'X' or 'Y', got {exc}") from None
    if not seq:
        raise PreconditionError("no block choices given")
    return "".join(seq[j % len(seq)] for j in range(n_blocks))


def g_positive_positions(c: ConstructionT41, u_choices, t_max: int):
    """Positions j < (t_max + 1)|X| where g is positive along ``u^inf``."""
    L = c.block_length
    s = _point_prefix(c, u_choices, t_max + 1 + c.m + 1)
    return [j for j in range((t_max + 1) * L) if in_P(c, s[j:])]


def sp7a_windows(c: ConstructionT41, u_choices, t_max: int):
    """Block-window averages of ``h`` along ``u^inf`` for t = 0..t_max.

    ``u_choices`` is a sequence of 'X'/'Y' repeated periodically.
    """
    if t_max < 0:
        raise PreconditionError("t_max must be nonnegative")
    L = c.block_length
    s = _point_prefix(c, u_choices, t_max + 1 + c.m + 1)
    bits = np.frombuffer(s.encode(), dtype=np.uint8) - ord("0")
    d = c.base.depth
    idx = np.zeros(len(bits) - d + 1, dtype=np.int64)
    for j in range(d):
        idx = (idx << 1) | bits[j : j + len(idx)]
    fvals = c.base.array[idx]
    out = []
    for t in range(t_max + 1):
        terms = [
            fvals[j] + (c.bump if in_P(c, s[j:]) else 0.0)
            for j in range(t * L, (t + 1) * L)
        ]
        out.append(math.fsum(terms) / L)
    return out


def verify_sp7a(c: ConstructionT41, u_choices, t_max: int = 3, tol=1e-12) -> bool:
    """Every block window exceeds alpha*_max + eps/(32 k_A) and equals b*."""
    wins = sp7a_windows(c, u_choices, t_max)
    b = c.b_star
    return all(w > c.threshold and abs(w - b) <= tol for w in wins)


# ---------------------------------------------------------------------------
# continuity-restoring perturbation


def _distance_to_orbit(f: PccFunction, m: int):
    w = max_mean_cycle(build_graph(f)).witness.canonical().period_word
    p = len(w)
    if m < f.depth + p:
        raise PreconditionError(f"depth m={m} below depth + period = {f.depth + p}")
    idx = np.arange(1 << m, dtype=np.int64)
    reps = m // p + 1
    g0 = None
    for i in range(p):
        rot = index((w[i:] + w[:i]) * reps) >> (reps * p - m)
        # the truncated distance of two m-words is their XOR read as a binary fraction
        d = (idx ^ rot).astype(float) / float(1 << m)
        g0 = d if g0 is None else np.minimum(g0, d)
    return g0


def lemma45_offset(f: PccFunction, eps, m: int) -> float:
    """The constant ``c = eps * integral(g0)`` added by :func:`lemma45`."""
    return float(eps) * float(np.mean(_distance_to_orbit(f, m)))


def lemma45(f: PccFunction, eps, m: int) -> PccFunction:
    """``f - eps * g0 + c`` with ``g0`` the distance to the maximizing orbit,
    truncated at depth ``m``, and ``c`` making the perturbation mean zero."""
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    g0 = _distance_to_orbit(f, m)
    c = float(eps) * float(np.mean(g0))
    fm = refine(f.as_float(), m)
    return PccFunction(m, tuple(fm.array - float(eps) * g0 + c))


# ---------------------------------------------------------------------------
# run-length potentials


def lemma53(a, b, L: int, exact=False) -> PccFunction:
    """``b`` on sequences starting with ``1^L``, ``a`` elsewhere."""
    if not b > a:
        raise PreconditionError("need b > a")
    if L < 6:
        raise PreconditionError("L must be at least 6")
    table = [a] * (1 << L)
    table[-1] = b
    return PccFunction(L, tuple(table), exact)


@dataclass(frozen=True)
class StaircaseParams:
    L: tuple
    tau: Optional[float] = None

    def __post_init__(self):
        L = tuple(int(x) for x in self.L)
        if not L:
            raise PreconditionError("need at least one level")
        if L[0] <= 5:
            raise PreconditionError("L_1 must exceed 5")
        if any(b <= a for a, b in zip(L, L[1:])):
            raise PreconditionError("run lengths must increase strictly")
        object.__setattr__(self, "L", L)

    @property
    def levels(self) -> int:
        return len(self.L)

    @property
    def thresholds(self) -> tuple:
        return tuple(1 - 2.0 ** (-j) for j in range(1, self.levels + 1))

    @classmethod
    def from_selector(cls, levels: int, tau: float) -> "StaircaseParams":
        L, prev = [], 5
        for n in range(1, levels + 1):
            prev = max(lchoice_selector(n, tau), prev + 1)
            L.append(prev)
        return cls(tuple(L), tau)


def _staircase_value(params: StaircaseParams, w) -> float:
    run = 1
    while run < len(w) and w[run] == w[0]:
        run += 1
    t = params.thresholds
    j = sum(1 for Lj in params.L if run >= Lj)
    if j == 0:
        return 0.0
    return t[j - 1] if w[0] == 1 else -t[j - 1]


def theorem52(params: StaircaseParams, tabulate: bool = True):
    """Odd staircase potential valued by the length of the leading run."""
    D = params.L[-1]
    rule = lambda w: _staircase_value(params, tuple(w))  # noqa: E731
    if not tabulate:
        return ProceduralFunction(D, rule, "staircase")
    if D > TABLE_DEPTH_CAP:
        raise PreconditionError(
            f"depth {D} exceeds the table cap {TABLE_DEPTH_CAP}; use tabulate=False"
        )
    idx = np.arange(1 << D, dtype=np.int64)
    mask = (1 << D) - 1
    lead0 = D - np.array([int(i).bit_length() for i in idx])
    lead1 = D - np.array([int(i).bit_length() for i in (~idx) & mask])
    t = np.array((0.0,) + params.thresholds)
    L = np.array(params.L)
    level1 = np.searchsorted(L, lead1, side="right")
    level0 = np.searchsorted(L, lead0, side="right")
    table = np.where(lead1 > 0, t[level1], -t[level0]) + 0.0
    return PccFunction(D, tuple(table))


def lchoice_lhs(L: int) -> float:
    """log2 of (e L / 2)^(2 / L)."""
    return (2.0 / L) * math.log2(math.e * L / 2.0)


def lchoice_selector(n: int, tau: float) -> int:
    """Smallest L > 5 with (e L / 2)^(2/L) < 2^(tau / 4^n)."""
    if tau <= 0:
        raise PreconditionError("tau must be positive")
    rhs = tau / 4.0**n

    def ok(L):
        return lchoice_lhs(L) < rhs

    # the left side decreases for L > 2, so search upward then bisect
    if ok(6):
        return 6
    lo, hi = 6, 12
    while not ok(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def remark55_majority(k: int, exact=False) -> PccFunction:
    """+1 where the first 2k+1 symbols have more 1s than 0s, else -1."""
    if k < 1:
        raise PreconditionError("k must be positive")
    d = 2 * k + 1
    return PccFunction.from_rule(d, lambda w: 1 if sum(w) > k else -1, exact)


def remark55_biased(k: int, exact=False) -> PccFunction:
    """-1 on [0^k] and 1/(2^k - 1) elsewhere; mean zero."""
    if k < 1:
        raise PreconditionError("k must be positive")
    v = Fraction(1, 2**k - 1)
    table = [-1] + [v] * (2**k - 1)
    return PccFunction(k, tuple(table) if exact else tuple(float(x) for x in table), exact)


# ---------------------------------------------------------------------------
# de-revealing perturbation


def _is_tied(x, y, f: PccFunction) -> bool:
    if f.exact:
        return x == y
    return abs(x - y) <= 1e-12 * max(1.0, float(f.norm))


def derevealize_choice(f: PccFunction):
    """Pick the cylinder to bump: returns ``(case, word)``.

    ``case`` is "unrevealed", "mixed" or "run".
    """
    k = f.depth
    top = f.alpha_max
    _, star = endpoints(f)
    argmax = [u for u in range(1 << k) if _is_tied(f.values[u], top, f)]
    if not _is_tied(star, top, f):
        return "unrevealed", from_index(argmax[0], k)
    G = nx.DiGraph()
    G.add_nodes_from(argmax)
    mask = (1 << k) - 1
    for u in argmax:
        for b in (0, 1):
            v = ((u << 1) & mask) | b
            if v in G:
                G.add_edge(u, v)
    on_cycle = set()
    for comp in nx.strongly_connected_components(G):
        if len(comp) > 1 or any(G.has_edge(u, u) for u in comp):
            on_cycle |= comp
    mixed = sorted(u for u in on_cycle if 0 < u < mask)
    if mixed:
        return "mixed", from_index(mixed[0], k)
    if mask in on_cycle:
        return "run", (1,) * k + (0,)
    return "run", (0,) * k + (1,)


def derevealize(f: PccFunction, eps) -> PccFunction:
    """``f + eps * 1_[A]`` for a cylinder ``A`` chosen so that the result is
    not revealed (its largest orbit average is below its largest value)."""
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    _, A = derevealize_choice(f)
    bump = indicator(A, f.exact).scaled(_exact(eps) if f.exact else float(eps))
    return refine(f, len(A)) + bump
