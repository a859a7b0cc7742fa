"""Brute-force reference computations.

Everything here works by direct enumeration of words or periodic orbits and
shares no code path with the graph and transfer-matrix routines, so the two
can be checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .shift_core import (
    PccFunction,
    PeriodicPoint,
    PreconditionError,
    SymbolFunction,
)

MAX_CYCLE_DEPTH = 4
MAX_COUNT_SYMBOLS = 24
_CHUNK = 1 << 20


def lyndon_words(max_len: int):
    """Binary Lyndon words of length 1..max_len in lexicographic order."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == 1:
            w.pop()


def enumerate_cycle_means(f: PccFunction, max_period: int):
    """All periodic orbits of period <= ``max_period`` with their averages.

    Orbits are listed once each, by their Lyndon (minimal rotation) word.
    """
    if f.depth > MAX_CYCLE_DEPTH:
        raise PreconditionError(f"depth {f.depth} exceeds cap {MAX_CYCLE_DEPTH}")
    if not 1 <= max_period <= 1 << f.depth:
        raise PreconditionError(f"max_period must lie in [1, {1 << f.depth}]")
    k = f.depth
    vals = f.values
    zero = Fraction(0) if f.exact else 0.0
    out = []
    for w in lyndon_words(max_period):
        p = len(w)
        ext = w * (-(-(p + k - 1) // p) + 1)
        total = zero
        for j in range(p):
            i = 0
            for b in ext[j : j + k]:
                i = 2 * i + b
            total += vals[i]
        out.append((PeriodicPoint(w), total / p))
    return out


def _window_sums(f: PccFunction, n_windows: int) -> np.ndarray:
    """Birkhoff sums over ``n_windows`` windows for every word of length
    ``n_windows + depth - 1``, indexed by the word's table index."""
    k = f.depth
    n = n_windows + k - 1
    if n > MAX_COUNT_SYMBOLS:
        raise PreconditionError(f"{n} symbols exceeds enumeration cap {MAX_COUNT_SYMBOLS}")
    table = f.array
    mask = (1 << k) - 1
    out = np.empty(1 << n)
    for start in range(0, 1 << n, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        acc = np.zeros(len(idx))
        for j in range(n_windows):
            acc += table[(idx >> (n - k - j)) & mask]
        out[start : start + len(idx)] = acc
    return out


@lru_cache(maxsize=4)
def _sorted_averages(f: PccFunction, N: int) -> np.ndarray:
    return np.sort(_window_sums(f, N) / N)


def count_words(f: PccFunction, alpha, delta, N: int) -> int:
    """Number of words of length N + depth - 1 whose N-average lies within
    ``delta`` of ``alpha`` (closed interval)."""
    if N < 1 or delta < 0:
        raise PreconditionError("need N >= 1 and delta >= 0")
    avg = _sorted_averages(f.as_float(), int(N))
    slack = 1e-12 * max(1.0, float(f.norm))
    lo = np.searchsorted(avg, alpha - delta - slack, side="left")
    hi = np.searchsorted(avg, alpha + delta + slack, side="right")
    return int(hi - lo)


def counting_lambda(f: PccFunction, alpha, delta, N: int) -> float:
    """Cylinder-counting estimate of the spectrum at ``alpha``.

    Returns ``-inf`` when no cylinder qualifies.
    """
    c = count_words(f, alpha, delta, N)
    if c == 0:
        return -math.inf
    return math.log(c) / (N * math.log(2.0))


@dataclass(frozen=True)
class CoverReport:
    bound: int
    exact_count: int
    passed: bool
    beta_star: float
    threshold: float


def lemma53_cover_bound(L: int, N: int, beta_star: float) -> int:
    n = N + L - 1
    return math.floor(n * math.comb(n, 2 * n // L) * 2.0 ** (beta_star * N + L - 1))


def lemma53_cover_check(a, b, L: int, beta, N: int, eps=0.0) -> CoverReport:
    """Compare the cylinder cover bound with an exact count.

    Counts the words of length N + L - 1 whose N-average of the run
    function with values ``a``/``b`` is at least ``beta* a + (1 - beta*) b``.
    """
    from .constructions import lemma53

    n = N + L - 1
    if L < 6:
        raise PreconditionError("L must be at least 6")
    if n % L:
        raise PreconditionError(f"L={L} does not divide N+L-1={n}")
    if n > MAX_COUNT_SYMBOLS:
        raise PreconditionError(f"{n} symbols exceeds enumeration cap {MAX_COUNT_SYMBOLS}")
    beta_star = float(beta) + float(eps) / 2
    threshold = beta_star * a + (1 - beta_star) * b
    f = lemma53(a, b, L)
    avg = _sorted_averages(f, int(N))
    slack = 1e-12 * max(1.0, abs(a), abs(b))
    count = int(len(avg) - np.searchsorted(avg, threshold - slack, side="left"))
    bound = lemma53_cover_bound(L, N, beta_star)
    return CoverReport(bound, count, count <= bound, beta_star, threshold)


def admissible_cover_pairs(L: int, cap: int = MAX_COUNT_SYMBOLS):
    return [N for N in range(1, cap - L + 2) if (N + L - 1) % L == 0]


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def uniform_N0(f: PccFunction, eps) -> int:
    """Smallest N0 such that every N > N0 satisfies the averaging estimate

    (-k |f| + N (a + eps)) / (N + k) > a + eps / 2,   a = alpha*_max.
    """
    from .debruijn import endpoints

    eps = _exact(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    fe = f.as_exact()
    _, a = endpoints(fe)
    x = 2 * fe.depth * (fe.norm + a + eps / 2) / eps
    return max(0, math.floor(x))


@dataclass(frozen=True)
class N0Report:
    N0: int
    passed: bool
    worst_excess: float
    n_words: int


def uniform_N0_check(f: PccFunction, eps, n_words=1000, span=32, seed=0) -> N0Report:
    """Random words: every N-average with N0 < N <= N0 + span stays below
    alpha*_max + eps."""
    from .debruijn import endpoints

    N0 = uniform_N0(f, eps)
    _, a = endpoints(f.as_float())
    k = f.depth
    rng = np.random.Generator(np.random.PCG64(seed))
    length = N0 + span + k - 1
    words = rng.integers(0, 2, size=(n_words, length), dtype=np.int64)
    idx = np.zeros((n_words, length - k + 1), dtype=np.int64)
    for j in range(k):
        idx = (idx << 1) | words[:, j : j + length - k + 1]
    csum = np.cumsum(f.array[idx], axis=1)
    Ns = np.arange(N0 + 1, N0 + span + 1)
    avgs = csum[:, Ns - 1] / Ns
    worst = float(np.max(avgs) - (float(a) + float(eps)))
    return N0Report(N0, worst <= 1e-12, worst, n_words)


def sample_trajectory(f: SymbolFunction, seed: int, N: int) -> np.ndarray:
    """Running averages ``A_n``, n = 1..N, along a fair-coin random point.

    Symbols come from numpy's PCG64 stream seeded with ``seed``.
    """
    if N < 1:
        raise PreconditionError("N must be positive")
    d = f.effective_depth
    rng = np.random.Generator(np.random.PCG64(seed))
    bits = rng.integers(0, 2, size=N + d - 1, dtype=np.int64)
    if isinstance(f, PccFunction):
        idx = np.zeros(N, dtype=np.int64)
        for j in range(d):
            idx = (idx << 1) | bits[j : j + N]
        vals = f.array[idx]
    else:
        w = tuple(int(b) for b in bits)
        vals = np.array([float(f.evaluate(w[j : j + d])) for j in range(N)])
    return np.cumsum(vals) / np.arange(1, N + 1)
