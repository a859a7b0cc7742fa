"""Symbolic substrate for the full shift on {0, 1}.

Words are tuples of 0/1 ints.  A word ``w`` of length ``k`` has table index
``sum(w[i] * 2**(k-1-i))``, i.e. the first symbol is the most significant
bit.  Locally constant functions are stored as value tables in that order.

Table values are either all floats or all :class:`fractions.Fraction`; the
latter keeps exact arithmetic for claims that are equalities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Callable, Iterable, Sequence, Union

import numpy as np

Word = tuple


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class NumericalError(RuntimeError):
    """An iterative numerical procedure failed to meet its tolerance."""


def word(bits: Union[str, Iterable[int]]) -> Word:
    """Build a word from a ``"0110"`` string or an iterable of 0/1."""
    if isinstance(bits, str):
        out = tuple(int(c) for c in bits)
    else:
        out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise PreconditionError(f"not a binary word: {bits!r}")
    return out


def word_str(w: Sequence[int]) -> str:
    return "".join(str(b) for b in w)


def index(w: Sequence[int]) -> int:
    i = 0
    for b in w:
        i = (i << 1) | b
    return i


def from_index(i: int, k: int) -> Word:
    return tuple((i >> (k - 1 - j)) & 1 for j in range(k))


def conjugate(w: Sequence[int]) -> Word:
    return tuple(1 - b for b in w)


def all_words(k: int):
    for i in range(1 << k):
        yield from_index(i, k)


def minimal_rotation(w: Sequence[int]) -> Word:
    w = tuple(w)
    return min(w[i:] + w[:i] for i in range(len(w))) if w else w


def primitive_root(w: Sequence[int]) -> Word:
    w = tuple(w)
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


@dataclass(frozen=True)
class PeriodicPoint:
    """The sequence ``period_word`` repeated forever."""

    period_word: Word

    def __post_init__(self):
        w = word(self.period_word)
        if not w:
            raise PreconditionError("period word must be nonempty")
        object.__setattr__(self, "period_word", w)

    @property
    def period(self) -> int:
        return len(self.period_word)

    def canonical(self) -> "PeriodicPoint":
        """Minimal rotation of the primitive period."""
        return PeriodicPoint(minimal_rotation(primitive_root(self.period_word)))

    def prefix(self, n: int) -> Word:
        p = self.period_word
        reps = -(-n // len(p))
        return (p * reps)[:n]

    def __str__(self):
        return f"({word_str(self.period_word)})^inf"


def _as_exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(str(v))


@dataclass(frozen=True)
class PccFunction:
    """A function constant on the cylinders of length ``depth``."""

    depth: int
    values: tuple
    exact: bool = field(default=False)

    def __post_init__(self):
        if self.depth < 1:
            raise PreconditionError("depth must be positive")
        vals = tuple(self.values)
        if len(vals) != 1 << self.depth:
            raise PreconditionError(
                f"table length {len(vals)} != 2**{self.depth}"
            )
        if self.exact:
            vals = tuple(_as_exact(v) for v in vals)
        else:
            vals = tuple(float(v) for v in vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_rule(cls, depth: int, rule: Callable[[Word], Real], exact=False):
        return cls(depth, tuple(rule(w) for w in all_words(depth)), exact)

    @property
    def effective_depth(self) -> int:
        return self.depth

    @property
    def array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    @property
    def alpha_min(self):
        return min(self.values)

    @property
    def alpha_max(self):
        return max(self.values)

    @property
    def norm(self):
        return max(abs(v) for v in self.values)

    def evaluate(self, w: Sequence[int]):
        if len(w) < self.depth:
            raise PreconditionError(
                f"word of length {len(w)} shorter than depth {self.depth}"
            )
        return self.values[index(w[: self.depth])]

    def as_exact(self) -> "PccFunction":
        return self if self.exact else PccFunction(self.depth, self.values, True)

    def as_float(self) -> "PccFunction":
        return PccFunction(self.depth, self.values, False) if self.exact else self

    def negated(self) -> "PccFunction":
        return PccFunction(self.depth, tuple(-v for v in self.values), self.exact)

    def shifted(self, c) -> "PccFunction":
        return PccFunction(self.depth, tuple(v + c for v in self.values), self.exact)

    def scaled(self, c) -> "PccFunction":
        return PccFunction(self.depth, tuple(v * c for v in self.values), self.exact)

    def __add__(self, other: "PccFunction") -> "PccFunction":
        m = max(self.depth, other.depth)
        a, b = refine(self, m), refine(other, m)
        exact = self.exact and other.exact
        return PccFunction(m, tuple(x + y for x, y in zip(a.values, b.values)), exact)

    def __sub__(self, other: "PccFunction") -> "PccFunction":
        return self + other.negated()

    def to_json(self) -> dict:
        return {"depth": self.depth, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "PccFunction":
        try:
            depth = int(obj["depth"])
            values = [float(v) for v in obj["values"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"malformed PCC function JSON: {exc}") from None
        return cls(depth, tuple(values))

    @classmethod
    def load(cls, path) -> "PccFunction":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise PreconditionError(f"malformed JSON in {path}: {exc}") from None
        return cls.from_json(obj)


@dataclass(frozen=True)
class ProceduralFunction:
    """A locally constant function given by a rule on its first
    ``effective_depth`` symbols, for depths too large to tabulate."""

    effective_depth: int
    rule: Callable[[Word], Real]
    name: str = "procedural"

    def evaluate(self, w: Sequence[int]):
        if len(w) < self.effective_depth:
            raise PreconditionError(
                f"word of length {len(w)} shorter than depth {self.effective_depth}"
            )
        return self.rule(tuple(w[: self.effective_depth]))


SymbolFunction = Union[PccFunction, ProceduralFunction]


def evaluate(f: SymbolFunction, w: Sequence[int]):
    return f.evaluate(tuple(w))


def integrate(f: SymbolFunction):
    """Integral against the (1/2, 1/2)-Bernoulli measure."""
    if isinstance(f, PccFunction):
        total = sum(f.values, Fraction(0) if f.exact else 0.0)
        return total / (1 << f.depth)
    d = f.effective_depth
    if d > 24:
        raise PreconditionError(f"effective depth {d} too large to integrate")
    return sum(f.evaluate(w) for w in all_words(d)) / (1 << d)


def refine(f: PccFunction, m: int) -> PccFunction:
    """The same function tabulated at depth ``m >= f.depth``."""
    if m < f.depth:
        raise PreconditionError(f"cannot refine depth {f.depth} to {m}")
    if m == f.depth:
        return f
    shift = m - f.depth
    vals = tuple(f.values[i >> shift] for i in range(1 << m))
    return PccFunction(m, vals, f.exact)


def finite_birkhoff_average(f: SymbolFunction, prefix: Sequence[int], n: int):
    """(1/N) * sum_{j=0}^{N-1} f(sigma^j prefix)."""
    if n < 1:
        raise PreconditionError("N must be positive")
    d = f.effective_depth
    prefix = tuple(prefix)
    if len(prefix) < n + d - 1:
        raise PreconditionError(
            f"prefix of length {len(prefix)} too short for N={n}, depth={d}"
        )
    if isinstance(f, PccFunction):
        idx = window_indices(prefix, d, n)
        if f.exact:
            return sum((f.values[i] for i in idx), Fraction(0)) / n
        return float(np.sum(f.array[idx])) / n
    return sum(f.evaluate(prefix[j : j + d]) for j in range(n)) / n


def window_indices(w: Sequence[int], k: int, count: int) -> np.ndarray:
    """Table indices of the ``count`` length-k windows starting at 0, 1, ..."""
    bits = np.asarray(w, dtype=np.int64)
    idx = np.zeros(count, dtype=np.int64)
    for j in range(k):
        idx = (idx << 1) | bits[j : j + count]
    return idx


def periodic_birkhoff_average(f: SymbolFunction, p: PeriodicPoint):
    """Exact orbit average of ``f`` along ``p``."""
    n = p.period
    unrolled = p.prefix(n + f.effective_depth - 1)
    return finite_birkhoff_average(f, unrolled, n)


def indicator(w: Union[str, Sequence[int]], exact=False) -> PccFunction:
    """1 on the cylinder [w], 0 elsewhere."""
    w = word(w)
    vals = [0] * (1 << len(w))
    vals[index(w)] = 1
    return PccFunction(len(w), tuple(vals), exact)


def constant(c, depth: int = 1, exact=False) -> PccFunction:
    return PccFunction(depth, (c,) * (1 << depth), exact)


def conjugation_image(f: PccFunction) -> PccFunction:
    """The function omega -> f(conjugate(omega))."""
    mask = (1 << f.depth) - 1
    return PccFunction(
        f.depth, tuple(f.values[i ^ mask] for i in range(1 << f.depth)), f.exact
    )


def sup_distance(f: PccFunction, g: PccFunction):
    m = max(f.depth, g.depth)
    a, b = refine(f, m), refine(g, m)
    return max(abs(x - y) for x, y in zip(a.values, b.values))


def random_pcc(rng: np.random.Generator, depth: int, low=-1.0, high=1.0):
    return PccFunction(depth, tuple(rng.uniform(low, high, 1 << depth)))
