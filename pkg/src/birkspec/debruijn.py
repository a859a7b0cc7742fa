"""Weighted de Bruijn graphs and orbit optimization on them.

Nodes of the order-k graph are the length-k words, stored as table indices.
The edge ``u -> v`` exists when ``v`` is ``u`` shifted left by one symbol,
and carries weight ``f(u)``.  Averages of weights along walks are exactly
finite Birkhoff averages of ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
import networkx as nx
import numpy as np

from . import perron
from .shift_core import (
    NumericalError,
    PccFunction,
    PeriodicPoint,
    PreconditionError,
    periodic_birkhoff_average,
)

#: caps on the simple cycles (count, total length) enumerated when breaking
#: ties between maximizing cycles
TIE_BREAK_CYCLE_CAP = 4096
TIE_BREAK_LENGTH_CAP = 1 << 16


@dataclass(frozen=True)
class WeightedDeBruijn:
    function: PccFunction

    @property
    def order(self) -> int:
        return self.function.depth

    @property
    def n_nodes(self) -> int:
        return 1 << self.order

    @property
    def n_edges(self) -> int:
        return 2 * self.n_nodes

    @property
    def exact(self) -> bool:
        return self.function.exact

    def weights(self) -> np.ndarray:
        if self.exact:
            return np.array(self.function.values, dtype=object)
        return self.function.array

    def children(self, u):
        mask = self.n_nodes - 1
        base = (np.asarray(u) << 1) & mask
        return base, base | 1

    def parents(self, v):
        v = np.asarray(v)
        hi = 1 << (self.order - 1)
        return v >> 1, (v >> 1) | hi

    def edges(self):
        mask = self.n_nodes - 1
        for u in range(self.n_nodes):
            for b in (0, 1):
                yield u, ((u << 1) & mask) | b

    def weight(self, u: int, v: int):
        if v not in {((u << 1) & (self.n_nodes - 1)) | b for b in (0, 1)}:
            raise PreconditionError(f"no edge {u} -> {v}")
        return self.function.values[u]

    def to_networkx(self) -> nx.MultiDiGraph:
        G = nx.MultiDiGraph()
        G.add_nodes_from(range(self.n_nodes))
        for u, v in self.edges():
            G.add_edge(u, v, weight=self.function.values[u])
        return G


def build_graph(f: PccFunction) -> WeightedDeBruijn:
    return WeightedDeBruijn(f)


@dataclass(frozen=True)
class CycleReport:
    mean: object
    cycle: tuple
    witness: PeriodicPoint


@dataclass(frozen=True)
class Subgraph:
    order: int
    nodes: tuple
    edges: tuple

    def __len__(self):
        return len(self.nodes)


def cycle_word(cycle, order: int) -> tuple:
    """Period word of the periodic point whose orbit walks ``cycle``."""
    return tuple((u >> (order - 1)) & 1 for u in cycle)


def _cycle_mean(G: WeightedDeBruijn, cycle):
    vals = G.function.values
    total = sum((vals[u] for u in cycle), Fraction(0) if G.exact else 0.0)
    return total / len(cycle)


def _karp(G: WeightedDeBruijn):
    """Karp's maximum cycle mean with an implicit zero-weight super source.

    Returns the mean, the maximizing end node and the parent-choice bits
    needed to walk back the optimal length-n walk into that node.
    """
    n = G.n_nodes
    w = G.weights()
    p0, p1 = G.parents(np.arange(n))
    dtype = object if G.exact else float
    zero = Fraction(0) if G.exact else 0.0

    D = np.full(n, zero, dtype=dtype)
    choice = np.zeros((n, n), dtype=bool)
    for j in range(n):
        a = D[p0] + w[p0]
        b = D[p1] + w[p1]
        take1 = b > a
        choice[j] = take1
        D = np.where(take1, b, a)
    Dn = D

    # second pass: running min over j of (D_n - D_j) / (n - j)
    D = np.full(n, zero, dtype=dtype)
    best = None
    for j in range(n):
        ratio = (Dn - D) / (n - j)
        best = ratio if best is None else np.minimum(best, ratio)
        a = D[p0] + w[p0]
        b = D[p1] + w[p1]
        D = np.where(b > a, b, a)
    v_star = int(np.argmax(best))
    return best[v_star], v_star, choice


def _walk_back(G: WeightedDeBruijn, v_end: int, choice) -> list:
    n = G.n_nodes
    walk = [v_end]
    v = v_end
    hi = 1 << (G.order - 1)
    for j in range(n - 1, -1, -1):
        v = (v >> 1) | (hi if choice[j][v] else 0)
        walk.append(v)
    walk.reverse()
    return walk


def _cycles_in_walk(walk):
    """Decompose a walk's repeated segments into simple cycles."""
    stack, pos, out = [], {}, []
    for v in walk:
        if v in pos:
            start = pos[v]
            cyc = stack[start:]
            out.append(tuple(cyc))
            for u in cyc[1:]:
                del pos[u]
            del stack[start + 1 :]
        else:
            pos[v] = len(stack)
            stack.append(v)
    return out


def _tolerance(f: PccFunction):
    if f.exact:
        return 0
    return 1e-9 * max(1.0, float(f.norm))


def _rotate_to_word(cycle, order):
    """Rotate ``cycle`` so that its period word is the minimal rotation."""
    w = cycle_word(cycle, order)
    best = min(range(len(cycle)), key=lambda i: w[i:] + w[:i])
    return cycle[best:] + cycle[:best]


def _lexicographic_best(G: WeightedDeBruijn, tight: Subgraph):
    H = nx.DiGraph()
    H.add_nodes_from(tight.nodes)
    H.add_edges_from(tight.edges)
    best, budget = None, TIE_BREAK_LENGTH_CAP
    for count, cyc in enumerate(nx.simple_cycles(H)):
        budget -= len(cyc)
        if count >= TIE_BREAK_CYCLE_CAP or budget < 0:
            return None
        key = min_rotation_key(cycle_word(cyc, G.order))
        if best is None or key < best[0]:
            best = (key, tuple(cyc))
    return None if best is None else best[1]


def min_rotation_key(w: tuple) -> tuple:
    return min(w[i:] + w[:i] for i in range(len(w)))


def max_mean_cycle(G: WeightedDeBruijn, tie_break: bool = True) -> CycleReport:
    """Maximum mean cycle of ``G``; its mean is the largest orbit average.

    Among maximizing cycles the one with the lexicographically smallest
    canonical period word is reported, provided the tight subgraph has at
    most ``TIE_BREAK_CYCLE_CAP`` simple cycles; otherwise the cycle found
    on Karp's critical walk is used.
    """
    lam, v_star, choice = _karp(G)
    walk = _walk_back(G, v_star, choice)
    cycles = _cycles_in_walk(walk)
    if not cycles:
        raise NumericalError("critical walk contains no cycle")
    cyc = max(cycles, key=lambda c: _cycle_mean(G, c))
    mean = _cycle_mean(G, cyc)
    tol = _tolerance(G.function)
    if abs(mean - lam) > tol:
        raise NumericalError(f"critical cycle mean {mean} differs from Karp value {lam}")
    if tie_break:
        tight = _tight_from_mean(G, lam)
        best = _lexicographic_best(G, tight)
        if best is not None:
            cyc = best
    cyc = _rotate_to_word(tuple(cyc), G.order)
    if G.exact:
        mean = _cycle_mean(G, cyc)
    else:
        vals = G.function.values
        mean = math.fsum(vals[u] for u in cyc) / len(cyc)
        # the true mean is a convex combination of table values
        mean = min(max(mean, G.function.alpha_min), G.function.alpha_max)
    witness = PeriodicPoint(cycle_word(cyc, G.order))
    return CycleReport(mean, tuple(int(u) for u in cyc), witness)


def endpoints(f: PccFunction):
    """Support endpoints ``(alpha*_min, alpha*_max)`` of the spectrum."""
    lo, hi = endpoint_reports(f, tie_break=False)
    return lo.mean, hi.mean


def endpoint_reports(f: PccFunction, tie_break: bool = True):
    hi = max_mean_cycle(build_graph(f), tie_break)
    neg = max_mean_cycle(build_graph(f.negated()), tie_break)
    lo = CycleReport(0 - neg.mean, neg.cycle, neg.witness)  # no negative zero
    return lo, hi


def _relax_potential(G: WeightedDeBruijn, reduced, tol):
    n = G.n_nodes
    zero = Fraction(0) if G.exact else 0.0
    phi = np.full(n, zero, dtype=object if G.exact else float)
    p0, p1 = G.parents(np.arange(n))
    for _ in range(n + 1):
        a = phi[p0] + reduced[p0]
        b = phi[p1] + reduced[p1]
        cand = np.where(b > a, b, a)
        new = np.where(cand > phi, cand, phi)
        if G.exact:
            changed = any(x != y for x, y in zip(new, phi))
        else:
            changed = bool(np.any(new - phi > tol * 1e-3))
        phi = new
        if not changed:
            return phi
    raise NumericalError("potential relaxation did not stabilize within |V| rounds")


def potential(G: WeightedDeBruijn, lam):
    """A function ``phi`` on nodes with ``phi(v) >= phi(u) + w(u) - lam`` on
    every edge ``u -> v``; requires ``lam`` to be at least the maximum cycle
    mean."""
    return _relax_potential(G, G.weights() - lam, _tolerance(G.function))


def _tight_from_mean(G: WeightedDeBruijn, lam) -> Subgraph:
    tol = _tolerance(G.function)
    reduced = G.weights() - lam
    phi = _relax_potential(G, reduced, tol)
    n = G.n_nodes
    mask = n - 1
    tight_edges = []
    for u in range(n):
        for b in (0, 1):
            v = ((u << 1) & mask) | b
            slack = phi[u] + reduced[u] - phi[v]
            if slack > tol:
                raise NumericalError("potential violates the edge inequality")
            if abs(slack) <= tol:
                tight_edges.append((u, v))
    H = nx.DiGraph()
    H.add_edges_from(tight_edges)
    keep = set()
    for comp in nx.strongly_connected_components(H):
        if len(comp) > 1 or any(H.has_edge(u, u) for u in comp):
            keep |= comp
    edges = tuple(sorted((u, v) for u, v in tight_edges if u in keep and v in keep))
    return Subgraph(G.order, tuple(sorted(keep)), edges)


def tight_subgraph(G: WeightedDeBruijn, side: str = "max") -> Subgraph:
    """Subgraph carried by the orbits attaining the ``side`` endpoint.

    Every cycle of the result has mean equal to the endpoint value.
    """
    if side == "max":
        H = G
    elif side == "min":
        H = build_graph(G.function.negated())
    else:
        raise PreconditionError(f"side must be 'min' or 'max', got {side!r}")
    lam = max_mean_cycle(H, tie_break=False).mean
    return _tight_from_mean(H, lam)


def _scc_spectral_radius(nodes, edges) -> float:
    n = len(nodes)
    if len(edges) == n:
        return 1.0  # a single cycle
    pos = {u: i for i, u in enumerate(nodes)}
    src = np.array([pos[u] for u, _ in edges])
    dst = np.array([pos[v] for _, v in edges])

    # (A + I) is primitive for irreducible A; its Perron root is rho(A) + 1
    def apply(x):
        y = x.copy()
        np.add.at(y, src, x[dst])
        return y

    dense = None
    if n <= perron.DENSE_LIMIT:
        dense = np.eye(n)
        np.add.at(dense, (src, dst), 1.0)
    return perron.perron_root(n, apply, dense) - 1.0


def subgraph_entropy(sub: Subgraph) -> float:
    """Topological entropy ``log rho(A)`` of the subgraph's edge shift."""
    if not sub.nodes:
        raise PreconditionError("empty subgraph")
    H = nx.DiGraph()
    H.add_nodes_from(sub.nodes)
    H.add_edges_from(sub.edges)
    rho = 0.0
    for comp in nx.strongly_connected_components(H):
        comp = sorted(comp)
        sub_edges = [(u, v) for u, v in sub.edges if u in comp and v in comp]
        if not sub_edges:
            continue
        rho = max(rho, _scc_spectral_radius(comp, sub_edges))
    if rho <= 0.0:
        raise PreconditionError("subgraph has no cycle")
    return math.log(rho)


def witness_average(f: PccFunction, report: CycleReport):
    return periodic_birkhoff_average(f, report.witness)
