"""Combinatorics of the diagonal torus action on supports S of n x n matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

__all__ = [
    "SupportGraph",
    "GraphStats",
    "graph_stats",
    "CycleMonomial",
    "cycle_monomials",
    "Generator",
    "invariant_generators",
    "evaluate_generator",
    "act",
]


@dataclass(frozen=True)
class SupportGraph:
    """Bipartite graph on rows 1..n and columns 1..n with one edge per (i, j) in S."""

    n: int
    S: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        S = frozenset((int(i), int(j)) for i, j in self.S)
        if any(not (1 <= i <= self.n and 1 <= j <= self.n) for i, j in S):
            raise ValueError("support entries must lie in {1..n}^2")
        object.__setattr__(self, "S", S)

    @classmethod
    def full(cls, n: int) -> "SupportGraph":
        return cls(n, frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1)))

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(("r", i) for i in range(1, self.n + 1))
        G.add_nodes_from(("c", j) for j in range(1, self.n + 1))
        G.add_edges_from((("r", i), ("c", j)) for i, j in self.S)
        return G


@dataclass(frozen=True)
class GraphStats:
    chi: int
    stab_dim: int
    cyclomatic: int


def graph_stats(g: SupportGraph) -> GraphStats:
    """Components chi (isolated vertices included), stabilizer dimension and cycle rank."""
    chi = nx.number_connected_components(g.to_networkx())
    return GraphStats(chi, chi - 1, len(g.S) - 2 * g.n + chi)


@dataclass(frozen=True)
class CycleMonomial:
    """prod X_{ij}^{e_ij} over the support; exponents balance on every row and column."""

    exponents: dict

    def vector(self, order) -> np.ndarray:
        return np.array([self.exponents.get(ij, 0) for ij in order], dtype=int)

    def __str__(self) -> str:
        num = [f"X{i}{j}" for (i, j), e in sorted(self.exponents.items()) if e > 0]
        den = [f"X{i}{j}" for (i, j), e in sorted(self.exponents.items()) if e < 0]
        return f"{'*'.join(num)}/({'*'.join(den)})"


def _tree_path(parent: dict, a, b) -> list:
    # path a -> b in a rooted forest given parent pointers
    anc_a = [a]
    while parent[anc_a[-1]] is not None:
        anc_a.append(parent[anc_a[-1]])
    pos = {v: k for k, v in enumerate(anc_a)}
    path_b = [b]
    while path_b[-1] not in pos:
        path_b.append(parent[path_b[-1]])
    meet = path_b[-1]
    return anc_a[:pos[meet] + 1] + path_b[-2::-1]


def _normalize_cycle(cyc: list) -> list:
    # Start at the smallest row index, then step first to its smaller column neighbour.
    rows = [k for k, v in enumerate(cyc) if v[0] == "r"]
    start = min(rows, key=lambda k: cyc[k][1])
    cyc = cyc[start:] + cyc[:start]
    if cyc[-1][1] < cyc[1][1]:
        cyc = [cyc[0]] + cyc[:0:-1]
    return cyc


def cycle_monomials(g: SupportGraph) -> list:
    """One monomial per fundamental cycle of a breadth-first spanning forest.

    Along the oriented cycle r_{i1} -> c_{j1} -> r_{i2} -> ... an edge traversed
    from a row to a column gets exponent +1 and the reverse gets -1.
    """
    G = g.to_networkx()
    parent: dict = {}
    tree_edges = set()
    for comp in sorted(nx.connected_components(G), key=lambda c: min(c)):
        root = min(comp)
        parent[root] = None
        for u, v in nx.bfs_edges(G, root, sort_neighbors=sorted):
            parent[v] = u
            tree_edges.add(frozenset((u, v)))
    out = []
    for i, j in sorted(g.S):
        if frozenset((("r", i), ("c", j))) in tree_edges:
            continue
        cyc = _normalize_cycle(_tree_path(parent, ("c", j), ("r", i)))
        exps: dict = {}
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if a[0] == "r":
                ij, e = (a[1], b[1]), 1
            else:
                ij, e = (b[1], a[1]), -1
            exps[ij] = exps.get(ij, 0) + e
        out.append(CycleMonomial({k: v for k, v in exps.items() if v}))
    return out


@dataclass(frozen=True)
class Generator:
    """Symbolic generator of the invariant algebra.

    ``kind`` is "coordinate" for u^{(k)}_{ij} / e_{ij} or "cycle" for the
    invertible e*M_c attached to a cycle monomial.
    """

    name: str
    kind: str
    pair: Optional[tuple] = None
    k: Optional[int] = None
    exponents: dict = field(default_factory=dict)
    invertible: bool = False


def invariant_generators(g: SupportGraph, dim: int = 2, chart: Optional[dict] = None) -> list:
    """Coordinates x^{(k)}_{ij} = u^{(k)}_{ij} / e_{ij} for (i, j) in S, k < dim, then
    one invertible generator per cycle monomial.

    ``chart`` maps (i, j) to the linear form e_{ij} (default: first coordinate);
    it only matters when generators are evaluated.
    """
    gens = []
    for ij in sorted(g.S):
        for k in range(1, dim + 1):
            gens.append(Generator(f"x^({k})_{ij[0]}{ij[1]}", "coordinate", ij, k))
    for c, mono in enumerate(cycle_monomials(g)):
        gens.append(Generator(f"e*M_{c + 1} = e*[{mono}]", "cycle",
                              exponents=dict(mono.exponents), invertible=True))
    return gens


def _default_chart(pairs, dim: int) -> dict:
    e = np.zeros(dim)
    e[0] = 1
    return {ij: e for ij in pairs}


def evaluate_generator(gen: Generator, point: dict, chart: Optional[dict] = None) -> complex:
    """Value of ``gen`` at a point given as {(i, j): coordinate vector of m_ij}."""
    dim = len(next(iter(point.values())))
    chart = chart or _default_chart(point.keys(), dim)
    if gen.kind == "coordinate":
        u = np.asarray(point[gen.pair])
        return complex(u[gen.k - 1] / (chart[gen.pair] @ u))
    out = 1.0 + 0j
    for ij, e in gen.exponents.items():
        out *= complex(chart[ij] @ np.asarray(point[ij])) ** e
    return out


def act(point: dict, gamma, delta) -> dict:
    """Diagonal action m_ij -> gamma_i m_ij / delta_j."""
    return {(i, j): gamma[i - 1] * np.asarray(u) / delta[j - 1] for (i, j), u in point.items()}
