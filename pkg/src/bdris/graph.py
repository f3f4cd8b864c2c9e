"""Circuit topologies of the reconfigurable impedance network as graphs.

Vertices are RIS ports numbered ``1..n``; an edge ``(n, m)`` is a tunable
admittance connecting port ``n`` to port ``m``.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import networkx as nx
import numpy as np

from .errors import GraphError

Edge = tuple[int, int]


@dataclass(frozen=True)
class RisGraph:
    """Simple undirected graph on RIS ports.

    Edges are stored as ``(smaller, larger)`` pairs in the order they were
    given; that order defines the unknown layout of the tree solver.
    """

    n: int
    edges: tuple[Edge, ...] = field(default=())

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise GraphError(f"vertex count must be an integer, got {self.n!r}")
        if self.n < 1:
            raise GraphError(f"vertex count must be >= 1, got {self.n}")
        canonical: list[Edge] = []
        seen: set[Edge] = set()
        for raw in self.edges:
            try:
                a, b = (int(v) for v in raw)
            except (TypeError, ValueError) as e:
                raise GraphError(f"edge must be a pair of integers: {raw!r}") from e
            if a == b:
                raise GraphError(f"loop at vertex {a} is not allowed")
            for v in (a, b):
                if not 1 <= v <= self.n:
                    raise GraphError(f"vertex {v} outside 1..{self.n}")
            edge = (min(a, b), max(a, b))
            if edge in seen:
                raise GraphError(f"duplicate edge {edge}")
            seen.add(edge)
            canonical.append(edge)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(canonical))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def _nx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return nx.freeze(graph)

    def to_networkx(self) -> nx.Graph:
        """Return a mutable networkx copy with nodes ``1..n``."""
        return nx.Graph(self._nx)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> RisGraph:
        """Build from a networkx graph whose nodes are exactly ``1..n``."""
        nodes = sorted(graph.nodes)
        n = len(nodes)
        if nodes != list(range(1, n + 1)):
            raise GraphError("networkx graph nodes must be the integers 1..n")
        return cls(n, tuple(sorted((min(a, b), max(a, b)) for a, b in graph.edges)))

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RisGraph:
        try:
            return cls(data["n"], tuple(tuple(e) for e in data.get("edges", [])))
        except (KeyError, TypeError) as e:
            raise GraphError(f"invalid graph document: {e}") from e

    def remove_edge(self, edge: Edge) -> RisGraph:
        """Return a copy of the graph without ``edge``."""
        target = (min(edge), max(edge))
        if target not in self.edges:
            raise GraphError(f"edge {target} not in graph")
        return RisGraph(self.n, tuple(e for e in self.edges if e != target))

    def subgraph(self, vertices: Iterable[int]) -> RisGraph:
        """Induced subgraph on ``vertices``, relabeled to ``1..k`` in sorted order."""
        ordered = sorted(set(vertices))
        for v in ordered:
            self._check_vertex(v)
        relabel = {v: i for i, v in enumerate(ordered, start=1)}
        kept = tuple(
            (relabel[a], relabel[b])
            for a, b in self.edges
            if a in relabel and b in relabel
        )
        return RisGraph(len(ordered), kept)

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise GraphError(f"vertex {v} outside 1..{self.n}")


def is_connected(g: RisGraph) -> bool:
    return nx.is_connected(g._nx)


def is_acyclic(g: RisGraph) -> bool:
    return nx.is_forest(g._nx)


def is_tree(g: RisGraph) -> bool:
    return nx.is_tree(g._nx)


def is_forest(g: RisGraph) -> bool:
    """A forest is an acyclic graph; connectivity is not required."""
    return is_acyclic(g)


def connected_components(g: RisGraph) -> list[frozenset[int]]:
    """Maximal connected vertex sets, ordered by their smallest vertex."""
    components = (frozenset(c) for c in nx.connected_components(g._nx))
    return sorted(components, key=min)


def degree(g: RisGraph, v: int) -> int:
    g._check_vertex(v)
    return g._nx.degree[v]


def path_graph(n: int) -> RisGraph:
    """Chain ``1 - 2 - ... - n``; the graph of the tridiagonal RIS."""
    _check_order(n)
    return RisGraph(n, tuple((v, v + 1) for v in range(1, n)))


def star_graph(n: int, center: int = 1) -> RisGraph:
    """Every port connected to ``center``; the graph of the arrowhead RIS."""
    _check_order(n)
    if not 1 <= center <= n:
        raise GraphError(f"center {center} outside 1..{n}")
    return RisGraph(n, tuple((center, v) for v in range(1, n + 1) if v != center))


def complete_graph(n: int) -> RisGraph:
    _check_order(n)
    return RisGraph(n, tuple(itertools.combinations(range(1, n + 1), 2)))


def cycle_graph(n: int) -> RisGraph:
    if n < 3:
        raise GraphError(f"a cycle needs at least 3 vertices, got {n}")
    return RisGraph(n, (*((v, v + 1) for v in range(1, n)), (1, n)))


def random_spanning_tree(n: int, rng: np.random.Generator) -> RisGraph:
    """Uniformly sampled labeled tree on ``n`` vertices.

    A uniform Prüfer sequence of length ``n - 2`` maps one-to-one onto the
    labeled trees, so decoding it gives a uniform tree.
    """
    _check_order(n)
    if n == 1:
        return RisGraph(1)
    if n == 2:
        return RisGraph(2, ((1, 2),))
    sequence = rng.integers(0, n, size=n - 2).tolist()
    tree = nx.from_prufer_sequence(sequence)
    edges = sorted((min(a, b) + 1, max(a, b) + 1) for a, b in tree.edges)
    return RisGraph(n, tuple(edges))


def _check_order(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise GraphError(f"vertex count must be an integer >= 1, got {n!r}")
