"""BD-RIS architecture taxonomy and circuit complexity.

Each architecture is a graph on the RIS ports plus the metadata needed to
rebuild it: its kind and, for forest/group architectures, the partition of
ports into groups of consecutive indices.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ArchitectureError, GraphError
from .graph import (
    RisGraph,
    complete_graph,
    degree,
    is_connected,
    is_tree,
    path_graph,
    star_graph,
)

CenterRule = Callable[[Sequence[int]], int]


class Kind(str, enum.Enum):
    SINGLE = "single"
    TRIDIAGONAL = "tridiagonal"
    ARROWHEAD = "arrowhead"
    TREE = "tree"
    FOREST = "forest"
    GROUP = "group"
    FULLY = "fully"


TREE_KINDS = frozenset({Kind.TRIDIAGONAL, Kind.ARROWHEAD, Kind.TREE})
FOREST_INNER_KINDS = frozenset({Kind.TRIDIAGONAL, Kind.ARROWHEAD})


def first_port(ports: Sequence[int]) -> int:
    return ports[0]


@dataclass(frozen=True)
class Architecture:
    """A BD-RIS circuit topology.

    ``group_partition`` is empty unless the kind is ``FOREST`` or ``GROUP``;
    ``inner`` is the per-group tree shape of a forest.
    """

    graph: RisGraph
    kind: Kind
    group_size: Optional[int] = None
    inner: Optional[Kind] = None
    group_partition: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def label(self) -> str:
        if self.kind is Kind.FOREST:
            return f"forest-{self.inner.value}"
        return self.kind.value

    @property
    def groups(self) -> tuple[tuple[int, ...], ...]:
        """Port groups; connected architectures form a single group."""
        if self.group_partition:
            return self.group_partition
        if self.kind is Kind.SINGLE:
            return tuple((v,) for v in self.graph.vertices)
        return (tuple(self.graph.vertices),)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "kind": self.kind.value,
            "n": self.n,
            "group_size": self.group_size,
            "edges": [list(e) for e in self.graph.edges],
        }
        if self.inner is not None:
            data["inner"] = self.inner.value
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Architecture:
        """Rebuild and re-validate an architecture from its JSON form."""
        try:
            kind = Kind(data["kind"])
            n = data["n"]
            graph = RisGraph(n, tuple(tuple(e) for e in data.get("edges", [])))
        except (KeyError, TypeError, ValueError) as e:
            raise ArchitectureError(f"invalid architecture document: {e}") from e
        try:
            inner = Kind(data["inner"]) if data.get("inner") else None
        except ValueError as e:
            raise ArchitectureError(f"invalid architecture document: {e}") from e
        group_size = data.get("group_size")
        partition = _partition(n, group_size) if group_size else ()
        arch = cls(graph, kind, group_size, inner, partition)
        _check(arch)
        return arch


def build_architecture(
    kind: Kind | str,
    n: int,
    group_size: Optional[int] = None,
    center_rule: Optional[CenterRule] = None,
    *,
    inner: Kind | str = Kind.TRIDIAGONAL,
    tree: Optional[RisGraph] = None,
) -> Architecture:
    """Construct an architecture of the given kind on ``n`` ports.

    Args:
        kind: Taxonomy tag.
        n: Number of RIS ports.
        group_size: Ports per group; required for forest and group kinds.
        center_rule: Picks the arrowhead center from the ordered ports of a
            (sub)graph. Defaults to the first port.
        inner: Tree shape used inside each forest group.
        tree: Graph for the generic ``TREE`` kind; must be a tree on ``n``
            vertices.

    Returns:
        A validated architecture.

    Raises:
        ArchitectureError: If the arguments are inconsistent with ``kind``.
    """
    try:
        kind = Kind(kind)
        inner = Kind(inner)
    except ValueError as e:
        raise ArchitectureError(str(e)) from e
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ArchitectureError(f"number of ports must be an integer >= 1, got {n!r}")
    center_rule = center_rule or first_port

    if kind is Kind.SINGLE:
        return Architecture(RisGraph(n), kind)
    if kind is Kind.TRIDIAGONAL:
        return Architecture(path_graph(n), kind)
    if kind is Kind.ARROWHEAD:
        center = center_rule(tuple(range(1, n + 1)))
        try:
            return Architecture(star_graph(n, center), kind)
        except GraphError as e:
            raise ArchitectureError(str(e)) from e
    if kind is Kind.FULLY:
        return Architecture(complete_graph(n), kind)
    if kind is Kind.TREE:
        if tree is None:
            raise ArchitectureError("tree kind requires an explicit tree graph")
        if tree.n != n or not is_tree(tree):
            raise ArchitectureError(f"graph is not a tree on {n} vertices")
        return Architecture(tree, kind)

    if group_size is None:
        raise ArchitectureError(f"{kind.value} architecture requires a group size")
    partition = _partition(n, group_size)
    edges: list[tuple[int, int]] = []
    if kind is Kind.GROUP:
        for ports in partition:
            local = complete_graph(len(ports))
            edges.extend((ports[a - 1], ports[b - 1]) for a, b in local.edges)
        graph = RisGraph(n, tuple(edges))
        return Architecture(graph, kind, group_size, None, partition)

    if inner not in FOREST_INNER_KINDS:
        raise ArchitectureError(
            f"forest groups must be tridiagonal or arrowhead, got {inner.value}"
        )
    for ports in partition:
        if inner is Kind.TRIDIAGONAL:
            edges.extend(zip(ports, ports[1:]))
        else:
            edges.extend(_star(ports, center_rule, n).edges)
    graph = RisGraph(n, tuple(edges))
    return Architecture(graph, Kind.FOREST, group_size, inner, partition)


def admittance_count(arch: Architecture) -> int:
    """Number of tunable admittances: one grounded per port plus one per edge."""
    return arch.n + len(arch.graph.edges)


def closed_form_admittance_count(
    kind: Kind | str, n: int, group_size: int = 1
) -> int:
    """Closed-form circuit complexity of each kind.

    Forest and group counts are exact integers whenever ``group_size``
    divides ``n``.
    """
    kind = Kind(kind)
    if kind is Kind.SINGLE:
        return n
    if kind in TREE_KINDS:
        return 2 * n - 1
    if n % group_size:
        raise ArchitectureError(f"group size {group_size} does not divide {n}")
    if kind is Kind.FOREST:
        return 2 * n - n // group_size
    if kind is Kind.GROUP:
        return n * (group_size + 1) // 2
    return n * (n + 1) // 2


def susceptance_support(arch: Architecture) -> frozenset[tuple[int, int]]:
    """1-based ``(i, j)`` positions where ``B`` may be nonzero."""
    support = {(v, v) for v in arch.graph.vertices}
    for a, b in arch.graph.edges:
        support.add((a, b))
        support.add((b, a))
    return frozenset(support)


def is_miso_optimal(arch: Architecture) -> bool:
    """Whether the architecture reaches the power upper bound for every channel.

    This holds exactly when its graph is connected.
    """
    return is_connected(arch.graph)


def min_miso_optimal_edges(n: int) -> int:
    """Fewest interconnecting admittances of a MISO-optimal architecture."""
    return n - 1


def _partition(n: int, group_size: Any) -> tuple[tuple[int, ...], ...]:
    if isinstance(group_size, bool) or not isinstance(group_size, int):
        raise ArchitectureError(f"group size must be an integer, got {group_size!r}")
    if group_size < 1 or n % group_size:
        raise ArchitectureError(f"group size {group_size} does not divide {n}")
    return tuple(
        tuple(range(start, start + group_size))
        for start in range(1, n + 1, group_size)
    )


def _star(ports: tuple[int, ...], center_rule: CenterRule, n: int) -> RisGraph:
    center = center_rule(ports)
    if center not in ports:
        raise ArchitectureError(f"center {center} is not one of the ports {ports}")
    try:
        return RisGraph(n, tuple((center, p) for p in ports if p != center))
    except GraphError as e:
        raise ArchitectureError(str(e)) from e


def _check(arch: Architecture) -> None:
    """Verify that a deserialized architecture satisfies its kind's invariants."""
    rebuilt_kinds = {
        Kind.SINGLE: lambda: RisGraph(arch.n),
        Kind.TRIDIAGONAL: lambda: path_graph(arch.n),
        Kind.FULLY: lambda: complete_graph(arch.n),
    }
    if arch.kind in rebuilt_kinds:
        if set(arch.graph.edges) != set(rebuilt_kinds[arch.kind]().edges):
            raise ArchitectureError(f"edges do not form a {arch.kind.value} graph")
    elif arch.kind is Kind.ARROWHEAD:
        if not _is_star(arch.graph):
            raise ArchitectureError("edges do not form a star graph")
    elif arch.kind is Kind.TREE:
        if not is_tree(arch.graph):
            raise ArchitectureError("edges do not form a tree")
    else:
        if not arch.group_partition:
            raise ArchitectureError(f"{arch.kind.value} needs a group size")
        if arch.kind is Kind.FOREST and arch.inner not in FOREST_INNER_KINDS:
            raise ArchitectureError("forest groups must be tridiagonal or arrowhead")
        for ports in arch.group_partition:
            sub = arch.graph.subgraph(ports)
            if arch.kind is Kind.FOREST and not _matches_inner(sub, arch.inner):
                raise ArchitectureError(
                    f"group {ports} is not a {arch.inner.value} tree"
                )
            if arch.kind is Kind.GROUP and set(sub.edges) != set(
                complete_graph(len(ports)).edges
            ):
                raise ArchitectureError(f"group {ports} is not complete")
        within = sum(len(arch.graph.subgraph(p).edges) for p in arch.group_partition)
        if within != len(arch.graph.edges):
            raise ArchitectureError("edges cross group boundaries")


def _is_star(graph: RisGraph) -> bool:
    hub = max((degree(graph, v) for v in graph.vertices), default=0)
    return is_tree(graph) and hub == graph.n - 1


def _matches_inner(sub: RisGraph, inner: Kind) -> bool:
    if inner is Kind.TRIDIAGONAL:
        return set(sub.edges) == set(path_graph(sub.n).edges)
    return _is_star(sub)
