"""Undirected simple graphs: edge-list ingestion, mutation, BFS distances.

Graphs are immutable. Mutators return a new :class:`Graph`.
"""

from __future__ import annotations

from collections import deque
from importlib import resources
from typing import Iterable, Iterator, Mapping

UNREACHABLE = None


class GraphError(ValueError):
    pass


class MalformedLine(GraphError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno
        self.line = line


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class MissingEdge(GraphError):
    pass


class MissingNode(GraphError):
    pass


class Graph:
    """Undirected, unweighted graph with integer node ids.

    Node ids are kept as given; iteration is always in ascending id order.
    """

    __slots__ = ("_adj", "_edge_count")

    def __init__(self, adjacency: Mapping[int, Iterable[int]] | None = None):
        adj = {int(v): frozenset(int(w) for w in nbrs) for v, nbrs in (adjacency or {}).items()}
        self._adj = {v: adj[v] for v in sorted(adj)}
        self._edge_count = sum(len(n) for n in self._adj.values()) // 2
        self._check()

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], nodes: Iterable[int] = ()) -> Graph:
        adj: dict[int, set[int]] = {v: set() for v in nodes}
        for u, v in edges:
            if u == v:
                raise SelfLoop(f"self-loop on node {u}")
            nu = adj.setdefault(u, set())
            if v in nu:
                raise DuplicateEdge(f"duplicate edge {min(u, v)} {max(u, v)}")
            nu.add(v)
            adj.setdefault(v, set()).add(u)
        return cls(adj)

    def _check(self) -> None:
        total = 0
        for v, nbrs in self._adj.items():
            if v < 0:
                raise GraphError(f"negative node id {v}")
            if v in nbrs:
                raise SelfLoop(f"self-loop on node {v}")
            for w in nbrs:
                if w not in self._adj or v not in self._adj[w]:
                    raise GraphError(f"asymmetric adjacency between {v} and {w}")
            total += len(nbrs)
        assert total == 2 * self._edge_count

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(self._adj)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise MissingNode(f"no such node {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as ``(min, max)``, sorted."""
        for v, nbrs in self._adj.items():
            for w in sorted(nbrs):
                if v < w:
                    yield v, w

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __iter__(self) -> Iterator[int]:
        return iter(self._adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        return hash(tuple(self._adj.items()))

    def __repr__(self) -> str:
        return f"Graph(nodes={len(self)}, edges={self.edge_count})"

    def _mutable(self) -> dict[int, set[int]]:
        return {v: set(n) for v, n in self._adj.items()}


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list format.

    ``#`` starts a comment; blank lines are skipped. A line ``u v`` is an
    edge, a line ``u`` declares a (possibly isolated) node. Duplicate edges
    and self-loops are rejected rather than silently normalized.
    """
    adj: dict[int, set[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) > 2:
            raise MalformedLine(lineno, raw, "expected one or two node ids")
        try:
            ids = [int(t) for t in tokens]
        except ValueError:
            raise MalformedLine(lineno, raw, "node ids must be integers") from None
        if any(i < 0 for i in ids):
            raise MalformedLine(lineno, raw, "node ids must be non-negative")
        if len(ids) == 1:
            adj.setdefault(ids[0], set())
            continue
        u, v = ids
        if u == v:
            raise SelfLoop(f"line {lineno}: self-loop on node {u}")
        if v in adj.get(u, ()):
            raise DuplicateEdge(f"line {lineno}: duplicate edge {min(u, v)} {max(u, v)}")
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return Graph(adj)


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def karate_club() -> Graph:
    """Zachary's karate club network, nodes 1..34, 78 edges."""
    text = resources.files("netseal").joinpath("data/karate.edges").read_text(encoding="utf-8")
    return parse_edge_list(text)


def add_edge(g: Graph, u: int, v: int) -> Graph:
    if u == v:
        raise SelfLoop(f"self-loop on node {u}")
    if g.has_edge(u, v):
        raise DuplicateEdge(f"edge {min(u, v)} {max(u, v)} already present")
    adj = g._mutable()
    adj.setdefault(u, set()).add(v)
    adj.setdefault(v, set()).add(u)
    return Graph(adj)


def remove_edge(g: Graph, u: int, v: int) -> Graph:
    if not g.has_edge(u, v):
        raise MissingEdge(f"no edge {min(u, v)} {max(u, v)}")
    adj = g._mutable()
    adj[u].discard(v)
    adj[v].discard(u)
    return Graph(adj)


def remove_node(g: Graph, v: int) -> Graph:
    if v not in g:
        raise MissingNode(f"no such node {v}")
    adj = g._mutable()
    for w in adj.pop(v):
        adj[w].discard(v)
    return Graph(adj)


def bfs_distances(g: Graph, source: int) -> dict[int, int | None]:
    """Hop counts from ``source``; nodes in other components map to UNREACHABLE."""
    if source not in g:
        raise MissingNode(f"no such node {source}")
    dist: dict[int, int | None] = dict.fromkeys(g.nodes, UNREACHABLE)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in sorted(g.neighbors(v)):
            if dist[w] is UNREACHABLE:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def canonical_edge_list(g: Graph, include_isolated: bool = False) -> str:
    """One ``"min max"`` line per edge, sorted; no trailing newline.

    With ``include_isolated`` the degree-0 nodes are appended as single-token
    lines so that parsing the output reproduces ``g`` exactly.
    """
    lines = [f"{u} {v}" for u, v in g.edges()]
    if include_isolated:
        lines.extend(str(v) for v in g.nodes if not g.neighbors(v))
    return "\n".join(lines)
