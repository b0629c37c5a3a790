"""Undirected simple graphs over integer vertex ids.

Vertex ids are never renumbered: removing vertices keeps the ids of the
survivors, so reduction traces can always talk about the input graph.
All iteration is in ascending id order.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Mapping

from .errors import UnknownVertexError

Edge = tuple[int, int]


class Graph:
    """An immutable undirected simple graph.

    Build one with :meth:`from_edges` or pass an adjacency mapping. The
    constructor normalizes the adjacency (symmetric closure) and rejects
    self-loops.
    """

    __slots__ = ("_adj", "_order")

    def __init__(self, adjacency: Mapping[int, Iterable[int]] | None = None):
        adj: dict[int, set[int]] = {}
        for v, nbrs in (adjacency or {}).items():
            _check_id(v)
            adj.setdefault(v, set())
            for u in nbrs:
                _check_id(u)
                if u == v:
                    raise ValueError(f"self-loop at vertex {v}")
                adj[v].add(u)
                adj.setdefault(u, set()).add(v)
        self._adj: dict[int, frozenset[int]] = {v: frozenset(n) for v, n in adj.items()}
        self._order: tuple[int, ...] = tuple(sorted(self._adj))

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], vertices: Iterable[int] = ()) -> "Graph":
        adj: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return cls(adj)

    # -- basic queries -------------------------------------------------

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._order

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(self._order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        return hash(frozenset(self.edges())) ^ hash(self._order)

    def __repr__(self) -> str:
        return f"Graph(n={len(self)}, m={self.num_edges()})"

    def adj(self, v: int) -> frozenset[int]:
        """Neighbor set of ``v`` (unordered, cheap)."""
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def neighbors(self, v: int) -> list[int]:
        """Neighbors of ``v`` in ascending order."""
        return sorted(self.adj(v))

    def degree(self, v: int) -> int:
        return len(self.adj(v))

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def edges(self) -> list[Edge]:
        return [(u, v) for u in self._order for v in sorted(self._adj[u]) if u < v]

    def num_edges(self) -> int:
        return sum(len(n) for n in self._adj.values()) // 2

    # -- derived graphs ------------------------------------------------

    def induced(self, vertices: Iterable[int]) -> "Graph":
        keep = self._checked(vertices)
        sub = Graph.__new__(Graph)
        sub._adj = {v: self._adj[v] & keep for v in keep}
        sub._order = tuple(sorted(keep))
        return sub

    def without(self, vertices: Iterable[int]) -> "Graph":
        drop = self._checked(vertices)
        return self.induced(v for v in self._order if v not in drop)

    def components(self) -> list[tuple[int, ...]]:
        """Connected components, each sorted, listed by smallest member."""
        seen: set[int] = set()
        out = []
        for s in self._order:
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u in self._adj[v]:
                    if u not in seen:
                        seen.add(u)
                        comp.append(u)
                        queue.append(u)
            out.append(tuple(sorted(comp)))
        return out

    def neighborhood(self, vertices: Iterable[int]) -> frozenset[int]:
        """Open neighborhood N(S): vertices outside S adjacent to S."""
        s = self._checked(vertices)
        out: set[int] = set()
        for v in s:
            out |= self._adj[v]
        return frozenset(out - s)

    def max_degree(self) -> int:
        return max((len(n) for n in self._adj.values()), default=0)

    def validate(self) -> None:
        """Raise AssertionError unless the simple-graph invariants hold."""
        for v, nbrs in self._adj.items():
            assert v not in nbrs, f"self-loop at {v}"
            for u in nbrs:
                assert u in self._adj, f"dangling neighbor {u} of {v}"
                assert v in self._adj[u], f"asymmetric edge {v}-{u}"
        assert self._order == tuple(sorted(self._adj))

    def _checked(self, vertices: Iterable[int]) -> frozenset[int]:
        s = frozenset(vertices)
        missing = s - self._adj.keys()
        if missing:
            raise UnknownVertexError(min(missing))
        return s


def _check_id(v: object) -> None:
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise ValueError(f"vertex ids must be non-negative integers, got {v!r}")


def induced_subgraph(g: Graph, u: Iterable[int]) -> Graph:
    return g.induced(u)


def remove_vertices(g: Graph, s: Iterable[int]) -> Graph:
    return g.without(s)


def components(g: Graph) -> list[tuple[int, ...]]:
    return g.components()


def neighborhood(g: Graph, s: Iterable[int]) -> frozenset[int]:
    return g.neighborhood(s)


def max_degree(g: Graph) -> int:
    return g.max_degree()


def find_p2(g: Graph, within: Iterable[int] | None = None) -> tuple[int, int, int] | None:
    """First P2 (ascending middle vertex) inside ``within``, or None."""
    s = frozenset(g.vertices if within is None else within)
    for v in sorted(s):
        nbrs = sorted(g.adj(v) & s)
        if len(nbrs) >= 2:
            return (nbrs[0], v, nbrs[1])
    return None


def is_p2(g: Graph, path: tuple[int, int, int]) -> bool:
    u, v, w = path
    return len({u, v, w}) == 3 and g.has_edge(u, v) and g.has_edge(v, w)
