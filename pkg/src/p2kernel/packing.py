"""P2-packings: the greedy maximal packing and an exact oracle.

A P2 is stored as an ordered triple ``(u, v, w)`` with ``v`` the middle
vertex, so ``uv`` and ``vw`` must be edges.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import OracleLimitError
from .graph import Graph, is_p2

Path = tuple[int, int, int]

DEFAULT_ORACLE_LIMIT = 20
ORACLE_ENV = "P2K_ORACLE_LIMIT"


def oracle_limit() -> int:
    raw = os.environ.get(ORACLE_ENV)
    return int(raw) if raw else DEFAULT_ORACLE_LIMIT


@dataclass(frozen=True)
class P2Packing:
    paths: tuple[Path, ...] = ()

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for p in self.paths for v in p)

    @classmethod
    def of(cls, paths: Iterable[Sequence[int]]) -> "P2Packing":
        return cls(tuple(tuple(p) for p in paths))  # type: ignore[misc]


def verify_packing(g: Graph, p: P2Packing | Iterable[Path]) -> bool:
    return packing_violation(g, p) is None


def packing_violation(g: Graph, p: P2Packing | Iterable[Path]) -> str | None:
    """Describe the first invariant a packing breaks in ``g``, or None."""
    used: dict[int, Path] = {}
    for path in p:
        if len(path) != 3:
            return f"path {path} does not have three vertices"
        for v in path:
            if v not in g:
                return f"vertex {v} of path {path} is not in the graph"
        if not is_p2(g, path):
            return f"path {path} is not a P2 of the graph"
        for v in path:
            if v in used:
                return f"vertex {v} is shared by paths {used[v]} and {path}"
            used[v] = path
    return None


def extend_to_maximal(g: Graph, paths: Iterable[Path] = ()) -> P2Packing:
    """Greedily add P2's disjoint from ``paths`` until none is left.

    The middle of each new path is the smallest vertex with two unused
    neighbors; its two smallest unused neighbors are the ends.
    """
    out = list(paths)
    used = {v for p in out for v in p}
    for v in g.vertices:
        if v in used:
            continue
        free = [u for u in g.neighbors(v) if u not in used]
        if len(free) >= 2:
            out.append((free[0], v, free[1]))
            used.update((free[0], v, free[1]))
    # one pass suffices: free neighbor counts only shrink as paths are added
    return P2Packing(tuple(out))


def greedy_maximal_packing(g: Graph) -> P2Packing:
    return extend_to_maximal(g)


def is_maximal(g: Graph, p: P2Packing) -> bool:
    rest = g.without(p.vertices)
    return rest.max_degree() <= 1


# -- exact oracle -------------------------------------------------------


def exact_opt(g: Graph, limit: int | None = None) -> tuple[int, P2Packing]:
    """Maximum number of vertex-disjoint P2's, with a witness packing.

    Memoized search over vertex subsets (bitmasks): a subset splits into
    its connected components, components on at most two vertices are
    worth nothing, and otherwise a minimum-degree vertex is either left
    out or covered by one of the P2's through it. A component whose
    greedy packing meets the upper bound (``|C| // 3``, or the number of
    possible middle vertices) is settled without branching.
    """
    limit = oracle_limit() if limit is None else limit
    if len(g) > limit:
        raise OracleLimitError(f"graph has {len(g)} vertices, oracle limit is {limit}")
    return _Solver(g).solve()


def has_packing(g: Graph, k: int, limit: int | None = None) -> bool:
    """Exact decision: does ``g`` contain ``k`` vertex-disjoint P2's?"""
    if k <= 0:
        return True
    if len(greedy_maximal_packing(g)) >= k:
        return True
    return exact_opt(g, limit)[0] >= k


def find_disjoint_p2s(g: Graph, vertices: Iterable[int], t: int) -> list[Path] | None:
    """Find ``t`` vertex-disjoint P2's inside ``G[vertices]`` or return None."""
    sub = g.induced(vertices)
    if t <= 0:
        return []
    if len(sub) < 3 * t:
        return None
    size, witness = _Solver(sub).solve()
    return list(witness.paths[:t]) if size >= t else None


def has_two_disjoint_p2s(g: Graph, vertices: Iterable[int]) -> bool:
    """Cheap test used on units (at most 15 vertices)."""
    s = frozenset(vertices)
    for v in s:
        nbrs = sorted(g.adj(v) & s)
        if len(nbrs) < 2:
            continue
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1:]:
                rest = s - {a, v, b}
                if any(len(g.adj(x) & rest) >= 2 for x in rest):
                    return True
    return False


class _Solver:
    def __init__(self, g: Graph):
        self.ids = list(g.vertices)
        index = {v: i for i, v in enumerate(self.ids)}
        self.nbr = [0] * len(self.ids)
        for v in self.ids:
            m = 0
            for u in g.adj(v):
                m |= 1 << index[u]
            self.nbr[index[v]] = m
        self.memo: dict[int, tuple[int, tuple]] = {}

    def solve(self) -> tuple[int, P2Packing]:
        full = (1 << len(self.ids)) - 1
        value = self._best(full)
        paths: list[Path] = []
        self._collect(full, paths)
        return value, P2Packing(tuple((self.ids[a], self.ids[b], self.ids[c]) for a, b, c in paths))

    def _components(self, mask: int) -> list[int]:
        comps = []
        rest = mask
        while rest:
            low = rest & -rest
            comp = low
            frontier = low
            while frontier:
                bit = frontier & -frontier
                frontier ^= bit
                new = self.nbr[bit.bit_length() - 1] & mask & ~comp
                comp |= new
                frontier |= new
            comps.append(comp)
            rest &= ~comp
        return comps

    def _greedy(self, mask: int) -> list[Path]:
        out = []
        free = mask
        m = mask
        while m:
            bit = m & -m
            m ^= bit
            if not free & bit:
                continue
            v = bit.bit_length() - 1
            cand = self.nbr[v] & free
            if cand.bit_count() >= 2:
                a = (cand & -cand)
                cand ^= a
                b = cand & -cand
                out.append((a.bit_length() - 1, v, b.bit_length() - 1))
                free &= ~(a | bit | b)
        return out

    def _best(self, mask: int) -> int:
        hit = self.memo.get(mask)
        if hit is not None:
            return hit[0]
        comps = self._components(mask)
        if len(comps) > 1:
            value = sum(self._best(c) for c in comps)
            self.memo[mask] = (value, ("split", comps))
            return value
        size = mask.bit_count()
        if size < 3:
            self.memo[mask] = (0, ("none",))
            return 0
        # a vertex uses at most two of its pendant neighbors; the rest are dead
        trimmed = self._trim_pendants(mask)
        if trimmed != mask:
            value = self._best(trimmed)
            self.memo[mask] = (value, ("skip", trimmed))
            return value
        greedy = self._greedy(mask)
        middles = sum(1 for i in _bits(mask) if (self.nbr[i] & mask).bit_count() >= 2)
        bound = min(size // 3, middles)
        if len(greedy) == bound:
            self.memo[mask] = (bound, ("greedy", greedy))
            return bound
        v = min(_bits(mask), key=lambda i: ((self.nbr[i] & mask).bit_count(), i))
        vb = 1 << v
        vn = self.nbr[v] & mask
        if vn.bit_count() == 1:
            # some optimum covers a pendant vertex whenever it covers its
            # neighbor, so the two are either both unused or v is an end
            drop = mask & ~(vb | vn)
            paths = [p for p in self._paths_through(v, mask) if p[0] == v]
        else:
            drop = mask & ~vb
            paths = self._paths_through(v, mask)
        best = self._best(drop)
        choice: tuple = ("skip", drop)
        for path in paths:
            if best >= bound:
                break
            pm = (1 << path[0]) | (1 << path[1]) | (1 << path[2])
            value = 1 + self._best(mask & ~pm)
            if value > best:
                best, choice = value, ("take", path, mask & ~pm)
        self.memo[mask] = (best, choice)
        return best

    def _trim_pendants(self, mask: int) -> int:
        out = mask
        for u in _bits(mask):
            pend = [i for i in _bits(self.nbr[u] & mask) if (self.nbr[i] & mask).bit_count() == 1]
            for i in pend[2:]:
                out &= ~(1 << i)
        return out

    def _paths_through(self, v: int, mask: int) -> list[Path]:
        out = []
        nv = sorted(_bits(self.nbr[v] & mask))
        # v as the middle vertex
        for i, a in enumerate(nv):
            for b in nv[i + 1:]:
                out.append((a, v, b))
        # v as an end vertex
        for u in nv:
            for w in sorted(_bits(self.nbr[u] & mask & ~(1 << v))):
                out.append((v, u, w))
        return out

    def _collect(self, mask: int, out: list[Path]) -> None:
        _, choice = self.memo[mask]
        tag = choice[0]
        if tag == "split":
            for c in choice[1]:
                self._collect(c, out)
        elif tag == "greedy":
            out.extend(choice[1])
        elif tag == "skip":
            self._collect(choice[1], out)
        elif tag == "take":
            out.append(choice[1])
            self._collect(choice[2], out)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
