"""Bipartite matching: Hopcroft-Karp and Hall-violator extraction.

Nodes are dense integer indices on each side; every node carries an
opaque payload tag so one engine serves all the auxiliary graphs built
by the kernelization (components, core vertices, twigs, leaves, units).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable


@dataclass
class AuxBipartite:
    left: list[Hashable] = field(default_factory=list)
    right: list[Hashable] = field(default_factory=list)
    adj: list[list[int]] = field(default_factory=list)

    @classmethod
    def build(
        cls,
        left: Iterable[Hashable],
        right: Iterable[Hashable],
        edges: Iterable[tuple[int, int]],
    ) -> "AuxBipartite":
        b = cls(list(left), list(right))
        nbrs: list[set[int]] = [set() for _ in b.left]
        for l, r in edges:
            if not (0 <= l < len(b.left) and 0 <= r < len(b.right)):
                raise ValueError(f"edge ({l}, {r}) references a missing node")
            nbrs[l].add(r)
        b.adj = [sorted(s) for s in nbrs]
        return b

    def edges(self) -> list[tuple[int, int]]:
        return [(l, r) for l, rs in enumerate(self.adj) for r in rs]

    def neighborhood(self, lefts: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for l in lefts:
            out.update(self.adj[l])
        return frozenset(out)


@dataclass(frozen=True)
class Matching:
    """Left index -> right index."""

    pairs: dict[int, int]

    def __len__(self) -> int:
        return len(self.pairs)

    def right_to_left(self) -> dict[int, int]:
        return {r: l for l, r in self.pairs.items()}

    def is_valid(self, b: AuxBipartite) -> bool:
        rights = list(self.pairs.values())
        return len(set(rights)) == len(rights) and all(
            0 <= l < len(b.left) and r in b.adj[l] for l, r in self.pairs.items()
        )


@dataclass(frozen=True)
class Saturating:
    matching: Matching


@dataclass(frozen=True)
class Violating:
    """A Hall violator L' with a matching of N(L') into L'.

    ``partial`` maps every right node of ``neighborhood`` to its partner in
    ``lefts``; ``len(neighborhood) < len(lefts)`` always holds.
    """

    lefts: frozenset[int]
    neighborhood: frozenset[int]
    partial: dict[int, int]


SaturateOrViolate = Saturating | Violating


_INF = float("inf")


def hopcroft_karp(b: AuxBipartite) -> Matching:
    """Maximum cardinality matching in O(E sqrt(V))."""
    n_left = len(b.left)
    match_l: list[int] = [-1] * n_left
    match_r: list[int] = [-1] * len(b.right)
    dist: list[float] = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for l in range(n_left):
            if match_l[l] == -1:
                dist[l] = 0
                queue.append(l)
            else:
                dist[l] = _INF
        found = False
        while queue:
            l = queue.popleft()
            for r in b.adj[l]:
                nxt = match_r[r]
                if nxt == -1:
                    found = True
                elif dist[nxt] == _INF:
                    dist[nxt] = dist[l] + 1
                    queue.append(nxt)
        return found

    def dfs(l: int) -> bool:
        for r in b.adj[l]:
            nxt = match_r[r]
            if nxt == -1 or (dist[nxt] == dist[l] + 1 and dfs(nxt)):
                match_l[l] = r
                match_r[r] = l
                return True
        dist[l] = _INF
        return False

    while bfs():
        for l in range(n_left):
            if match_l[l] == -1:
                dfs(l)
    return Matching({l: r for l, r in enumerate(match_l) if r != -1})


def saturate_or_violate(b: AuxBipartite) -> Saturating | Violating:
    """Either a matching saturating the left side, or a Hall violator.

    The violator is the set of left nodes reachable by alternating paths
    from the unmatched left nodes of a maximum matching. Every right node
    reached is matched (otherwise the matching could be augmented) and its
    partner is reached too, so the restriction of the matching to the
    reached right nodes saturates N(L') inside L'.
    """
    m = hopcroft_karp(b)
    if len(m) == len(b.left):
        return Saturating(m)
    r2l = m.right_to_left()
    seen_l = {l for l in range(len(b.left)) if l not in m.pairs}
    seen_r: set[int] = set()
    queue = deque(sorted(seen_l))
    while queue:
        l = queue.popleft()
        for r in b.adj[l]:
            if r in seen_r:
                continue
            seen_r.add(r)
            partner = r2l[r]  # KeyError here would mean m is not maximum
            if partner not in seen_l:
                seen_l.add(partner)
                queue.append(partner)
    partial = {r: r2l[r] for r in sorted(seen_r)}
    return Violating(frozenset(seen_l), frozenset(seen_r), partial)
