"""Reduction rules that delete vertices and lower the budget.

Each application removes vertices, lowers the budget and records a
``TraceEntry`` listing the P2's it accounted for, so a packing of the
reduced instance can be lifted back to the input graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InvariantViolation
from .graph import Graph, find_p2
from .matching import Violating
from .packing import Path, exact_opt
from .units import B1, UnitPartition
from .rules import B4, alternating_search, build_b2, build_b3, leaf_donor, twig_donor


@dataclass(frozen=True)
class TraceEntry:
    rule: str
    removed: tuple[int, ...]
    k_decrement: int
    harvested_paths: tuple[Path, ...]
    via: str = ""

    def to_json(self) -> str:
        data = {
            "rule": self.rule,
            "removed": list(self.removed),
            "k_decrement": self.k_decrement,
            "harvested_paths": [list(p) for p in self.harvested_paths],
        }
        if self.via:
            data["via"] = self.via
        return json.dumps(data)

    @classmethod
    def from_dict(cls, data: dict) -> "TraceEntry":
        return cls(
            data["rule"],
            tuple(data["removed"]),
            int(data["k_decrement"]),
            tuple(tuple(p) for p in data["harvested_paths"]),  # type: ignore[misc]
            data.get("via", ""),
        )


@dataclass(frozen=True)
class ReducibleSet:
    """Vertices ``c`` with max degree at most one and boundary N(c).

    ``assignment`` gives each boundary vertex its private components of
    G[c]: one edge component each, or two components each.
    """

    c: frozenset[int]
    boundary: frozenset[int]
    assignment: dict[int, tuple[tuple[int, ...], ...]] = field(default_factory=dict)

    def validate(self, g: Graph) -> None:
        if not self.c or not self.boundary:
            raise InvariantViolation("reducible set needs a non-empty set and boundary")
        sub = g.induced(self.c)
        if sub.max_degree() > 1:
            raise InvariantViolation("reducible set has a vertex of degree two")
        if g.neighborhood(self.c) != self.boundary:
            raise InvariantViolation("boundary is not the neighborhood of the set")
        comps = set(sub.components())
        seen: set[tuple[int, ...]] = set()
        for v in self.boundary:
            parts = self.assignment.get(v)
            if not parts:
                raise InvariantViolation(f"boundary vertex {v} has no components")
            for part in parts:
                if part not in comps or part in seen:
                    raise InvariantViolation(f"component {part} for {v} is not a free component of the set")
                if not g.adj(v) & set(part):
                    raise InvariantViolation(f"component {part} does not touch {v}")
                seen.add(part)
            sizes = sorted(len(p) for p in parts)
            if sizes not in ([2], [1, 1], [1, 2], [2, 2]):
                raise InvariantViolation(f"boundary vertex {v} gets components of sizes {sizes}")
        shapes = {len(self.assignment[v]) for v in self.boundary}
        if len(shapes) != 1:
            raise InvariantViolation("boundary mixes single edge components with pairs of components")


def _harvest(g: Graph, v: int, parts: tuple[tuple[int, ...], ...]) -> Path:
    """A P2 through ``v`` using its assigned components."""
    for part in parts:
        if len(part) == 2:
            a, b = part
            return (a, b, v) if g.has_edge(b, v) else (b, a, v)
    return (parts[0][0], v, parts[1][0])


# -- rule R1 -------------------------------------------------------------


def rule_r1_small_components(g: Graph, k: int) -> tuple[Graph, int, list[TraceEntry]]:
    """Delete every component on at most six vertices, solved exactly."""
    entries = []
    drop: set[int] = set()
    for comp in g.components():
        if len(comp) > 6:
            continue
        value, witness = exact_opt(g.induced(comp), limit=6)
        entries.append(TraceEntry("R1", comp, value, witness.paths, "component"))
        drop.update(comp)
    if not drop:
        return g, k, []
    return g.without(drop), k - sum(e.k_decrement for e in entries), entries


# -- reducible sets ------------------------------------------------------


def find_reducible_from_b1(b1: B1, violating: Violating) -> ReducibleSet:
    """Components of a B1 Hall violator form a reducible set."""
    pairs: dict[int, list[tuple[int, ...]]] = {}
    for r, l in violating.partial.items():
        v, _ = b1.slots[r]
        pairs.setdefault(v, []).append(b1.components[l])
    for v, comps in pairs.items():
        if len(comps) != 2:
            raise InvariantViolation(f"only one copy of vertex {v} lies in the violator's neighborhood")
    c = frozenset(x for l in violating.lefts for x in b1.components[l])
    assignment = {v: tuple(sorted(comps)) for v, comps in pairs.items()}
    return ReducibleSet(c, frozenset(pairs), assignment)


def _reached_sets(up: UnitPartition, donor: int, twigs: bool) -> ReducibleSet:
    g = up.host
    b = build_b2(up) if twigs else build_b3(up)
    terminal = (lambda w: up.units[w].d1 == 0) if twigs else (lambda w: up.units[w].d2 <= 1)
    path, reached = alternating_search(b, [donor], lambda w: False)
    if path is not None:
        raise InvariantViolation("search without terminals returned a path")
    for w in reached:
        if terminal(w):
            raise InvariantViolation(f"unit {w} is a reachable terminal; migration should have applied")
    c: set[int] = set()
    for w in reached:
        u = up.units[w]
        c.update(u.twig_vertices() if twigs else u.leaves)
    boundary = g.neighborhood(c)
    assignment: dict[int, tuple[tuple[int, ...], ...]] = {}
    for v in boundary:
        w = up.unit_of(v)
        u = up.units[w]
        if w not in reached or v not in u.cores:
            raise InvariantViolation(f"vertex {v} next to the set is not a core of a reached unit")
        if twigs:
            assignment[v] = (tuple(sorted(u.twigs[0])),)
        else:
            if len(u.leaves) < 2:
                raise InvariantViolation(f"reached unit {w} has fewer than two leaves")
            assignment[v] = ((u.leaves[0],), (u.leaves[1],))
    return ReducibleSet(frozenset(c), boundary, assignment)


def find_reducible_twigs(up: UnitPartition) -> ReducibleSet:
    """Twigs reachable from a twig donor when no twig migration applies."""
    donors = [i for i, u in enumerate(up.units) if twig_donor(u)]
    if not donors:
        raise InvariantViolation("no twig donor")
    return _reached_sets(up, donors[0], twigs=True)


def find_reducible_leaves(up: UnitPartition) -> ReducibleSet:
    """Leaves reachable from a leaf donor when no leaf migration applies."""
    donors = [i for i, u in enumerate(up.units) if leaf_donor(u)]
    if not donors:
        raise InvariantViolation("no leaf donor")
    return _reached_sets(up, donors[0], twigs=False)


def rule_r2_apply(g: Graph, k: int, rs: ReducibleSet, via: str = "") -> tuple[Graph, int, TraceEntry]:
    """Remove a reducible set with its boundary; one P2 per boundary vertex."""
    rs.validate(g)
    harvested = tuple(_harvest(g, v, rs.assignment[v]) for v in sorted(rs.boundary))
    removed = tuple(sorted(rs.c | rs.boundary))
    entry = TraceEntry("R2", removed, len(rs.boundary), harvested, via)
    return g.without(removed), k - len(rs.boundary), entry


# -- rule R3 -------------------------------------------------------------


def rule_r3_net_crown(g: Graph, k: int, up: UnitPartition, b4: B4, violating: Violating) -> tuple[Graph, int, TraceEntry]:
    """Remove the nets and twigs of a B4 Hall violator with their neighbors."""
    x: set[int] = set()
    nets = []
    for l in sorted(violating.lefts):
        tag, obj = b4.lefts[l]
        if tag == "net":
            nets.append(l)
            x |= up.units[obj].members  # type: ignore[index]
        else:
            x.update(obj)  # type: ignore[arg-type]
    nx = g.neighborhood(x)
    expected = frozenset(b4.rights[r] for r in violating.neighborhood)
    if nx != expected:
        raise InvariantViolation("neighborhood of the crown differs from the violator's neighborhood")
    harvested: list[Path] = []
    matched_nets: set[int] = set()
    for r, l in sorted(violating.partial.items()):
        v = b4.rights[r]
        tag, obj = b4.lefts[l]
        if tag == "twig":
            a, c = obj  # type: ignore[misc]
            harvested.append((c, a, v) if g.has_edge(a, v) else (a, c, v))
        else:
            matched_nets.add(l)
            harvested += _net_with_vertex(g, up.units[obj].members, v)  # type: ignore[index]
    for l in nets:
        if l not in matched_nets:
            _, obj = b4.lefts[l]
            p = find_p2(g, up.units[obj].members)  # type: ignore[index]
            if p is None:
                raise InvariantViolation(f"net unit {obj} holds no P2")
            harvested.append(p)
    dec = len(nets) + len(nx)
    if len(harvested) != dec:
        raise InvariantViolation("crown harvest does not match its budget decrement")
    removed = tuple(sorted(x | nx))
    return g.without(removed), k - dec, TraceEntry("R3", removed, dec, tuple(harvested), "net-crown")


def _net_with_vertex(g: Graph, members: frozenset[int], v: int) -> list[Path]:
    for p in sorted(g.adj(v) & members):
        for q in sorted(g.adj(p) & members):
            rest = find_p2(g, members - {p, q})
            if rest is not None:
                return [(v, p, q), rest]
    raise InvariantViolation(f"net {sorted(members)} and vertex {v} hold no two P2's")
