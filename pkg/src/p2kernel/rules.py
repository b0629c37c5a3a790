"""Exchange rules over a unit partition.

Every rule either returns ``None`` (not applicable), a ``LargerPacking``
holding strictly more P2's than there are units, or a ``Mutated`` marker
after moving vertices between units in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from .errors import InvariantViolation
from .graph import Graph, find_p2, is_p2
from .matching import AuxBipartite, Matching
from .packing import P2Packing, Path, find_disjoint_p2s, has_two_disjoint_p2s, packing_violation
from .units import ROLE_CORE, ROLE_LEAF, ROLE_TWIG, Kind, UnitPartition


@dataclass(frozen=True)
class LargerPacking:
    packing: P2Packing
    rule: str
    detail: str = ""


@dataclass(frozen=True)
class Mutated:
    rule: str
    detail: str = ""
    touched: tuple[int, ...] = ()


RuleOutcome = LargerPacking | Mutated | None


def _larger(up: UnitPartition, drop: set[int], new: list[Path], rule: str, detail: str) -> LargerPacking:
    keep = [u.base_path for i, u in enumerate(up.units) if i not in drop]
    packing = P2Packing(tuple(keep + new))
    why = packing_violation(up.host, packing)
    if why is not None:
        raise InvariantViolation(f"{rule} produced an invalid packing: {why}")
    if len(packing) <= len(up.units):
        raise InvariantViolation(f"{rule} did not grow the packing")
    return LargerPacking(packing, rule, detail)


# -- rule 1 --------------------------------------------------------------


def rule1_split(g: Graph, up: UnitPartition) -> LargerPacking | None:
    """A unit holding two disjoint P2's yields one more path."""
    for i, u in enumerate(up.units):
        if not has_two_disjoint_p2s(g, u.members):
            continue
        two = find_disjoint_p2s(g, u.members, 2)
        if two is None:
            raise InvariantViolation(f"unit {i} lost its two disjoint P2's")
        return _larger(up, {i}, two, "ER1", f"unit {i}")
    return None


# -- rule 2 --------------------------------------------------------------


def _replace_units(g: Graph, up: UnitPartition, t: Path, ids: set[int]) -> list[Path] | None:
    """``t`` plus one P2 from each unit in ``ids`` minus ``t``, if all exist."""
    out = [t]
    for i in sorted(ids):
        rest = up.units[i].members - set(t)
        p = find_p2(g, rest)
        if p is None:
            return None
        out.append(p)
    return out


def _cross_candidates(g: Graph, up: UnitPartition, a: int, b: int) -> list[Path] | None:
    """Candidate P2's through edge ``ab`` for cases (i)-(iii), or None."""
    ua, ub = up.units[up.unit_of(a)], up.units[up.unit_of(b)]
    rb = up.role(b)
    if ua.democratic and a != ua.nose and rb != ROLE_CORE:
        scope = ua.members | ub.members
        cands: list[Path] = [(x, a, b) for x in sorted(g.adj(a) & scope) if x != b]
        cands += [(a, b, y) for y in sorted(g.adj(b) & scope) if y != a]
        return cands
    if ua.kind is Kind.BULL and a == ua.nose and rb == ROLE_TWIG:
        t = up.twig_of(b)
        return [(a, b, t[0] if t[1] == b else t[1])]
    if up.role(a) == ROLE_TWIG and rb in (ROLE_TWIG, ROLE_LEAF):
        t = up.twig_of(a)
        return [(t[0] if t[1] == a else t[1], a, b)]
    return None


def rule2_cross_unit(g: Graph, up: UnitPartition) -> LargerPacking | None:
    """Edges between units that let two units host three P2's, or
    two leaf-leaf edges that let three units host four."""
    for u, v in g.edges():
        iu, iv = up.unit_of(u), up.unit_of(v)
        if iu == iv:
            continue
        for a, b in ((u, v), (v, u)):
            cands = _cross_candidates(g, up, a, b)
            if cands is None:
                continue
            ids = {iu, iv}
            for t in cands:
                new = _replace_units(g, up, t, ids)
                if new is not None:
                    return _larger(up, ids, new, "ER2", f"edge {a}-{b}")
            three = find_disjoint_p2s(g, up.units[iu].members | up.units[iv].members, 3)
            if three is None:
                raise InvariantViolation(f"edge {a}-{b} between units {iu}, {iv} gives no third P2")
            return _larger(up, ids, three, "ER2", f"edge {a}-{b}")
    for y in g.vertices:
        if up.role(y) != ROLE_LEAF:
            continue
        iy = up.unit_of(y)
        outer = [x for x in g.neighbors(y) if up.role(x) == ROLE_LEAF and up.unit_of(x) != iy]
        for j, x in enumerate(outer):
            for z in outer[j + 1:]:
                ix, iz = up.unit_of(x), up.unit_of(z)
                if ix == iz:
                    continue
                ids = {ix, iy, iz}
                new = _replace_units(g, up, (x, y, z), ids)
                if new is None:
                    new = find_disjoint_p2s(g, set().union(*(up.units[i].members for i in ids)), 4)
                if new is None:
                    raise InvariantViolation(f"leaf path {x}-{y}-{z} gives no fourth P2")
                return _larger(up, ids, new, "ER2", f"leaf path {x}-{y}-{z}")
    return None


# -- rules 3 and 4 ---------------------------------------------------------


def rule3_nose_leaf(g: Graph, up: UnitPartition) -> Mutated | None:
    """A leaf adjacent to the nose of a bull moves into the bull."""
    for i, u in enumerate(up.units):
        if u.kind is not Kind.BULL:
            continue
        for x in g.neighbors(u.nose):  # type: ignore[arg-type]
            if up.role(x) == ROLE_LEAF and up.unit_of(x) != i:
                src = up.unit_of(x)
                up.move([x], src, i)
                return Mutated("ER3", f"leaf {x} joins bull {i}", (src, i))
    return None


def rule4_leaf_leaf(g: Graph, up: UnitPartition) -> Mutated | None:
    """Of two adjacent leaves in different units, one joins the other's unit."""
    for u1, u2 in g.edges():
        if up.role(u1) != ROLE_LEAF or up.role(u2) != ROLE_LEAF:
            continue
        i1, i2 = up.unit_of(u1), up.unit_of(u2)
        if i1 == i2:
            continue
        a, b = up.units[i1], up.units[i2]
        if a.is_type(1, 4) and b.is_type(1, 4):
            raise InvariantViolation(f"leaf edge {u1}-{u2} joins two (1,4)-units")
        if len(a) >= len(b) and not b.is_type(1, 4):
            up.move([u1], i1, i2)
            return Mutated("ER4", f"leaf {u1} joins unit {i2}", (i1, i2))
        up.move([u2], i2, i1)
        return Mutated("ER4", f"leaf {u2} joins unit {i1}", (i2, i1))
    return None


# -- rules 5 and 6: alternating paths --------------------------------------


def build_b2(up: UnitPartition) -> AuxBipartite:
    """Core vertices against twigs; tags carry the owning unit."""
    return _build_core_graph(up, lambda u: list(u.twigs), "twig")


def build_b3(up: UnitPartition) -> AuxBipartite:
    """Core vertices against leaves; tags carry the owning unit."""
    return _build_core_graph(up, lambda u: list(u.leaves), "leaf")


def _build_core_graph(up: UnitPartition, items: Callable, name: str) -> AuxBipartite:
    g = up.host
    left = [("core", c, i) for i, u in enumerate(up.units) for c in u.cores]
    right = [(name, it, i) for i, u in enumerate(up.units) for it in items(u)]
    core_index = {tag[1]: li for li, tag in enumerate(left)}
    edges = []
    for ri, (_, it, _) in enumerate(right):
        vs = it if isinstance(it, tuple) else (it,)
        for c in sorted(set().union(*(g.adj(v) for v in vs)) & core_index.keys()):
            edges.append((core_index[c], ri))
    return AuxBipartite.build(left, right, edges)


@dataclass(frozen=True)
class AlternatingPath:
    """Units ``U1 .. Ul`` and the items moved: ``items[i]`` goes from unit i to i+1."""

    units: tuple[int, ...]
    items: tuple[Hashable, ...]


def alternating_search(
    b: AuxBipartite,
    sources: list[int],
    terminal: Callable[[int], bool],
) -> tuple[AlternatingPath | None, frozenset[int]]:
    """Breadth-first search over units along B2/B3 edges.

    From a unit we may pass any of its items to a core adjacent to that
    item, entering the core's unit. Units are visited once, so every path
    found runs through distinct units. Returns the shortest path to a
    terminal unit (ties broken by the smallest terminal core id) together
    with every unit reached.
    """
    items_of: dict[int, list[int]] = {}
    for ri, tag in enumerate(b.right):
        items_of.setdefault(tag[2], []).append(ri)
    r_adj: list[list[int]] = [[] for _ in b.right]
    for l, rs in enumerate(b.adj):
        for r in rs:
            r_adj[r].append(l)
    visited = set(sources)
    parent: dict[int, tuple[int, int, int]] = {}
    frontier = sorted(set(sources))
    while frontier:
        found: list[tuple[int, int]] = []
        nxt: list[int] = []
        for unit in frontier:
            for r in items_of.get(unit, ()):
                for l in r_adj[r]:
                    w = b.left[l][2]
                    if w in visited:
                        continue
                    visited.add(w)
                    parent[w] = (unit, r, l)
                    if terminal(w):
                        found.append((b.left[l][1], w))
                    else:
                        nxt.append(w)
        if found:
            _, end = min(found)
            units, items = [end], []
            while end in parent:
                prev, r, _ = parent[end]
                items.append(b.right[r][1])
                units.append(prev)
                end = prev
            return AlternatingPath(tuple(reversed(units)), tuple(reversed(items))), frozenset(visited)
        frontier = sorted(nxt)
    return None, frozenset(visited)


def twig_donor(u) -> bool:
    return u.despotic and (u.d1 > 2 or (u.d1, u.d2) == (2, 2))


def leaf_donor(u) -> bool:
    return (u.despotic or u.small) and u.kind is not Kind.SMALL03 and u.d2 >= 3


def rule5_twig_migrate(g: Graph, up: UnitPartition) -> Mutated | None:
    """Shift twigs along an alternating path ending at a twigless unit."""
    donors = [i for i, u in enumerate(up.units) if twig_donor(u)]
    if not donors:
        return None
    b = build_b2(up)
    path, _ = alternating_search(b, donors, lambda w: up.units[w].d1 == 0)
    if path is None:
        return None
    return _shift(up, path, "ER5")


def rule6_leaf_migrate(g: Graph, up: UnitPartition) -> Mutated | None:
    """Shift leaves along an alternating path ending at a unit with at most one leaf."""
    bad = [u.label for u in up.units if u.despotic and (u.d1, u.d2) in {(4, 0), (3, 1), (3, 0)}]
    if bad:
        raise InvariantViolation(f"leaf migration with twig-heavy units present: {bad}")
    donors = [i for i, u in enumerate(up.units) if leaf_donor(u)]
    if not donors:
        return None
    b = build_b3(up)
    path, _ = alternating_search(b, donors, lambda w: up.units[w].d2 <= 1)
    if path is None:
        return None
    return _shift(up, path, "ER6")


def _shift(up: UnitPartition, path: AlternatingPath, rule: str) -> Mutated:
    moves = []
    for k, item in enumerate(path.items):
        vs = item if isinstance(item, tuple) else (item,)
        moves.append((vs, path.units[k], path.units[k + 1]))
    up.transfer(moves)
    return Mutated(rule, f"path through units {list(path.units)}", path.units)


# -- rule 7 --------------------------------------------------------------


@dataclass(frozen=True)
class B4:
    """Net units and twigs against all remaining vertices."""

    graph: AuxBipartite
    lefts: tuple[tuple[str, object], ...]  # ("net", unit id) or ("twig", (a, b))
    rights: tuple[int, ...]


def build_b4(up: UnitPartition) -> B4:
    g = up.host
    lefts: list[tuple[str, object]] = []
    inside: set[int] = set()
    for i, u in enumerate(up.units):
        if u.kind is Kind.NET:
            lefts.append(("net", i))
            inside |= u.members
    for u in up.units:
        for t in u.twigs:
            lefts.append(("twig", t))
            inside.update(t)
    rights = tuple(v for v in g.vertices if v not in inside)
    index = {v: ri for ri, v in enumerate(rights)}
    edges = []
    for li, (tag, obj) in enumerate(lefts):
        vs = up.units[obj].members if tag == "net" else frozenset(obj)  # type: ignore[index,arg-type]
        nb = g.neighborhood(vs)
        if not nb:
            raise InvariantViolation(f"{tag} {obj} is isolated in B4")
        for v in sorted(nb):
            if up.role(v) != ROLE_CORE:
                raise InvariantViolation(f"{tag} {obj} sees non-core vertex {v}")
            edges.append((li, index[v]))
    return B4(AuxBipartite.build(lefts, rights, edges), tuple(lefts), rights)


def rule7_triggered(up: UnitPartition) -> bool:
    c = up.counts()
    return c.get("net", 0) + c.get("(2,1)", 0) + c.get("(2,0)", 0) > c.get("(0,3)", 0) + c.get("(0,1)", 0) + c.get(
        "(0,0)", 0
    )


def rule7_final(g: Graph, up: UnitPartition, b4: B4, m: Matching) -> LargerPacking:
    """Turn a matching saturating the left side of B4 into a larger packing."""
    if len(m) != len(b4.lefts):
        raise ValueError("matching does not saturate B4")
    new: list[Path] = []
    used: set[int] = set()
    for li, ri in sorted(m.pairs.items()):
        tag, obj = b4.lefts[li]
        v = b4.rights[ri]
        used.add(v)
        if tag == "net":
            vs = up.units[obj].members | {v}  # type: ignore[index]
            two = find_disjoint_p2s(g, vs, 2)
            if two is None:
                raise InvariantViolation(f"net {obj} with {v} holds no two P2's")
            new += two
            used |= vs
        else:
            a, c = obj  # type: ignore[misc]
            new.append((c, a, v) if g.has_edge(a, v) else (a, c, v))
            used.update(obj)  # type: ignore[arg-type]
    drop = {i for i, u in enumerate(up.units) if used & set(u.base_path)}
    for i in sorted(drop):
        # a touched unit may still hold a P2 on its untouched vertices
        p = find_p2(g, up.units[i].members - used)
        if p is not None:
            new.append(p)
            used.update(p)
    return _larger(up, drop, new, "ER7", f"{len(m)} B4 pairs")


# -- sanity checks -----------------------------------------------------------


def check_consolidated(g: Graph, up: UnitPartition) -> None:
    """Invariants once ER1 and ER2 no longer apply.

    A non-nose vertex of a democratic unit sees no non-core vertex of
    another unit. Twig vertices of different units are never adjacent,
    and no twig vertex sees a leaf of another unit."""
    for u, v in g.edges():
        iu, iv = up.unit_of(u), up.unit_of(v)
        if iu == iv:
            continue
        for a, b in ((u, v), (v, u)):
            if _cross_candidates(g, up, a, b) is not None:
                raise InvariantViolation(f"edge {a}-{b} should have fired ER2")


def check_reduced(g: Graph, up: UnitPartition) -> None:
    """After ER3/ER4: leaves are independent and see only core vertices."""
    for v in g.vertices:
        if up.role(v) != ROLE_LEAF:
            continue
        for x in g.adj(v):
            if up.role(x) == ROLE_LEAF:
                raise InvariantViolation(f"leaves {v} and {x} are adjacent")
            if up.unit_of(x) != up.unit_of(v) and up.role(x) != ROLE_CORE:
                raise InvariantViolation(f"leaf {v} sees non-core vertex {x} of another unit")


def units_valid(g: Graph, up: UnitPartition) -> bool:
    return all(is_p2(g, u.base_path) and set(u.base_path) <= u.members for u in up.units)
