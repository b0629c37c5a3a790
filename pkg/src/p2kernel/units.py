"""Unit partitions and the unit taxonomy.

Each path of a maximal packing seeds a unit: the path plus the leftover
components matched to its vertices. Units holding exactly one P2 fall into
three families:

* democratic units (net, pendant, C5, bull) which keep a P2 after losing
  any single vertex;
* despotic units, labelled ``(a, b)``: one core vertex whose removal leaves
  ``a`` edge components (twigs) and ``b`` isolated vertices (leaves);
* small units on three or four vertices, labelled ``(0,3)``, ``(0,1)`` and
  ``(0,0)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import permutations
from typing import Iterable

from .errors import InvariantViolation, NotSimpleError, TwoPathsError
from .graph import Graph, find_p2, is_p2
from .matching import AuxBipartite, Matching
from .packing import P2Packing, Path, has_two_disjoint_p2s, is_maximal

MAX_UNIT_SIZE = 15


class Kind(enum.Enum):
    NET = "net"
    PENDANT = "pendant"
    C5 = "C5"
    BULL = "bull"
    DESPOTIC = "despotic"
    SMALL03 = "(0,3)"
    SMALL01 = "(0,1)"
    SMALL00 = "(0,0)"


DEMOCRATIC = frozenset({Kind.NET, Kind.PENDANT, Kind.C5, Kind.BULL})
SMALL = frozenset({Kind.SMALL03, Kind.SMALL01, Kind.SMALL00})

DESPOTIC_TYPES = frozenset(
    {(4, 0), (3, 1), (3, 0), (2, 2), (2, 1), (2, 0), (1, 4), (1, 3), (1, 2), (0, 4)}
)

# Spanning patterns tried in this order; the first hit names the unit.
_PATTERNS: tuple[tuple[Kind, int, tuple[tuple[int, int], ...]], ...] = (
    # triangle 0,1,2 with one pendant at each corner
    (Kind.NET, 6, ((0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5))),
    # 4-cycle 1,2,3,4 with a pendant at 1
    (Kind.PENDANT, 5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 1))),
    (Kind.C5, 5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0))),
    # triangle 0,1,2 (0 is the nose) with pendants at 1 and 2
    (Kind.BULL, 5, ((0, 1), (0, 2), (1, 2), (1, 3), (2, 4))),
)


@dataclass(frozen=True)
class Unit:
    members: frozenset[int]
    base_path: Path
    kind: Kind | None = None
    d1: int = 0
    d2: int = 0
    cores: tuple[int, ...] = ()
    twigs: tuple[tuple[int, int], ...] = ()
    leaves: tuple[int, ...] = ()
    nose: int | None = None

    def __len__(self) -> int:
        return len(self.members)

    @property
    def classified(self) -> bool:
        return self.kind is not None

    @property
    def democratic(self) -> bool:
        return self.kind in DEMOCRATIC

    @property
    def despotic(self) -> bool:
        return self.kind is Kind.DESPOTIC

    @property
    def small(self) -> bool:
        return self.kind in SMALL

    @property
    def label(self) -> str:
        if self.kind is None:
            return "unclassified"
        if self.kind is Kind.DESPOTIC:
            return f"({self.d1},{self.d2})"
        return self.kind.value

    def is_type(self, a: int, b: int) -> bool:
        """True for the ``(a, b)``-unit, despotic or small."""
        return (self.despotic or self.small) and (self.d1, self.d2) == (a, b)

    def twig_vertices(self) -> frozenset[int]:
        return frozenset(v for t in self.twigs for v in t)

    def peripheral(self) -> frozenset[int]:
        return self.twig_vertices() | frozenset(self.leaves)


# -- classification -----------------------------------------------------


def _relabel(g: Graph, members: Iterable[int]) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
    order = tuple(sorted(members))
    index = {v: i for i, v in enumerate(order)}
    edges = tuple(
        sorted((index[u], index[v]) for u in order for v in g.adj(u) if v in index and index[u] < index[v])
    )
    return order, edges


@lru_cache(maxsize=None)
def _democratic_kind(n: int, edges: tuple[tuple[int, int], ...]) -> tuple[Kind, int] | None:
    """Democratic kind of a relabelled unit and the image of pattern vertex 0."""
    have = set(edges)
    for kind, size, pattern in _PATTERNS:
        if size != n:
            continue
        for perm in permutations(range(n)):
            if all(_ordered(perm[a], perm[b]) in have for a, b in pattern):
                return kind, perm[0]
    return None


def _ordered(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def classify_unit(g: Graph, unit: Unit) -> Unit:
    """Assign kind and roles to ``unit`` from the structure of ``G[unit]``.

    Raises TwoPathsError if the unit holds two disjoint P2's and
    NotSimpleError if it fits none of the defined types.
    """
    members = unit.members
    n = len(members)
    if not 3 <= n <= MAX_UNIT_SIZE:
        raise NotSimpleError(f"unit of size {n} outside [3, {MAX_UNIT_SIZE}]")
    if has_two_disjoint_p2s(g, members):
        raise TwoPathsError(f"unit {sorted(members)} holds two disjoint P2's")
    base = unit.base_path
    if not (set(base) <= members and is_p2(g, base)):
        base = find_p2(g, members)
        if base is None:
            raise NotSimpleError(f"unit {sorted(members)} contains no P2")
    h = g.induced(members)
    order = h.vertices

    if n == 3:
        return _with(unit, base, Kind.SMALL00, 0, 0, cores=order)

    if n == 4:
        if len(h.components()) != 1:
            raise NotSimpleError(f"four-vertex unit {sorted(members)} is disconnected")
        centers = [v for v in order if h.degree(v) == 3]
        if h.num_edges() == 3 and centers:
            c = centers[0]
            return _with(unit, base, Kind.SMALL03, 0, 3, cores=(c,), leaves=tuple(v for v in order if v != c))
        # the leaf is a minimum-degree vertex whose removal keeps a P2
        leaf = min(
            (v for v in order if find_p2(h, set(order) - {v}) is not None),
            key=lambda v: (h.degree(v), v),
        )
        cores = tuple(v for v in order if v != leaf)
        if not set(base) <= set(cores):
            base = find_p2(h, cores)  # type: ignore[assignment]
        return _with(unit, base, Kind.SMALL01, 0, 1, cores=cores, leaves=(leaf,))

    _, edges = _relabel(g, members)
    demo = _democratic_kind(n, edges)
    if demo is not None:
        kind, anchor = demo
        nose = order[anchor] if kind is Kind.BULL else None
        if nose is not None and h.degree(nose) != 2:
            raise InvariantViolation(f"bull unit {sorted(members)} is not induced")
        return _with(unit, base, kind, 0, 0, nose=nose)

    best: tuple[int, int] | None = None
    for v in order:
        rest = h.without([v])
        if rest.max_degree() > 1:
            continue
        twigs = tuple(c for c in rest.components() if len(c) == 2)
        if best is None or len(twigs) > best[0]:
            best = (len(twigs), v)
    if best is None:
        raise NotSimpleError(f"unit {sorted(members)} has no core vertex")
    core = best[1]
    comps = h.without([core]).components()
    twigs = tuple((c[0], c[1]) for c in comps if len(c) == 2)
    leaves = tuple(c[0] for c in comps if len(c) == 1)
    label = (len(twigs), len(leaves))
    if label not in DESPOTIC_TYPES:
        raise NotSimpleError(f"unit {sorted(members)} would be an undefined {label}-unit")
    return _with(unit, base, Kind.DESPOTIC, *label, cores=(core,), twigs=twigs, leaves=leaves)


def _with(unit: Unit, base: Path, kind: Kind, d1: int, d2: int, **roles) -> Unit:
    return replace(
        unit,
        base_path=base,
        kind=kind,
        d1=d1,
        d2=d2,
        cores=roles.get("cores", ()),
        twigs=roles.get("twigs", ()),
        leaves=roles.get("leaves", ()),
        nose=roles.get("nose"),
    )


def try_classify(g: Graph, unit: Unit) -> Unit:
    """Classify, or return the unit unclassified if it holds two P2's."""
    try:
        return classify_unit(g, unit)
    except TwoPathsError:
        base = unit.base_path
        if not (set(base) <= unit.members and is_p2(g, base)):
            base = find_p2(g, unit.members)  # type: ignore[assignment]
        return Unit(unit.members, base)


# -- partitions -----------------------------------------------------------

ROLE_CORE = "core"
ROLE_TWIG = "twig"
ROLE_LEAF = "leaf"
ROLE_NOSE = "nose"
ROLE_DEMOCRATIC = "democratic"
ROLE_NONE = "unclassified"


@dataclass
class UnitPartition:
    """A partition of ``host`` into units, one per packing path."""

    host: Graph
    units: list[Unit]
    owner: dict[int, int] = field(default_factory=dict)
    _roles: dict[int, str] = field(default_factory=dict)
    _twig_of: dict[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.owner:
            for i, u in enumerate(self.units):
                for v in u.members:
                    self.owner[v] = i
        for i in range(len(self.units)):
            self._index_roles(i)

    def _index_roles(self, i: int) -> None:
        u = self.units[i]
        for v in u.members:
            self._twig_of.pop(v, None)
            if u.kind is None:
                self._roles[v] = ROLE_NONE
            elif u.democratic:
                self._roles[v] = ROLE_NOSE if v == u.nose else ROLE_DEMOCRATIC
        for v in u.cores:
            self._roles[v] = ROLE_CORE
        for t in u.twigs:
            for v in t:
                self._roles[v] = ROLE_TWIG
                self._twig_of[v] = t
        for v in u.leaves:
            self._roles[v] = ROLE_LEAF

    def __len__(self) -> int:
        return len(self.units)

    def unit_of(self, v: int) -> int:
        return self.owner[v]

    def role(self, v: int) -> str:
        return self._roles[v]

    def twig_of(self, v: int) -> tuple[int, int]:
        return self._twig_of[v]

    def packing(self) -> P2Packing:
        return P2Packing(tuple(u.base_path for u in self.units))

    def all_classified(self) -> bool:
        return all(u.classified for u in self.units)

    def set_unit(self, i: int, unit: Unit) -> None:
        self.units[i] = unit
        for v in unit.members:
            self.owner[v] = i
        self._index_roles(i)

    def reclassify(self, i: int) -> None:
        self.set_unit(i, try_classify(self.host, self.units[i]))

    def move(self, vertices: Iterable[int], src: int, dst: int) -> None:
        """Move ``vertices`` from unit ``src`` to unit ``dst`` and reclassify both."""
        self.transfer([(vertices, src, dst)])

    def transfer(self, moves: Iterable[tuple[Iterable[int], int, int]]) -> list[int]:
        """Apply several moves, then reclassify every touched unit once."""
        touched: list[int] = []
        for vertices, src, dst in moves:
            vs = frozenset(vertices)
            if not vs <= self.units[src].members:
                raise InvariantViolation(f"{sorted(vs)} not inside unit {src}")
            a, b = self.units[src], self.units[dst]
            self.units[src] = replace(a, members=a.members - vs)
            self.units[dst] = replace(b, members=b.members | vs)
            for v in vs:
                self.owner[v] = dst
            touched += [i for i in (src, dst) if i not in touched]
        for i in touched:
            self.reclassify(i)
        return touched

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for u in self.units:
            out[u.label] = out.get(u.label, 0) + 1
        return out

    def check_partition(self) -> None:
        seen: set[int] = set()
        for u in self.units:
            if seen & u.members:
                raise InvariantViolation("units overlap")
            seen |= u.members
        if seen != set(self.host.vertices):
            raise InvariantViolation("units do not cover the graph")


def check_simple(up: UnitPartition) -> bool:
    """True iff every unit classifies into one of the defined types."""
    for u in up.units:
        try:
            classify_unit(up.host, u)
        except (NotSimpleError, TwoPathsError):
            return False
    return True


# -- construction ---------------------------------------------------------


@dataclass(frozen=True)
class B1:
    """The component/path-vertex bipartite graph and what its nodes mean."""

    graph: AuxBipartite
    components: tuple[tuple[int, ...], ...]
    slots: tuple[tuple[int, int], ...]  # (path vertex, copy 1 or 2)


def build_b1(g: Graph, p: P2Packing) -> B1:
    if not is_maximal(g, p):
        raise ValueError("packing is not maximal")
    covered = p.vertices
    comps = tuple(g.without(covered).components())
    slots = tuple((v, c) for path in p for v in path for c in (1, 2))
    slot_index = {s: i for i, s in enumerate(slots)}
    edges = []
    for li, comp in enumerate(comps):
        for v in sorted(g.neighborhood(comp)):
            edges.append((li, slot_index[(v, 1)]))
            edges.append((li, slot_index[(v, 2)]))
    left = [("component", c) for c in comps]
    right = [("vertex", v, c) for v, c in slots]
    return B1(AuxBipartite.build(left, right, edges), comps, slots)


def build_unit_partition(g: Graph, p: P2Packing, m: Matching, b1: B1 | None = None) -> UnitPartition:
    """Units from a matching of B1 that saturates its left side."""
    b1 = b1 or build_b1(g, p)
    if len(m) != len(b1.components) or not m.is_valid(b1.graph):
        raise ValueError("matching does not saturate the components of G - V(P)")
    extra: dict[int, set[int]] = {v: set() for path in p for v in path}
    for li, ri in m.pairs.items():
        v, _ = b1.slots[ri]
        extra[v].update(b1.components[li])
    units = []
    for path in p:
        members = frozenset(path).union(*(extra[v] for v in path))
        if len(members) > MAX_UNIT_SIZE:
            raise InvariantViolation(f"unit of {len(members)} vertices")
        units.append(try_classify(g, Unit(members, path)))
    return UnitPartition(g, units)
