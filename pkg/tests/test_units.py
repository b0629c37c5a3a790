import itertools
import random

import pytest
from conftest import GADGET_BASE_PATHS, NET
from unit_shapes import ROWS, row_graphs

from p2kernel.errors import NotSimpleError, TwoPathsError
from p2kernel.graph import Graph
from p2kernel.matching import Matching, saturate_or_violate, Saturating
from p2kernel.packing import P2Packing, greedy_maximal_packing
from p2kernel.units import (
    ROLE_CORE,
    ROLE_LEAF,
    ROLE_NOSE,
    Kind,
    Unit,
    UnitPartition,
    build_b1,
    build_unit_partition,
    check_simple,
    classify_unit,
    try_classify,
)


def classify(edges, base=(0, 1, 2), n=None):
    g = Graph.from_edges(edges, range(n or 0))
    return classify_unit(g, Unit(frozenset(g.vertices), base))


def placed_partition(g, placements):
    """Partition of a gadget graph with components placed by hand."""
    p = P2Packing(GADGET_BASE_PATHS)
    b1 = build_b1(g, p)
    pairs = {}
    for comp, slot in placements.items():
        pairs[b1.components.index(comp)] = b1.slots.index(slot)
    return build_unit_partition(g, p, Matching(pairs), b1)


def test_gadget_a_units(gadget_a):
    left = classify_unit(gadget_a, Unit(frozenset({0, 1, 2, 3, 4}), (0, 1, 2)))
    right = classify_unit(gadget_a, Unit(frozenset({5, 6, 7, 8, 9}), (5, 6, 7)))
    assert left.kind is Kind.C5
    assert right.label == "(0,4)" and right.cores == (6,)
    assert set(right.leaves) == {5, 7, 8, 9}


def test_gadget_a_placed_partition(gadget_a):
    up = placed_partition(gadget_a, {(3, 4): (0, 1), (8,): (6, 1), (9,): (6, 2)})
    assert [sorted(u.members) for u in up.units] == [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]
    assert [u.label for u in up.units] == ["C5", "(0,4)"]
    up.check_partition()
    assert up.role(6) == ROLE_CORE and up.role(8) == ROLE_LEAF


def test_democratic_kinds():
    assert classify(NET).kind is Kind.NET
    pend = classify([(0, 1), (1, 2), (2, 3), (3, 4), (4, 1)])
    assert pend.kind is Kind.PENDANT
    bull = classify([(0, 1), (0, 2), (1, 2), (1, 3), (2, 4)], base=(3, 1, 0))
    assert bull.kind is Kind.BULL and bull.nose == 0
    up = UnitPartition(Graph.from_edges([(0, 1), (0, 2), (1, 2), (1, 3), (2, 4)]), [bull])
    assert up.role(0) == ROLE_NOSE


def test_pendant_may_have_extra_edges():
    # a C4 with a pendant plus a chord is still a pendant unit
    u = classify([(0, 1), (1, 2), (2, 3), (3, 4), (4, 1), (1, 3)])
    assert u.kind is Kind.PENDANT


def test_small_units():
    assert classify([(0, 1), (1, 2)]).label == "(0,0)"
    star = classify([(1, 0), (1, 2), (1, 3)])
    assert star.label == "(0,3)" and star.cores == (1,)
    p4 = classify([(0, 1), (1, 2), (2, 3)])
    assert p4.label == "(0,1)" and len(p4.cores) == 3 and len(p4.leaves) == 1
    paw = classify([(0, 1), (1, 2), (0, 2), (2, 3)])
    assert paw.label == "(0,1)"


def test_despotic_core_choice_prefers_twigs():
    # star centre 0 with twig 1-2 and leaves 3, 4
    u = classify([(0, 1), (1, 2), (0, 3), (0, 4)], base=(1, 0, 3))
    assert u.label == "(1,2)" and u.cores == (0,)
    assert u.twigs == ((1, 2),)


def test_two_paths_rejected():
    with pytest.raises(TwoPathsError):
        classify([(i, i + 1) for i in range(5)])
    u = try_classify(Graph.from_edges([(i, i + 1) for i in range(5)]), Unit(frozenset(range(6)), (0, 1, 2)))
    assert u.kind is None


def test_not_simple_rejected():
    # K_{1,6}: a (0,6) configuration is not a defined type
    with pytest.raises(NotSimpleError):
        classify([(0, i) for i in range(1, 7)], base=(1, 0, 2))


def test_check_simple():
    g = Graph.from_edges([(0, 1), (1, 2), (3, 4), (4, 5)])
    up = UnitPartition(g, [try_classify(g, Unit(frozenset({0, 1, 2}), (0, 1, 2))), try_classify(g, Unit(frozenset({3, 4, 5}), (3, 4, 5)))])
    assert check_simple(up)
    star = Graph.from_edges([(0, i) for i in range(1, 7)])
    bad = UnitPartition(star, [Unit(frozenset(star.vertices), (1, 0, 2))])
    assert not check_simple(bad)


def test_build_b1_basic():
    g = Graph.from_edges([(0, 1), (1, 2), (1, 3)])
    b1 = build_b1(g, P2Packing(((0, 1, 2),)))
    assert b1.components == ((3,),)
    assert [b1.graph.right[r] for r in b1.graph.adj[0]] == [("vertex", 1, 1), ("vertex", 1, 2)]
    bare = build_b1(Graph.from_edges([(0, 1), (1, 2)]), P2Packing(((0, 1, 2),)))
    assert bare.graph.left == []


def test_build_b1_requires_maximal():
    with pytest.raises(ValueError):
        build_b1(Graph.from_edges([(0, 1), (1, 2)]), P2Packing())


@pytest.mark.parametrize("seed", range(25))
def test_b1_edges_and_partition(seed):
    rng = random.Random(seed)
    n = rng.randint(8, 25)
    g = Graph.from_edges([(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.12], range(n))
    p = greedy_maximal_packing(g)
    b1 = build_b1(g, p)
    for li, comp in enumerate(b1.components):
        touched = {b1.slots[r][0] for r in b1.graph.adj[li]}
        assert touched == {v for x in comp for v in g.adj(x)} - set(comp)
    sv = saturate_or_violate(b1.graph)
    if isinstance(sv, Saturating):
        up = build_unit_partition(g, p, sv.matching, b1)
        up.check_partition()
        assert len(up) == len(p)


def test_bare_paths_give_small_units():
    g = Graph.from_edges([(0, 1), (1, 2), (3, 4), (4, 5)])
    p = P2Packing(((0, 1, 2), (3, 4, 5)))
    up = build_unit_partition(g, p, Matching({}))
    assert [u.label for u in up.units] == ["(0,0)", "(0,0)"]


def test_transfer_reclassifies():
    g = Graph.from_edges([(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (5, 6)])
    units = [try_classify(g, Unit(frozenset({0, 1, 2, 3}), (0, 1, 2))), try_classify(g, Unit(frozenset({4, 5, 6}), (4, 5, 6)))]
    up = UnitPartition(g, units)
    assert [u.label for u in up.units] == ["(0,3)", "(0,0)"]
    up.move([3], 0, 1)
    assert up.unit_of(3) == 1
    assert up.units[0].label == "(0,0)"
    assert up.units[1].label == "(0,1)"


@pytest.mark.parametrize("row", range(1, len(ROWS) + 1))
def test_shape_row_classification(row):
    comps, labels = ROWS[row - 1]
    graphs = row_graphs(comps)
    assert graphs, "the bare configuration always holds at most one P2"
    for g in graphs:
        u = classify_unit(g, Unit(frozenset(g.vertices), (0, 1, 2)))
        assert u.label in labels, (row, g.edges(), u.label)
        assert u.label != "(1,4)"


def test_every_shape_row_label_occurs():
    for comps, labels in ROWS:
        seen = {classify_unit(g, Unit(frozenset(g.vertices), (0, 1, 2))).label for g in row_graphs(comps)}
        assert seen == labels


def test_democratic_kind_independent_of_labels():
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
    for perm in itertools.permutations(range(5)):
        relabelled = [(perm[a], perm[b]) for a, b in edges]
        assert classify(relabelled, base=(perm[0], perm[1], perm[2])).kind is Kind.C5
