import random
from itertools import combinations

import pytest
from conftest import gadget_partition

from p2kernel.errors import InvariantViolation
from p2kernel.graph import Graph
from p2kernel.matching import Saturating, saturate_or_violate
from p2kernel.packing import exact_opt, verify_packing
from p2kernel.rules import (
    LargerPacking,
    Mutated,
    alternating_search,
    build_b2,
    build_b3,
    build_b4,
    check_consolidated,
    check_reduced,
    rule1_split,
    rule2_cross_unit,
    rule3_nose_leaf,
    rule4_leaf_leaf,
    rule5_twig_migrate,
    rule6_leaf_migrate,
    rule7_final,
    rule7_triggered,
)
from p2kernel.units import Unit, UnitPartition, classify_unit, try_classify


def partition(edges, groups, n=None):
    """Partition with one unit per (members, base path) group."""
    g = Graph.from_edges(edges, range(n or 1 + max(max(e) for e in edges)))
    units = [try_classify(g, Unit(frozenset(m), base)) for m, base in groups]
    up = UnitPartition(g, units)
    up.check_partition()
    return g, up


def despotic(core, twigs=(), leaves=()):
    """Edges of a despotic shape around ``core``."""
    edges = []
    for a, b in twigs:
        edges += [(core, a), (a, b)]
    edges += [(core, x) for x in leaves]
    return edges


# -- rule 1 ------------------------------------------------------------------


def test_rule1_bare_path():
    g, up = partition([(0, 1), (1, 2)], [({0, 1, 2}, (0, 1, 2))])
    assert rule1_split(g, up) is None


def test_rule1_p6():
    g, up = partition([(i, i + 1) for i in range(5)], [(set(range(6)), (0, 1, 2))])
    out = rule1_split(g, up)
    assert isinstance(out, LargerPacking) and len(out.packing) == 2
    assert verify_packing(g, out.packing)


@pytest.mark.parametrize("seed", range(30))
def test_rule1_agrees_with_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 15)
    edges = [(i, rng.randrange(i)) for i in range(1, n)]
    edges += [tuple(sorted(rng.sample(range(n), 2))) for _ in range(rng.randint(0, 4))]
    g = Graph.from_edges(set(edges), range(n))
    base = next((a, v, b) for v in g.vertices for a, b in combinations(g.neighbors(v), 2))
    up = UnitPartition(g, [Unit(frozenset(g.vertices), base)])
    assert (rule1_split(g, up) is not None) == (exact_opt(g)[0] >= 2)


# -- rule 2 ------------------------------------------------------------------


def test_rule2_gadget_a(gadget_a):
    up = gadget_partition(gadget_a)
    out = rule2_cross_unit(gadget_a, up)
    assert isinstance(out, LargerPacking)
    assert len(out.packing) == 3 and verify_packing(gadget_a, out.packing)


def test_gadget_b_no_larger_packing(gadget_b):
    up = gadget_partition(gadget_b)
    assert [u.label for u in up.units] == ["C5", "(0,4)"]
    assert rule1_split(gadget_b, up) is None
    assert rule2_cross_unit(gadget_b, up) is None
    assert rule3_nose_leaf(gadget_b, up) is None
    assert rule4_leaf_leaf(gadget_b, up) is None
    assert not rule7_triggered(up)


def test_rule2_three_leaf_units():
    # three (0,4)-units; leaves 1-6 and 6-11 join them in a row
    edges = despotic(0, leaves=(1, 2, 3, 4)) + despotic(5, leaves=(6, 7, 8, 9)) + despotic(10, leaves=(11, 12, 13, 14))
    edges += [(1, 6), (6, 11)]
    g, up = partition(edges, [({0, 1, 2, 3, 4}, (1, 0, 2)), ({5, 6, 7, 8, 9}, (6, 5, 7)), ({10, 11, 12, 13, 14}, (11, 10, 12))])
    assert [u.label for u in up.units] == ["(0,4)"] * 3
    out = rule2_cross_unit(g, up)
    assert isinstance(out, LargerPacking) and len(out.packing) == 4
    assert verify_packing(g, out.packing)
    assert exact_opt(g)[0] >= 4


def test_rule2_twig_to_leaf():
    # (1,2) twig end 2 sees a leaf of a (0,4)
    edges = despotic(0, twigs=[(1, 2)], leaves=(3, 4)) + despotic(5, leaves=(6, 7, 8, 9)) + [(2, 6)]
    g, up = partition(edges, [({0, 1, 2, 3, 4}, (1, 0, 3)), ({5, 6, 7, 8, 9}, (6, 5, 7))])
    out = rule2_cross_unit(g, up)
    assert isinstance(out, LargerPacking) and len(out.packing) == 3


# -- rules 3 and 4 ---------------------------------------------------------


BULL5 = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 4)]


def test_rule3_bull_becomes_net():
    edges = BULL5 + despotic(5, leaves=(6, 7, 8)) + [(0, 6)]
    g, up = partition(edges, [(range(5), (3, 1, 0)), ({5, 6, 7, 8}, (6, 5, 7))])
    assert [u.label for u in up.units] == ["bull", "(0,3)"]
    out = rule3_nose_leaf(g, up)
    assert isinstance(out, Mutated)
    assert [u.label for u in up.units] == ["net", "(0,0)"]


def test_rule3_not_applicable():
    edges = BULL5 + despotic(5, leaves=(6, 7, 8)) + [(1, 5)]
    g, up = partition(edges, [(range(5), (3, 1, 0)), ({5, 6, 7, 8}, (6, 5, 7))])
    assert rule3_nose_leaf(g, up) is None


def test_rule3_donor_12_becomes_small():
    edges = BULL5 + despotic(5, twigs=[(6, 7)], leaves=(8, 9)) + [(0, 8)]
    g, up = partition(edges, [(range(5), (3, 1, 0)), ({5, 6, 7, 8, 9}, (6, 5, 9))])
    assert up.units[1].label == "(1,2)"
    rule3_nose_leaf(g, up)
    assert up.units[0].label == "net"
    assert up.units[1].label == "(0,1)"


def test_rule4_two_12_units():
    edges = despotic(0, twigs=[(1, 2)], leaves=(3, 4)) + despotic(5, twigs=[(6, 7)], leaves=(8, 9)) + [(3, 8)]
    g, up = partition(edges, [({0, 1, 2, 3, 4}, (1, 0, 4)), ({5, 6, 7, 8, 9}, (6, 5, 9))])
    out = rule4_leaf_leaf(g, up)
    assert isinstance(out, Mutated)
    assert up.unit_of(3) == 1
    assert up.units[1].label == "(2,1)"
    assert up.units[0].label == "(0,1)"
    for u in up.units:
        assert exact_opt(g.induced(u.members))[0] == 1


def test_rule4_larger_receiver_when_smaller_first():
    # |U1| = 4 < |U2| = 5: u2 moves into U1
    edges = despotic(0, leaves=(1, 2, 3)) + despotic(4, twigs=[(5, 6)], leaves=(7, 8)) + [(1, 7)]
    g, up = partition(edges, [({0, 1, 2, 3}, (1, 0, 2)), ({4, 5, 6, 7, 8}, (5, 4, 8))])
    rule4_leaf_leaf(g, up)
    assert up.unit_of(7) == 0


def test_rule4_two_14_units_is_a_bug():
    edges = despotic(0, twigs=[(1, 2)], leaves=(3, 4, 5, 6)) + despotic(7, twigs=[(8, 9)], leaves=(10, 11, 12, 13))
    edges += [(3, 10)]
    g, up = partition(edges, [(set(range(7)), (1, 0, 3)), (set(range(7, 14)), (8, 7, 10))])
    assert [u.label for u in up.units] == ["(1,4)", "(1,4)"]
    with pytest.raises(InvariantViolation):
        rule4_leaf_leaf(g, up)


def test_rule4_small01_receiver_outcomes():
    allowed = {"pendant", "C5", "bull", "(2,0)"}
    pairs = list(combinations(range(4), 2))
    for r in range(3, 7):
        for es in combinations(pairs, r):
            g = Graph.from_edges(es, range(4))
            if len(g.components()) != 1:
                continue
            u = classify_unit(g, Unit(frozenset(range(4)), (0, 0, 0)))
            if u.label != "(0,1)":
                continue
            for k in range(4):
                for extra in combinations(u.cores, k):
                    h = Graph.from_edges(list(es) + [(u.leaves[0], 4)] + [(c, 4) for c in extra], range(5))
                    w = try_classify(h, Unit(frozenset(range(5)), u.base_path))
                    assert w.label in allowed


# -- rules 5 and 6 ---------------------------------------------------------


def test_b2_empty_without_twigs():
    g, up = partition(despotic(0, leaves=(1, 2, 3)), [({0, 1, 2, 3}, (1, 0, 2))])
    assert build_b2(up).right == []


def test_b2_twigs_see_their_core():
    edges = despotic(0, twigs=[(1, 2), (3, 4)], leaves=(5,)) + despotic(6, twigs=[(7, 8)], leaves=(9, 10))
    g, up = partition(edges + [(0, 6)], [(set(range(6)), (1, 0, 3)), (set(range(6, 11)), (7, 6, 9))])
    b = build_b2(up)
    for ri, (_, twig, unit) in enumerate(b.right):
        cores = {b.left[l][1] for l in range(len(b.left)) if ri in b.adj[l]}
        assert set(up.units[unit].cores) <= cores


def test_rule5_single_hop():
    edges = despotic(0, twigs=[(1, 2), (3, 4), (5, 6), (7, 8)]) + [(9, 10), (10, 11), (2, 10)]
    g, up = partition(edges, [(set(range(9)), (1, 0, 3)), ({9, 10, 11}, (9, 10, 11))])
    assert [u.label for u in up.units] == ["(4,0)", "(0,0)"]
    out = rule5_twig_migrate(g, up)
    assert isinstance(out, Mutated)
    assert [u.label for u in up.units] == ["(3,0)", "(1,2)"]


def test_rule5_chain_of_three():
    # (3,1) donor -> (1,2) -> (0,3) terminal
    u1 = despotic(0, twigs=[(1, 2), (3, 4), (5, 6)], leaves=(7,))
    u2 = despotic(8, twigs=[(9, 10)], leaves=(11, 12))
    u3 = despotic(13, leaves=(14, 15, 16))
    edges = u1 + u2 + u3 + [(2, 8), (10, 13)]
    g, up = partition(
        edges, [(set(range(8)), (1, 0, 3)), (set(range(8, 13)), (9, 8, 11)), (set(range(13, 17)), (14, 13, 15))]
    )
    assert [u.label for u in up.units] == ["(3,1)", "(1,2)", "(0,3)"]
    out = rule5_twig_migrate(g, up)
    assert out.touched == (0, 1, 2)
    assert [u.label for u in up.units] == ["(2,1)", "(1,2)", "(1,3)"]


def test_alternating_search_picks_shortest():
    u1 = despotic(0, twigs=[(1, 2), (3, 4), (5, 6)])
    u2 = despotic(7, twigs=[(8, 9)], leaves=(10, 11))
    u3 = [(12, 13), (13, 14)]
    edges = u1 + u2 + u3 + [(2, 7), (9, 13), (4, 12)]
    g, up = partition(edges, [(set(range(7)), (1, 0, 3)), (set(range(7, 12)), (8, 7, 10)), ({12, 13, 14}, (12, 13, 14))])
    path, reached = alternating_search(build_b2(up), [0], lambda w: up.units[w].d1 == 0)
    assert path.units == (0, 2)
    assert reached == {0, 1, 2}


def test_rule6_leaf_to_20():
    edges = despotic(0, leaves=(1, 2, 3, 4)) + despotic(5, twigs=[(6, 7), (8, 9)]) + [(1, 5)]
    g, up = partition(edges, [({0, 1, 2, 3, 4}, (2, 0, 3)), (set(range(5, 10)), (6, 5, 8))])
    out = rule6_leaf_migrate(g, up)
    assert isinstance(out, Mutated)
    assert [u.label for u in up.units] == ["(0,3)", "(2,1)"]


def test_rule6_small00_terminal():
    for cores in [(6,), (5,), (5, 6), (5, 6, 7)]:
        edges = despotic(0, leaves=(1, 2, 3, 4)) + [(5, 6), (6, 7)] + [(1, c) for c in cores]
        g, up = partition(edges, [({0, 1, 2, 3, 4}, (2, 0, 3)), ({5, 6, 7}, (5, 6, 7))])
        rule6_leaf_migrate(g, up)
        assert up.units[1].label in {"(0,3)", "(0,1)"}


def test_rule6_no_donor():
    g, up = partition([(0, 1), (1, 2)], [({0, 1, 2}, (0, 1, 2))])
    assert rule6_leaf_migrate(g, up) is None


def test_rule6_rejects_twig_heavy_units():
    g, up = partition(despotic(0, twigs=[(1, 2), (3, 4), (5, 6)]), [(set(range(7)), (1, 0, 3))])
    with pytest.raises(InvariantViolation):
        rule6_leaf_migrate(g, up)


def test_b3_items_are_leaves():
    edges = despotic(0, leaves=(1, 2, 3, 4)) + despotic(5, twigs=[(6, 7), (8, 9)]) + [(1, 5)]
    g, up = partition(edges, [({0, 1, 2, 3, 4}, (2, 0, 3)), (set(range(5, 10)), (6, 5, 8))])
    b = build_b3(up)
    assert sorted(tag[1] for tag in b.right) == [1, 2, 3, 4]


# -- rule 7 ------------------------------------------------------------------

NET6 = [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]


def shift(edges, d):
    return [(a + d, b + d) for a, b in edges]


def test_b4_empty():
    g, up = partition([(0, 1), (1, 2)], [({0, 1, 2}, (0, 1, 2))])
    assert build_b4(up).lefts == ()


def test_b4_single_net():
    edges = NET6 + [(6, 7), (7, 8), (3, 7)]
    g, up = partition(edges, [(range(6), (1, 0, 2)), ({6, 7, 8}, (6, 7, 8))])
    b4 = build_b4(up)
    assert b4.lefts == (("net", 0),)
    assert [b4.rights[r] for r in b4.graph.adj[0]] == [7]


def test_rule7_two_nets_one_small():
    edges = NET6 + shift(NET6, 6) + [(12, 13), (13, 14), (3, 12), (9, 14)]
    g, up = partition(edges, [(range(6), (1, 0, 2)), (range(6, 12), (7, 6, 8)), ({12, 13, 14}, (12, 13, 14))])
    assert [u.label for u in up.units] == ["net", "net", "(0,0)"]
    assert rule7_triggered(up)
    b4 = build_b4(up)
    sv = saturate_or_violate(b4.graph)
    assert isinstance(sv, Saturating)
    out = rule7_final(g, up, b4, sv.matching)
    assert len(out.packing) >= 4 and verify_packing(g, out.packing)


def test_rule7_net_plus_core_holds_two_paths():
    g = Graph.from_edges(NET6 + [(3, 6)])
    assert exact_opt(g)[0] == 2


def test_rule7_not_triggered_when_small_units_dominate():
    edges = NET6 + [(6, 7), (7, 8), (9, 10), (10, 11), (3, 7)]
    g, up = partition(edges, [(range(6), (1, 0, 2)), ({6, 7, 8}, (6, 7, 8)), ({9, 10, 11}, (9, 10, 11))])
    assert not rule7_triggered(up)


# -- sanity checks -----------------------------------------------------------


def test_check_consolidated_flags_gadget_a(gadget_a):
    with pytest.raises(InvariantViolation):
        check_consolidated(gadget_a, gadget_partition(gadget_a))


def test_check_reduced_flags_leaf_edges():
    edges = despotic(0, leaves=(1, 2, 3)) + despotic(4, leaves=(5, 6, 7)) + [(1, 5)]
    g, up = partition(edges, [({0, 1, 2, 3}, (1, 0, 2)), ({4, 5, 6, 7}, (5, 4, 6))])
    with pytest.raises(InvariantViolation):
        check_reduced(g, up)
