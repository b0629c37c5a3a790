"""The kernelization driver and solution lifting.

The driver is a loop over explicit phases. Reductions shrink the graph
and restart at the budget check; exchange rules that find a larger
packing restart at the packing step; rules that only move vertices
between units return to the exchange phase.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field

from .errors import InvariantViolation
from .graph import Graph
from .matching import Saturating, saturate_or_violate
from .packing import P2Packing, Path, extend_to_maximal, greedy_maximal_packing, packing_violation
from .reduce import (
    TraceEntry,
    find_reducible_from_b1,
    find_reducible_leaves,
    find_reducible_twigs,
    rule_r1_small_components,
    rule_r2_apply,
    rule_r3_net_crown,
)
from .rules import (
    build_b4,
    leaf_donor,
    twig_donor,
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
from .units import UnitPartition, build_b1, build_unit_partition

log = logging.getLogger(__name__)

TRIVIAL_YES = "TrivialYes"
TRIVIAL_NO = "TrivialNo"
KERNEL = "Kernel"

ROUND_FACTOR = 100


class Phase(enum.Enum):
    BUDGET = "budget"
    SMALL = "small-components"
    PACKING = "packing"
    UNITS = "units"
    EXCHANGE = "exchange"
    CONSOLIDATE = "consolidate"
    TWIGS = "twigs"
    LEAVES = "leaves"
    FINAL = "final"
    DONE = "done"


@dataclass(frozen=True)
class Potential:
    """Unit counts that the migration rounds push upward."""

    s_net: int
    s_democratic: int
    s: int

    @property
    def combined(self) -> int:
        return self.s_net + self.s_democratic


def potential_snapshot(up: UnitPartition) -> Potential:
    s_net = s_dem = s_1x = s_x1 = s_x2 = s_twig = s_00 = 0
    for u in up.units:
        if u.democratic:
            s_dem += 1
            s_net += u.label == "net"
            continue
        if u.kind is None:
            continue
        s_twig += u.d1
        s_1x += u.d1 >= 1
        s_x1 += u.d2 >= 1
        s_x2 += u.d2 >= 2
        s_00 += u.label == "(0,0)"
    return Potential(s_net, s_dem, s_1x + s_x1 + s_x2 + 7 * (s_twig - s_00))


@dataclass
class Stats:
    loops: int = 0
    rounds: int = 0
    max_rounds_in_loop: int = 0
    firings: Counter = field(default_factory=Counter)
    reductions: int = 0
    potentials: list[tuple[Potential, Potential]] = field(default_factory=list)
    combined_increases: int = 0
    built_labels: Counter = field(default_factory=Counter)


@dataclass
class KernelResult:
    kind: str
    graph: Graph
    k: int
    trace: list[TraceEntry]
    original_k: int
    witness: P2Packing | None = None
    stats: Stats = field(default_factory=Stats)

    @property
    def reached_k(self) -> int:
        """Budget left when the driver stopped."""
        return self.k

    def trace_lines(self) -> list[str]:
        import json

        lines = [e.to_json() for e in self.trace]
        meta = {
            "kind": self.kind,
            "k": self.k,
            "original_k": self.original_k,
            "vertices": list(self.graph.vertices),
        }
        lines.append(json.dumps({"kernel": meta}))
        return lines


class _Driver:
    def __init__(self, g: Graph, k: int):
        self.g = g
        self.k = k
        self.k0 = k
        self.trace: list[TraceEntry] = []
        self.stats = Stats()
        self.packing = P2Packing()
        self.up: UnitPartition | None = None
        self.pending: Potential | None = None
        self.loop_rounds = 0

    # -- helpers ------------------------------------------------------

    def _result(self, kind: str, witness: P2Packing | None = None) -> KernelResult:
        return KernelResult(kind, self.g, self.k, self.trace, self.k0, witness, self.stats)

    def _reduce(self, g: Graph, k: int, entry: TraceEntry) -> Phase:
        self.g, self.k = g, k
        self.trace.append(entry)
        self.stats.reductions += 1
        self.stats.firings[entry.rule + (":" + entry.via if entry.via else "")] += 1
        self.pending = None
        self.up = None
        return Phase.BUDGET

    def _larger(self, packing: P2Packing, rule: str) -> Phase:
        self.stats.firings[rule] += 1
        self.packing = extend_to_maximal(self.g, packing.paths)
        self.pending = None
        self.up = None
        return Phase.PACKING

    def _close_round(self) -> None:
        if self.pending is None:
            return
        before, after = self.pending, potential_snapshot(self.up)  # type: ignore[arg-type]
        self.pending = None
        self.stats.potentials.append((before, after))
        if after.combined > before.combined:
            self.stats.combined_increases += 1
        if not (after.s_net > before.s_net or after.s_democratic > before.s_democratic or after.s > before.s):
            raise InvariantViolation(f"migration round did not raise the potential: {before} -> {after}")

    def _open_round(self, before: Potential) -> None:
        self.pending = before
        self.loop_rounds += 1
        self.stats.rounds += 1
        self.stats.max_rounds_in_loop = max(self.stats.max_rounds_in_loop, self.loop_rounds)
        if self.loop_rounds > ROUND_FACTOR * max(self.k, 1):
            raise InvariantViolation(f"more than {ROUND_FACTOR}k migration rounds in one loop")

    # -- phases -------------------------------------------------------

    def run(self) -> KernelResult:
        phase = Phase.BUDGET
        while True:
            log.debug("phase %s n=%d k=%d", phase.value, len(self.g), self.k)
            if phase is Phase.BUDGET:
                if self.k <= 0:
                    return self._result(TRIVIAL_YES, P2Packing())
                if len(self.g) <= 5 * self.k:
                    return self._result(KERNEL)
                phase = Phase.SMALL
            elif phase is Phase.SMALL:
                g, k, entries = rule_r1_small_components(self.g, self.k)
                if entries:
                    self.g, self.k = g, k
                    self.trace += entries
                    self.stats.reductions += len(entries)
                    self.stats.firings["R1"] += len(entries)
                    if self.k <= 0 or len(self.g) <= 5 * self.k:
                        phase = Phase.BUDGET
                        continue
                self.packing = greedy_maximal_packing(self.g)
                phase = Phase.PACKING
            elif phase is Phase.PACKING:
                why = packing_violation(self.g, self.packing)
                if why is not None:
                    raise InvariantViolation(f"packing broke: {why}")
                if len(self.packing) >= self.k:
                    return self._result(TRIVIAL_YES, self.packing)
                phase = Phase.UNITS
            elif phase is Phase.UNITS:
                b1 = build_b1(self.g, self.packing)
                sv = saturate_or_violate(b1.graph)
                if not isinstance(sv, Saturating):
                    rs = find_reducible_from_b1(b1, sv)
                    phase = self._reduce(*rule_r2_apply(self.g, self.k, rs, "components"))
                    continue
                self.up = build_unit_partition(self.g, self.packing, sv.matching, b1)
                self.stats.built_labels.update(u.label for u in self.up.units)
                self.stats.loops += 1
                self.loop_rounds = 0
                phase = Phase.EXCHANGE
            elif phase is Phase.EXCHANGE:
                up = self.up
                assert up is not None
                out = rule1_split(self.g, up)
                if out is None:
                    if not up.all_classified():
                        raise InvariantViolation("unit left unclassified without two disjoint P2's")
                    out = rule2_cross_unit(self.g, up)
                if out is not None:
                    phase = self._larger(out.packing, out.rule)
                    continue
                phase = Phase.CONSOLIDATE
            elif phase is Phase.CONSOLIDATE:
                up = self.up
                assert up is not None
                check_consolidated(self.g, up)
                m = rule3_nose_leaf(self.g, up) or rule4_leaf_leaf(self.g, up)
                if m is not None:
                    self.stats.firings[m.rule] += 1
                    phase = Phase.EXCHANGE
                    continue
                phase = Phase.TWIGS
            elif phase is Phase.TWIGS:
                up = self.up
                assert up is not None
                check_reduced(self.g, up)
                self._close_round()
                if any(twig_donor(u) for u in up.units):
                    before = potential_snapshot(up)
                    m = rule5_twig_migrate(self.g, up)
                    if m is not None:
                        self.stats.firings[m.rule] += 1
                        self._open_round(before)
                        phase = Phase.EXCHANGE
                        continue
                    rs = find_reducible_twigs(up)
                    phase = self._reduce(*rule_r2_apply(self.g, self.k, rs, "twigs"))
                    continue
                phase = Phase.LEAVES
            elif phase is Phase.LEAVES:
                up = self.up
                assert up is not None
                if any(leaf_donor(u) for u in up.units):
                    before = potential_snapshot(up)
                    m = rule6_leaf_migrate(self.g, up)
                    if m is not None:
                        self.stats.firings[m.rule] += 1
                        self._open_round(before)
                        phase = Phase.EXCHANGE
                        continue
                    rs = find_reducible_leaves(up)
                    phase = self._reduce(*rule_r2_apply(self.g, self.k, rs, "leaves"))
                    continue
                phase = Phase.FINAL
            elif phase is Phase.FINAL:
                up = self.up
                assert up is not None
                if rule7_triggered(up):
                    b4 = build_b4(up)
                    sv = saturate_or_violate(b4.graph)
                    if isinstance(sv, Saturating):
                        out = rule7_final(self.g, up, b4, sv.matching)
                        phase = self._larger(out.packing, out.rule)
                    else:
                        phase = self._reduce(*rule_r3_net_crown(self.g, self.k, up, b4, sv))
                    continue
                phase = Phase.DONE
            else:
                return self._finish()

    def _finish(self) -> KernelResult:
        up = self.up
        assert up is not None
        n = len(self.g)
        c = up.counts()
        # vertex count by unit type against the packing size
        total = sum(len(u) for u in up.units)
        if total != n:
            raise InvariantViolation("units do not cover the graph at termination")
        bound = 5 * len(up.units)
        if n > bound:
            raise InvariantViolation(f"terminal partition has {n} vertices for {len(up.units)} units: {c}")
        if n > 5 * self.k:
            return self._result(TRIVIAL_NO)
        return self._result(KERNEL)


def kernelize(g: Graph, k: int) -> KernelResult:
    """Reduce ``(g, k)`` to an equivalent instance on at most ``5k'`` vertices,
    or decide it outright."""
    return _Driver(g, k).run()


def lift_solution(trace: list[TraceEntry], kernel_packing: P2Packing, k: int, graph: Graph | None = None) -> P2Packing:
    """Combine a packing of the reduced instance with every harvested path.

    The result is a P2-packing of the input graph; when ``graph`` is given
    it is verified there and must reach size ``k``.
    """
    paths: list[Path] = list(kernel_packing.paths)
    for e in trace:
        paths += list(e.harvested_paths)
    out = P2Packing(tuple(paths))
    if graph is not None:
        why = packing_violation(graph, out)
        if why is not None:
            raise InvariantViolation(f"lifted packing is invalid: {why}")
        if len(out) < k:
            raise InvariantViolation(f"lifted packing has {len(out)} paths, needed {k}")
    return out
