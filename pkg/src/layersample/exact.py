"""Ground-truth decomposition computed from the whole graph.

Experiment drivers need exact layer sizes, exact periphery components and
exact reachability scores to report estimator errors and component-size
curves.  Everything here reads the raw :class:`Graph`; none of it is
billed, and none of it is available to algorithm code, which only ever
sees an :class:`AccessSession`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .graphs import Graph, QueryModel
from .layering import SecondHop


@dataclass
class TrueComponent:
    nodes: tuple[int, ...]
    direct: frozenset[int]      # component nodes with an L1 neighbor
    boundary: dict[int, int]    # L1 node -> edges into the component
    bridge_count: int

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass
class TruePeriphery:
    l0_set: set[int]
    l1_set: set[int]
    periphery: list[int]
    components: list[TrueComponent]
    node_component: dict[int, int]

    @property
    def l2plus_size(self) -> int:
        return len(self.periphery)

    def mu(self) -> float:
        """Node-weighted mean component size; 0 for an empty periphery."""
        total = sum(c.size for c in self.components)
        if total == 0:
            return 0.0
        return sum(c.size * c.size for c in self.components) / total


def decompose(graph: Graph, l0_nodes) -> TruePeriphery:
    """Exact layers and reduced-periphery components for a given base layer."""
    l0_set = set(int(v) for v in l0_nodes)
    l1_set: set[int] = set()
    for v in l0_set:
        for w in graph.neighbors(v).tolist():
            if w not in l0_set:
                l1_set.add(w)
    n = graph.node_count
    periphery = [v for v in range(n) if v not in l0_set and v not in l1_set]
    direct = set()
    for v in periphery:
        if any(w in l1_set for w in graph.neighbors(v).tolist()):
            direct.add(v)

    components: list[TrueComponent] = []
    node_component: dict[int, int] = {}
    seen: set[int] = set()
    for v in periphery:
        if v in seen:
            continue
        queue = deque([v])
        seen.add(v)
        nodes = []
        while queue:
            x = queue.popleft()
            nodes.append(x)
            x_direct = x in direct
            for w in graph.neighbors(x).tolist():
                if w in l0_set or w in l1_set or w in seen:
                    continue
                if x_direct and w in direct:
                    continue  # edge between two direct-periphery nodes is cut
                seen.add(w)
                queue.append(w)
        boundary: dict[int, int] = {}
        for x in nodes:
            for w in graph.neighbors(x).tolist():
                if w in l1_set:
                    boundary[w] = boundary.get(w, 0) + 1
        idx = len(components)
        components.append(TrueComponent(nodes=tuple(nodes),
                                        direct=frozenset(
                                            x for x in nodes if x in direct),
                                        boundary=boundary,
                                        bridge_count=sum(boundary.values())))
        for x in nodes:
            node_component[x] = idx
    return TruePeriphery(l0_set=l0_set, l1_set=l1_set, periphery=periphery,
                         components=components, node_component=node_component)


def reachability_scores(graph: Graph, tp: TruePeriphery, model: QueryModel, *,
                        second_hop: SecondHop = SecondHop.L2_ONLY) -> list[Fraction]:
    """Exact component-level reachability scores under the given model."""
    scores = []
    for comp in tp.components:
        rs = Fraction(0)
        if model is QueryModel.DEGREE_REVEALING:
            rs = Fraction(comp.bridge_count)
        else:
            for u, entering in comp.boundary.items():
                d_l0 = sum(1 for w in graph.neighbors(u).tolist()
                           if w in tp.l0_set)
                if second_hop is SecondHop.L2_ONLY:
                    denom = sum(1 for w in graph.neighbors(u).tolist()
                                if w not in tp.l0_set and w not in tp.l1_set)
                else:
                    denom = graph.degree(u) - d_l0
                rs += Fraction(d_l0 * entering, denom)
        scores.append(rs)
    return scores


def reach_denominator(graph: Graph, tp: TruePeriphery,
                      model: QueryModel) -> int:
    """Normalizer of per-attempt hit probabilities: L0-L1 edges, or the
    total non-L0 degree of L1 under the degree-revealing model."""
    if model is QueryModel.DEGREE_REVEALING:
        return sum(graph.degree(u)
                   - sum(1 for w in graph.neighbors(u).tolist() if w in tp.l0_set)
                   for u in tp.l1_set)
    return sum(sum(1 for w in graph.neighbors(u).tolist() if w in tp.l0_set)
               for u in tp.l1_set)


def degree_averages(graph: Graph, tp: TruePeriphery) -> tuple[Fraction, Fraction]:
    """Exact forward and backward average degrees across the L1/periphery cut."""
    forward = sum(
        sum(1 for w in graph.neighbors(u).tolist()
            if w not in tp.l0_set and w not in tp.l1_set)
        for u in tp.l1_set)
    backward = sum(
        sum(1 for w in graph.neighbors(v).tolist() if w in tp.l1_set)
        for v in tp.periphery)
    d1 = Fraction(forward, len(tp.l1_set)) if tp.l1_set else Fraction(0)
    d2 = Fraction(backward, len(tp.periphery)) if tp.periphery else Fraction(0)
    return d1, d2
