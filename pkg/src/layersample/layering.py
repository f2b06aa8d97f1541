"""Structural decomposition: base layer, neighbor layer, periphery components.

The base layer ``L0`` is grown greedily through the query oracle, one node
per query.  Its neighbors form ``L1``; everything else is the periphery.
Periphery exploration works on the reduced periphery graph whose edges
exclude pairs of nodes that both touch ``L1`` directly, which is what keeps
the explored components small.

Two greedy criteria are supported.  Under the standard query model the next
``L0`` member is the ``L1`` node with the most neighbors already inside
``L0`` (the best available proxy for its degree).  Under the
degree-revealing model true degrees of ``L1`` nodes are known, so the
maximum-degree node is taken directly and edge weights for the two-hop
reach distribution come for free.
"""
from __future__ import annotations

import heapq
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .graphs import AccessSession, QueryModel


class Layer(Enum):
    L0 = "l0"
    L1 = "l1"
    PERIPHERY = "periphery"


class SecondHop(Enum):
    """How the two-hop reach draws its second edge from an ``L1`` node ``u``.

    ``L2_ONLY`` draws uniformly among u's periphery neighbors (the default).
    ``NON_L0`` draws uniformly among all of u's neighbors outside ``L0`` and
    retries when the draw lands back in ``L1``.  Reachability denominators
    follow the choice, so both variants unbias correctly.
    """

    L2_ONLY = "l2-only"
    NON_L0 = "non-l0"


@dataclass
class Layering:
    """Finished decomposition plus the structures backing the reach draws."""

    model: QueryModel
    l0: list[int]
    l0_set: set[int]
    l1: list[int]
    l1_set: set[int]
    d_l0: dict[int, int]
    l0l1_edge_total: int
    plus_weights: dict[int, int] | None = None
    plus_weight_total: int = 0
    target_size: int = 0
    _l1_arr: np.ndarray | None = field(default=None, repr=False)
    _cum_sl: np.ndarray | None = field(default=None, repr=False)
    _cum_plus: np.ndarray | None = field(default=None, repr=False)

    @property
    def achieved_size(self) -> int:
        return len(self.l0)

    def layer_of(self, v: int) -> Layer:
        if v in self.l0_set:
            return Layer.L0
        if v in self.l1_set:
            return Layer.L1
        return Layer.PERIPHERY

    def _ensure_arrays(self) -> None:
        if self._l1_arr is None:
            self._l1_arr = np.asarray(self.l1, dtype=np.int64)
            self._cum_sl = np.cumsum(
                np.asarray([self.d_l0[u] for u in self.l1], dtype=np.int64))
            if self.plus_weights is not None:
                self._cum_plus = np.cumsum(
                    np.asarray([self.plus_weights[u] for u in self.l1],
                               dtype=np.int64))

    def draw_l1_by_l0_edges(self, rng: np.random.Generator) -> int:
        """L1 endpoint of a uniformly random L0-L1 edge."""
        self._ensure_arrays()
        if self.l0l1_edge_total <= 0:
            raise ValueError("layering has no L0-L1 edges")
        r = int(rng.integers(self.l0l1_edge_total))
        return int(self._l1_arr[np.searchsorted(self._cum_sl, r, side="right")])

    def draw_l1_by_plus_weights(self, rng: np.random.Generator) -> int:
        """L1 node drawn with probability proportional to its non-L0 degree."""
        self._ensure_arrays()
        if self.plus_weights is None:
            raise ValueError("plus weights require a degree-revealing layering")
        if self.plus_weight_total <= 0:
            raise ValueError("all L1 neighbors lie inside L0")
        r = int(rng.integers(self.plus_weight_total))
        return int(self._l1_arr[np.searchsorted(self._cum_plus, r, side="right")])

    def drawable_l1_count(self) -> int:
        if self.model is QueryModel.DEGREE_REVEALING:
            return sum(1 for u in self.l1 if self.plus_weights[u] > 0)
        return len(self.l1)


def classify(layering: Layering, v: int) -> Layer:
    """Layer tag of ``v``.  Set lookups only, zero queries."""
    return layering.layer_of(v)


def generate_l0(session: AccessSession, v0: int, l0_size: int, *,
                allow_partial: bool = False, warm_start_steps: int = 0) -> Layering:
    """Grow the base layer with the greedy rule matching the session's model."""
    if session.model is QueryModel.DEGREE_REVEALING:
        return generate_l0_plus(session, v0, l0_size,
                                allow_partial=allow_partial,
                                warm_start_steps=warm_start_steps)
    return generate_l0_sl(session, v0, l0_size,
                          allow_partial=allow_partial,
                          warm_start_steps=warm_start_steps)


def generate_l0_sl(session: AccessSession, v0: int, l0_size: int, *,
                   allow_partial: bool = False,
                   warm_start_steps: int = 0) -> Layering:
    """Standard-model greedy growth by perceived degree ``|N(u) & L0|``."""
    return _grow(session, v0, l0_size, by_true_degree=False,
                 allow_partial=allow_partial, warm_start_steps=warm_start_steps)


def generate_l0_plus(session: AccessSession, v0: int, l0_size: int, *,
                     allow_partial: bool = False,
                     warm_start_steps: int = 0) -> Layering:
    """Degree-revealing greedy growth by true degree."""
    if session.model is not QueryModel.DEGREE_REVEALING:
        raise ValueError("true-degree growth needs a degree-revealing session")
    return _grow(session, v0, l0_size, by_true_degree=True,
                 allow_partial=allow_partial, warm_start_steps=warm_start_steps)


def _grow(session, v0, l0_size, *, by_true_degree, allow_partial,
          warm_start_steps) -> Layering:
    if l0_size < 1:
        raise ValueError("l0_size must be at least 1")
    rng = session.rng
    if warm_start_steps:
        v0 = _warm_start(session, v0, warm_start_steps, rng)

    l0: list[int] = []
    l0_set: set[int] = set()
    l1_set: set[int] = set()
    d_l0: dict[int, int] = {}
    edge_total = 0
    # lazy heap: stale entries are skipped at pop time; fresh random keys per
    # push make ties uniform among the currently tied nodes
    heap: list[tuple[int, float, int]] = []

    def admit(u: int) -> None:
        nonlocal edge_total
        nbrs = session.query(u).tolist()
        l0.append(u)
        l0_set.add(u)
        if u in l1_set:
            l1_set.remove(u)
            edge_total -= d_l0.pop(u)
        for w in nbrs:
            if w in l0_set:
                continue
            if w in l1_set:
                d_l0[w] += 1
                edge_total += 1
                if not by_true_degree:
                    heapq.heappush(heap, (-d_l0[w], rng.random(), w))
            else:
                l1_set.add(w)
                d_l0[w] = 1
                edge_total += 1
                key = session.known_degree(w) if by_true_degree else 1
                heapq.heappush(heap, (-key, rng.random(), w))

    admit(int(v0))
    while len(l0) < l0_size:
        u = _pop_best(heap, l1_set, d_l0, by_true_degree)
        if u is None:
            if allow_partial:
                break
            raise ValueError(
                f"only {len(l0)} nodes reachable, cannot grow L0 to {l0_size}")
        admit(u)

    l1 = sorted(l1_set)
    plus_weights = None
    plus_total = 0
    if session.model is QueryModel.DEGREE_REVEALING:
        plus_weights = {}
        for u in l1:
            plus_weights[u] = session.known_degree(u) - d_l0[u]
            plus_total += plus_weights[u]
    return Layering(model=session.model, l0=l0, l0_set=l0_set, l1=l1,
                    l1_set=l1_set, d_l0=d_l0, l0l1_edge_total=edge_total,
                    plus_weights=plus_weights, plus_weight_total=plus_total,
                    target_size=l0_size)


def _pop_best(heap, l1_set, d_l0, by_true_degree):
    while heap:
        neg_key, _, u = heapq.heappop(heap)
        if u not in l1_set:
            continue
        if not by_true_degree and d_l0[u] != -neg_key:
            continue
        return u
    return None


def _warm_start(session, v0, steps, rng):
    current = int(v0)
    for _ in range(steps):
        nbrs = session.query(current)
        if nbrs.size == 0:
            break
        current = int(nbrs[rng.integers(nbrs.size)])
    return current


@dataclass
class Component:
    """A connected component of the reduced periphery graph.

    ``boundary`` maps each adjacent ``L1`` node ``u`` to the number of edges
    from ``u`` into the component; ``bridge_count`` is their sum.  ``rs`` is
    the component-level reachability score, filled in by the model-specific
    scoring function.
    """

    nodes: tuple[int, ...]
    l2_nodes: frozenset[int]
    boundary: dict[int, int]
    bridge_count: int
    rs: Fraction | None = None

    @property
    def size(self) -> int:
        return len(self.nodes)

    def node_score(self) -> Fraction:
        if self.rs is None:
            raise ValueError("component has no reachability score yet")
        return self.rs / self.size


def component_bfs(session: AccessSession, layering: Layering, v: int,
                  comp_cache: dict | None = None) -> Component:
    """Fully explore the reduced-periphery component containing ``v``.

    ``v`` must lie in the periphery and have at least one ``L1`` neighbor.
    Every component node is queried.  An edge is traversed only if at least
    one endpoint has no ``L1`` neighbor; deciding that for a fresh neighbor
    of a direct-periphery node costs one (cached) classification query.
    """
    if comp_cache is not None and v in comp_cache:
        return comp_cache[v]
    l0_set, l1_set = layering.l0_set, layering.l1_set
    if v in l0_set or v in l1_set:
        raise ValueError(f"node {v} is not in the periphery")
    first = session.query(v).tolist()
    if not any(w in l1_set for w in first):
        raise ValueError(f"node {v} has no L1 neighbor")

    is_l2: dict[int, bool] = {v: True}
    visited = {v}
    order: list[int] = []
    boundary: Counter[int] = Counter()
    queue = deque([(v, first)])
    while queue:
        x, nbrs = queue.popleft()
        order.append(x)
        x_l2 = is_l2[x]
        for w in nbrs:
            if w in l1_set:
                boundary[w] += 1
                continue
            if w in visited:
                continue
            if x_l2:
                w_l2 = is_l2.get(w)
                if w_l2 is None:
                    w_nbrs = session.query(w).tolist()
                    w_l2 = any(y in l1_set for y in w_nbrs)
                    is_l2[w] = w_l2
                if w_l2:
                    continue  # direct-periphery pair, edge intentionally ignored
            visited.add(w)
            w_nbrs = session.query(w).tolist()
            if w not in is_l2:
                is_l2[w] = any(y in l1_set for y in w_nbrs)
            queue.append((w, w_nbrs))

    comp = Component(nodes=tuple(order),
                     l2_nodes=frozenset(x for x in order if is_l2[x]),
                     boundary=dict(boundary),
                     bridge_count=sum(boundary.values()))
    if comp_cache is not None:
        for node in comp.nodes:
            comp_cache[node] = comp
    return comp


def comp_reachability_sl(session: AccessSession, layering: Layering,
                         comp: Component, *,
                         second_hop: SecondHop = SecondHop.L2_ONLY) -> Fraction:
    """Standard-model reachability score of a component.

    Sums, over boundary nodes ``u``, the chance that a uniform L0-L1 edge
    lands on ``u`` times the chance the second hop enters the component,
    scaled by the total L0-L1 edge count.  Stored on ``comp.rs`` and
    returned.  Boundary nodes not yet queried are queried here (cached).
    """
    if not comp.boundary:
        raise ValueError("component has no L1 boundary, it cannot be reached")
    l0_set, l1_set = layering.l0_set, layering.l1_set
    rs = Fraction(0)
    for u in sorted(comp.boundary):
        entering = comp.boundary[u]
        if second_hop is SecondHop.L2_ONLY:
            nbrs = session.query(u).tolist()
            denom = sum(1 for w in nbrs if w not in l0_set and w not in l1_set)
        else:
            denom = session.degree(u) - layering.d_l0[u]
        rs += Fraction(layering.d_l0[u] * entering, denom)
    comp.rs = rs
    return rs


def comp_reachability_plus(comp: Component) -> Fraction:
    """Degree-revealing reachability score: the bridge count, zero queries."""
    if not comp.boundary:
        raise ValueError("component has no L1 boundary, it cannot be reached")
    comp.rs = Fraction(comp.bridge_count)
    return comp.rs


def save_layering(layering: Layering, path) -> None:
    """Write a reusable text snapshot of the decomposition."""
    with open(path, "wt") as fh:
        fh.write("#layersample layering v1\n")
        fh.write(f"model={layering.model.value}\n")
        fh.write(f"target={layering.target_size}\n")
        fh.write("l0=" + " ".join(map(str, layering.l0)) + "\n")
        fh.write("l1=" + " ".join(map(str, layering.l1)) + "\n")
        fh.write("d_l0=" + " ".join(str(layering.d_l0[u]) for u in layering.l1) + "\n")
        if layering.plus_weights is not None:
            fh.write("plus=" + " ".join(
                str(layering.plus_weights[u]) for u in layering.l1) + "\n")


def load_layering(path) -> Layering:
    fields: dict[str, str] = {}
    with open(path, "rt") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key] = value
    model = QueryModel(fields["model"])
    l0 = [int(x) for x in fields["l0"].split()] if fields["l0"] else []
    l1 = [int(x) for x in fields["l1"].split()] if fields["l1"] else []
    counts = [int(x) for x in fields["d_l0"].split()] if fields["d_l0"] else []
    d_l0 = dict(zip(l1, counts))
    plus_weights = None
    plus_total = 0
    if "plus" in fields:
        weights = [int(x) for x in fields["plus"].split()] if fields["plus"] else []
        plus_weights = dict(zip(l1, weights))
        plus_total = sum(weights)
    return Layering(model=model, l0=l0, l0_set=set(l0), l1=l1, l1_set=set(l1),
                    d_l0=d_l0, l0l1_edge_total=sum(counts),
                    plus_weights=plus_weights, plus_weight_total=plus_total,
                    target_size=int(fields.get("target", len(l0))))
