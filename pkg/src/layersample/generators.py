"""Seeded synthetic graph generators and small fixture graphs.

Everything here is a pure function of its parameters and seed: identical
inputs give byte-identical adjacency.
"""
from __future__ import annotations

from collections import deque

import networkx as nx
import numpy as np

from .graphs import Graph, from_edges


class _GeomPool:
    """Batched geometric draws with support {0, 1, 2, ...} and mean p/(1-p).

    Scalar generator calls dominate the fire-spread loop, so draws are
    pulled in blocks.  ``p = 0`` degenerates to the constant 0.
    """

    def __init__(self, rng: np.random.Generator, p: float, block: int = 8192):
        self._rng = rng
        self._p = p
        self._block = block
        self._buf: np.ndarray | None = None
        self._pos = 0

    def draw(self) -> int:
        if self._p <= 0.0:
            return 0
        if self._buf is None or self._pos >= self._buf.size:
            self._buf = self._rng.geometric(1.0 - self._p, size=self._block) - 1
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        return int(x)


def forest_fire(n: int, p_f: float = 0.37, p_b: float = 0.3, seed=None) -> Graph:
    """Undirected forest-fire graph on ``n`` nodes.

    Nodes arrive one at a time.  Each new node picks a uniform ambassador
    among the existing nodes and starts a fire there: from every newly
    burned node ``w``, geometric counts ``x`` (mean ``p_f/(1-p_f)``) and
    ``y`` (mean ``p_b/(1-p_b)``) of unburned neighbors are burned along
    ``w``'s out-role and in-role edges respectively, chosen uniformly
    without replacement.  Edge roles exist only during generation; the new
    node links to every burned node and the final graph is undirected and
    simple.  The output is connected by construction.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0.0 <= p_f < 1.0) or not (0.0 <= p_b < 1.0):
        raise ValueError("burning probabilities must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    fwd_pool = _GeomPool(rng, p_f)
    bwd_pool = _GeomPool(rng, p_b)
    out_adj: list[list[int]] = [[] for _ in range(n)]
    in_adj: list[list[int]] = [[] for _ in range(n)]
    src: list[int] = []
    dst: list[int] = []
    for v in range(1, n):
        ambassador = int(rng.integers(v))
        burned = {ambassador}
        order = [ambassador]
        frontier = deque([ambassador])
        while frontier:
            w = frontier.popleft()
            x = fwd_pool.draw()
            y = bwd_pool.draw()
            if x:
                _burn(rng, out_adj[w], burned, order, frontier, x)
            if y:
                _burn(rng, in_adj[w], burned, order, frontier, y)
        for u in order:
            out_adj[v].append(u)
            in_adj[u].append(v)
            src.append(v)
            dst.append(u)
    edges = np.stack([np.asarray(src, dtype=np.int64),
                      np.asarray(dst, dtype=np.int64)], axis=1) if src else \
        np.empty((0, 2), dtype=np.int64)
    return from_edges(n, edges)


def _burn(rng, candidates, burned, order, frontier, want):
    fresh = [u for u in candidates if u not in burned]
    if not fresh:
        return
    if want < len(fresh):
        picked = [fresh[i] for i in rng.choice(len(fresh), size=want, replace=False)]
    else:
        picked = fresh
    for u in picked:
        burned.add(u)
        order.append(u)
        frontier.append(u)


def lower_bound_graph(n: int, t: int, core_degree: int = 3,
                      component_kind: str = "star", seed=None) -> Graph:
    """Expander core plus many small satellite components joined by bridges.

    Layout (a documented contract relied on by tests and experiments):

    * core nodes occupy ids ``[0, core_size)``;
    * component ``i`` occupies ``[core_size + i*t, core_size + (i+1)*t)``
      with its designated node (star center, or expander node 0) first;
    * rounding leftovers occupy the trailing ids and hang off the core by
      one edge each.

    There are exactly ``floor(n / (2t))`` bridge edges, one per component,
    each landing on a core-side node chosen with probability proportional
    to its degree.  Random walks need about ``t`` steps to cross between
    the core and a component, which is the whole point of the construction.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    if t > n // 2:
        raise ValueError(f"t={t} exceeds n/2={n // 2}")
    if core_degree < 3:
        raise ValueError("core_degree must be at least 3")
    if component_kind not in ("star", "expander"):
        raise ValueError(f"unknown component_kind {component_kind!r}")
    rng = np.random.default_rng(seed)
    ell = n // (2 * t)
    core_size = n // 2
    if (core_size * core_degree) % 2 == 1:
        core_size -= 1
    leftover = n - core_size - ell * t
    src: list[int] = []
    dst: list[int] = []

    core_seed = int(rng.integers(2 ** 31))
    core = nx.random_regular_graph(core_degree, core_size, seed=core_seed)
    for a, b in core.edges():
        src.append(a)
        dst.append(b)

    core_side_degree = np.zeros(n, dtype=np.int64)
    core_side_degree[:core_size] = core_degree
    first_leftover = core_size + ell * t
    for j in range(leftover):
        anchor = int(rng.integers(core_size))
        src.append(first_leftover + j)
        dst.append(anchor)
        core_side_degree[anchor] += 1
        core_side_degree[first_leftover + j] = 1

    core_side_ids = np.concatenate([np.arange(core_size),
                                    np.arange(first_leftover, n)])
    weights = core_side_degree[core_side_ids].astype(np.float64)
    weights /= weights.sum()

    for i in range(ell):
        base = core_size + i * t
        if component_kind == "star":
            for leaf in range(base + 1, base + t):
                src.append(base)
                dst.append(leaf)
        else:
            inner_degree = core_degree if (core_degree * t) % 2 == 0 else core_degree + 1
            inner_seed = int(rng.integers(2 ** 31))
            inner = nx.random_regular_graph(inner_degree, t, seed=inner_seed)
            for a, b in inner.edges():
                src.append(base + a)
                dst.append(base + b)
        anchor = int(core_side_ids[rng.choice(core_side_ids.size, p=weights)])
        src.append(base)
        dst.append(anchor)

    edges = np.stack([np.asarray(src, dtype=np.int64),
                      np.asarray(dst, dtype=np.int64)], axis=1)
    return from_edges(n, edges)


def star(k: int) -> Graph:
    """Star with center 0 and leaves ``1..k`` (``k+1`` nodes in total)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    edges = np.stack([np.zeros(k, dtype=np.int64),
                      np.arange(1, k + 1, dtype=np.int64)], axis=1)
    return from_edges(k + 1, edges)


def path(k: int) -> Graph:
    """Path on ``k`` nodes, ``0-1-...-(k-1)``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return Graph(np.zeros(2, dtype=np.int64), np.empty(0, dtype=np.int64))
    ids = np.arange(k - 1, dtype=np.int64)
    edges = np.stack([ids, ids + 1], axis=1)
    return from_edges(k, edges)


def random_regular(n: int, d: int, seed=None) -> Graph:
    """Random ``d``-regular simple graph via the configuration model."""
    if d >= n:
        raise ValueError("d must be smaller than n")
    if (n * d) % 2 == 1:
        raise ValueError("n*d must be even for a d-regular graph to exist")
    g = nx.random_regular_graph(d, n, seed=seed)
    m = g.number_of_edges()
    edges = np.empty((m, 2), dtype=np.int64)
    for i, (a, b) in enumerate(g.edges()):
        edges[i, 0] = a
        edges[i, 1] = b
    return from_edges(n, edges)
