"""Graph storage and the query-access oracle.

The graph lives in compressed sparse row form: an ``indptr`` offset array
plus a flat ``indices`` array whose per-node segments are sorted.  Sampling
algorithms never read it directly.  They go through :class:`AccessSession`,
which answers neighbor queries, remembers which nodes were already queried,
and bills every query according to the active counting mode.  Harness code
(generators, calibration, ground-truth checks) is allowed to hold the raw
:class:`Graph`.
"""
from __future__ import annotations

import io
import os
from enum import Enum

import numpy as np


class GraphParseError(ValueError):
    """Raised when an edge-list stream cannot be parsed."""


class Graph:
    """Immutable undirected simple graph over dense node ids ``0..n-1``."""

    __slots__ = ("indptr", "indices", "node_count", "edge_count", "original_ids")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray,
                 original_ids: np.ndarray | None = None):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        self.node_count = int(self.indptr.size - 1)
        self.edge_count = int(self.indices.size // 2)
        if original_ids is not None:
            original_ids = np.asarray(original_ids, dtype=np.int64)
            original_ids.flags.writeable = False
        self.original_ids = original_ids

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of ``v`` (read-only view)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        seg = self.neighbors(u)
        i = np.searchsorted(seg, v)
        return i < seg.size and seg[i] == v

    @property
    def average_degree(self) -> float:
        return 2.0 * self.edge_count / self.node_count if self.node_count else 0.0

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


def from_edges(node_count: int, edges: np.ndarray) -> Graph:
    """Build a :class:`Graph` from an ``(m, 2)`` integer edge array.

    Self-loops and duplicate edges (in either orientation) are dropped, so
    the result is always simple and symmetric.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if node_count < 1:
        raise ValueError("node_count must be at least 1")
    if edges.size and (edges.min() < 0 or edges.max() >= node_count):
        raise ValueError("edge endpoint out of range")
    edges = edges[edges[:, 0] != edges[:, 1]]
    both = np.concatenate([edges, edges[:, ::-1]], axis=0)
    # encode (u, v) as u*n+v so np.unique sorts and dedupes in one pass
    keys = np.unique(both[:, 0] * np.int64(node_count) + both[:, 1])
    us, vs = np.divmod(keys, np.int64(node_count))
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(us, minlength=node_count), out=indptr[1:])
    return Graph(indptr, vs)


def load_edge_list(source) -> Graph:
    """Parse a whitespace-separated edge list into a :class:`Graph`.

    ``source`` may be a path, a text/binary stream, or a string of the file
    contents (a string is taken as contents when it holds a newline, as a
    path otherwise).  Lines starting with ``#`` are comments.  Input node
    ids are
    remapped to dense integers in order of first appearance; the translation
    table is kept on ``Graph.original_ids``.  Self-loops and duplicate edges
    are dropped.
    """
    if isinstance(source, (str, os.PathLike)) and not (
            isinstance(source, str) and "\n" in source):
        with open(source, "rt") as fh:
            return _parse_edge_lines(fh)
    if isinstance(source, str):
        return _parse_edge_lines(io.StringIO(source))
    if isinstance(source, bytes):
        return _parse_edge_lines(io.StringIO(source.decode()))
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode()
        return _parse_edge_lines(io.StringIO(data))
    raise TypeError(f"cannot read edge list from {type(source)!r}")


def _parse_edge_lines(lines) -> Graph:
    id_of: dict[int, int] = {}
    us: list[int] = []
    vs: list[int] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise GraphParseError(
                f"line {lineno}: expected two integer tokens, got {len(parts)}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(
                f"line {lineno}: non-integer token in {stripped!r}") from None
        for raw in (a, b):
            if raw not in id_of:
                id_of[raw] = len(id_of)
        us.append(id_of[a])
        vs.append(id_of[b])
    if not us:
        raise GraphParseError("empty edge list")
    original = np.empty(len(id_of), dtype=np.int64)
    for raw, dense in id_of.items():
        original[dense] = raw
    edges = np.stack([np.asarray(us, dtype=np.int64),
                      np.asarray(vs, dtype=np.int64)], axis=1)
    graph = from_edges(len(id_of), edges)
    return Graph(graph.indptr, graph.indices, original)


def save_edge_list(graph: Graph, path, header: str | None = None) -> None:
    """Write one ``u v`` pair per undirected edge, with ``u < v``."""
    with open(path, "wt") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        indptr, indices = graph.indptr, graph.indices
        for u in range(graph.node_count):
            for v in indices[indptr[u]:indptr[u + 1]]:
                if u < v:
                    fh.write(f"{u} {v}\n")


class QueryModel(Enum):
    """What a node query reveals.

    ``STANDARD`` reveals the neighbor ids.  ``DEGREE_REVEALING``
    additionally reveals the degree of every returned neighbor.
    """

    STANDARD = "standard"
    DEGREE_REVEALING = "degree-revealing"


class CountingMode(Enum):
    """``CACHED`` bills each distinct node once; ``UNCACHED`` bills every call."""

    CACHED = "cached"
    UNCACHED = "uncached"


class AccessSession:
    """Query oracle over a shared :class:`Graph`, with exact accounting.

    All algorithm code sees the graph only through this object.  A session
    is single-owner mutable state; run concurrent experiments with one
    session each over the same immutable graph.

    ``reset_count`` zeroes the billing counter but keeps the query cache,
    which is how preprocessing cost is separated from sampling cost.
    """

    def __init__(self, graph: Graph, model: QueryModel = QueryModel.STANDARD,
                 counting: CountingMode = CountingMode.CACHED,
                 seed=None):
        self._graph = graph
        self.model = model
        self.counting = counting
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        n = graph.node_count
        self._queried = np.zeros(n, dtype=bool)
        self._known_degree = np.full(n, -1, dtype=np.int64)
        self._count = 0

    @property
    def query_count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        self._count = 0

    def is_queried(self, v: int) -> bool:
        return bool(self._queried[v])

    def distinct_queried(self) -> int:
        return int(self._queried.sum())

    def known_degree(self, v: int) -> int | None:
        """Degree of ``v`` if already revealed, else ``None``.  Never queries."""
        d = self._known_degree[v]
        return int(d) if d >= 0 else None

    def query(self, v: int) -> np.ndarray:
        """Return ``N(v)`` and bill the query.

        In cached mode a repeat query of the same node is free.  Under the
        degree-revealing model the degrees of all returned neighbors are
        recorded and become available through :meth:`known_degree` and
        :meth:`degree` at no extra cost.
        """
        v = int(v)
        graph = self._graph
        if v < 0 or v >= graph.node_count:
            raise ValueError(f"node id {v} out of range [0, {graph.node_count})")
        if self.counting is CountingMode.UNCACHED or not self._queried[v]:
            self._count += 1
        self._queried[v] = True
        nbrs = graph.indices[graph.indptr[v]:graph.indptr[v + 1]]
        self._known_degree[v] = nbrs.size
        if self.model is QueryModel.DEGREE_REVEALING and nbrs.size:
            self._known_degree[nbrs] = graph.indptr[nbrs + 1] - graph.indptr[nbrs]
        return nbrs

    def degree(self, v: int) -> int:
        """Degree of ``v``, querying it first if the degree is not yet known."""
        v = int(v)
        if v < 0 or v >= self._graph.node_count:
            raise ValueError(f"node id {v} out of range [0, {self._graph.node_count})")
        if self._known_degree[v] < 0:
            self.query(v)
        return int(self._known_degree[v])
