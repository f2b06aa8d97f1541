"""Random-walk baselines and the mixing-interval calibration harness.

Three walkers are provided.  ``REJ`` runs the simple random walk and
rejection-samples interval candidates with probability ``1/deg``;
``MH`` runs a Metropolis-Hastings chain whose stationary distribution is
already uniform (lazy: a rejected proposal keeps the walker in place);
``MH_PLUS`` is the same chain in the degree-revealing model, where proposal
degrees are free.

Calibration is an offline tool with full graph access: it simulates many
walks in lockstep and finds the earliest step at which the extracted
samples look uniform, either by the empirical distance to uniformity or by
a collision count.  Billed query counts for baselines come only from
:func:`rw_sample_many`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graphs import AccessSession, Graph, QueryModel
from .stats import empirical_tv_to_uniform, uniform_reference_tv

INTERVAL_CAP_FACTOR = 10_000


class Walker(Enum):
    REJ = "rej"
    MH = "mh"
    MH_PLUS = "mh+"


class CalibrationError(RuntimeError):
    def __init__(self, message, best_step=None, best_distance=None):
        super().__init__(message)
        self.best_step = best_step
        self.best_distance = best_distance


@dataclass
class IntervalCalibration:
    interval: int
    method: str
    zeta: float
    walks_used: int
    per_start: list[int]


@dataclass
class WalkRun:
    samples: np.ndarray
    cumulative_queries: np.ndarray
    total_steps: int

    def amortized(self) -> np.ndarray:
        return self.cumulative_queries / np.arange(1, self.samples.size + 1)


def _require_model(session: AccessSession, kind: Walker) -> None:
    if kind is Walker.MH_PLUS and session.model is not QueryModel.DEGREE_REVEALING:
        raise ValueError("mh+ needs a degree-revealing session")


def walk_step(session: AccessSession, kind: Walker, current: int,
              rng: np.random.Generator | None = None) -> int:
    """Advance the walk one step from ``current`` and return the new node."""
    _require_model(session, kind)
    rng = rng if rng is not None else session.rng
    nbrs = session.query(current)
    if nbrs.size == 0:
        raise ValueError(f"node {current} is isolated, the walk cannot move")
    proposal = int(nbrs[rng.integers(nbrs.size)])
    if kind is Walker.REJ:
        return proposal
    d_cur = nbrs.size
    d_prop = session.degree(proposal)  # free under mh+, may cost a query under mh
    if d_prop <= d_cur or rng.random() < d_cur / d_prop:
        return proposal
    return current


def rw_sample_many(session: AccessSession, kind: Walker, v0: int,
                   num_samples: int, interval: int, *,
                   rng: np.random.Generator | None = None) -> WalkRun:
    """One continuous walk, extracting a candidate every ``interval`` steps.

    MH candidates are accepted outright (the chain is stationary-uniform);
    REJ candidates pass a ``1/deg`` rejection and the walk continues either
    way, so accepted samples are uniform once the interval covers mixing.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    if interval < 1:
        raise ValueError("interval must be at least 1")
    _require_model(session, kind)
    rng = rng if rng is not None else session.rng
    samples: list[int] = []
    cumulative: list[int] = []
    current = int(v0)
    steps = 0
    while len(samples) < num_samples:
        current = walk_step(session, kind, current, rng)
        steps += 1
        if steps % interval == 0:
            if kind is Walker.REJ:
                d = session.degree(current)
                if not (rng.random() < 1.0 / d):
                    continue
            samples.append(current)
            cumulative.append(session.query_count)
    return WalkRun(samples=np.asarray(samples, dtype=np.int64),
                   cumulative_queries=np.asarray(cumulative, dtype=np.int64),
                   total_steps=steps)


# ---- calibration (full graph access, not billed) --------------------------


def _vector_step(graph: Graph, degrees: np.ndarray, kind: Walker,
                 positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    offsets = rng.integers(0, degrees[positions])
    proposals = graph.indices[graph.indptr[positions] + offsets]
    if kind is Walker.REJ:
        return proposals
    move = rng.random(positions.size) * degrees[proposals] < degrees[positions]
    return np.where(move, proposals, positions)


def simulate_walk_positions(graph: Graph, kind: Walker, start: int, walks: int,
                            steps: int, rng: np.random.Generator) -> np.ndarray:
    """Positions of ``walks`` independent walkers after ``steps`` steps."""
    degrees = graph.degrees()
    positions = np.full(walks, start, dtype=np.int64)
    for _ in range(steps):
        positions = _vector_step(graph, degrees, kind, positions, rng)
    return positions


def _extract_calibration_samples(kind, positions, degrees, rng):
    # the REJ sampler emits nodes only after per-degree rejection, so its
    # calibration target is the post-rejection sample set
    if kind is Walker.REJ:
        keep = rng.random(positions.size) * degrees[positions] < 1.0
        return positions[keep]
    return positions


def calibrate_interval(graph: Graph, kind: Walker, *, walks: int, zeta: float,
                       method: str = "tv", starts=None, num_starts: int = 3,
                       cap: int | None = None, seed=None,
                       reference_trials: int = 12,
                       persistence: int = 3) -> IntervalCalibration:
    """Smallest step count after which extracted samples look uniform.

    For every start node, ``walks`` walkers advance in lockstep; after each
    step the extracted samples are tested, and the first step opening a run
    of ``persistence`` consecutive passes is recorded (a single passing
    step can be a parity artifact on nearly bipartite regions, where the
    rejection filter momentarily leaves too few samples to discriminate).
    The returned interval is the maximum over starts.  ``tv`` passes when
    the empirical distance to uniformity is within ``zeta`` of the
    simulated same-size uniform reference; ``collisions`` passes when the
    pairwise collision count drops below the uniform expectation plus three
    standard deviations.
    """
    if walks < 1:
        raise ValueError("walks must be at least 1")
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    if method not in ("tv", "collisions"):
        raise ValueError(f"unknown calibration method {method!r}")
    n = graph.node_count
    rng = np.random.default_rng(seed)
    if cap is None:
        cap = int(INTERVAL_CAP_FACTOR * max(1.0, math.log(n)))
    if starts is None:
        starts = [int(rng.integers(n)) for _ in range(num_starts)]
    degrees = graph.degrees()
    if degrees.min() == 0:
        raise ValueError("graph has isolated nodes, walks cannot calibrate")

    reference_cache: dict[int, float] = {}

    def reference(k: int) -> float:
        if k not in reference_cache:
            reference_cache[k] = uniform_reference_tv(
                k, n, trials=reference_trials, rng=rng)
        return reference_cache[k]

    per_start: list[int] = []
    best_step, best_distance = None, None
    for start in starts:
        positions = np.full(walks, int(start), dtype=np.int64)
        found = None
        run_start, run_length = None, 0
        for t in range(1, cap + 1):
            positions = _vector_step(graph, degrees, kind, positions, rng)
            extracted = _extract_calibration_samples(kind, positions, degrees, rng)
            if extracted.size < 2:
                run_start, run_length = None, 0
                continue
            if method == "tv":
                tv = empirical_tv_to_uniform(extracted, n)
                distance = abs(tv - reference(extracted.size))
                ok = distance <= zeta
            else:
                counts = np.bincount(extracted, minlength=n).astype(np.int64)
                c = int((counts * (counts - 1) // 2).sum())
                pairs = extracted.size * (extracted.size - 1) / 2.0
                mean = pairs / n
                sigma = math.sqrt(pairs * (1.0 / n) * (1.0 - 1.0 / n))
                distance = (c - mean) / sigma if sigma else 0.0
                ok = c <= mean + 3.0 * sigma
            if ok:
                if run_start is None:
                    run_start, run_length = t, 0
                run_length += 1
                if run_length >= persistence:
                    found = run_start
                    break
            else:
                run_start, run_length = None, 0
                if best_distance is None or distance < best_distance:
                    best_step, best_distance = t, distance
        if found is None:
            detail = (f"best distance {best_distance:.4g} at step {best_step}"
                      if best_distance is not None else
                      "no stable passing run before the cap")
            raise CalibrationError(
                f"no step up to {cap} met the {method} criterion ({detail})",
                best_step=best_step, best_distance=best_distance)
        per_start.append(found)
    return IntervalCalibration(interval=max(per_start), method=method,
                               zeta=zeta, walks_used=walks,
                               per_start=per_start)


def default_calibration_plan(graph: Graph, zeta: float) -> tuple[str, int]:
    """Method and walk count used when the caller does not pin them.

    The empirical-distance criterion wants about ``n`` walks, which is fine
    up to 1e5 nodes; beyond that the collision criterion needs only on the
    order of ``sqrt(n) / zeta**2`` walks.
    """
    n = graph.node_count
    if n <= 100_000:
        return "tv", n
    return "collisions", int(math.ceil(10.0 * math.sqrt(n) / (zeta * zeta)))
