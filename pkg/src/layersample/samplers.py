"""End-to-end sampling: preprocessing plus repeated near-uniform draws.

A :class:`SamplerHandle` freezes everything the sampling phase needs: the
layering, the periphery size estimate, the baseline reachability and a
seeded generator.  Each draw picks a layer with probabilities proportional
to the (estimated) layer sizes; base-layer and neighbor-layer draws are
free, periphery draws run the two-hop reach and a rejection step whose
acceptance probability is ``min(1, rs0 / rs(v))``, so nodes rarer than the
baseline are always accepted.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .estimators import (DEFAULT_ATTEMPT_CAP, PeripherySizeEstimate,
                         PeripheryUnreachableError, collect_reach_samples,
                         estimate_baseline_reachability,
                         periphery_size_from_samples, reach_l2,
                         sample_l1_forward_degrees)
from .graphs import AccessSession
from .layering import Layer, Layering, SecondHop, generate_l0

log = logging.getLogger(__name__)


@dataclass
class SampleTrace:
    node: int
    layer: Layer
    queries_spent: int
    rejections: int


@dataclass
class SamplerHandle:
    layering: Layering
    estimate: PeripherySizeEstimate | None
    rs0: Fraction | None
    epsilon: float
    n_bar: Fraction
    rng: np.random.Generator
    second_hop: SecondHop = SecondHop.L2_ONLY
    attempt_cap: int = DEFAULT_ATTEMPT_CAP
    preprocessing_queries: int = 0
    comp_cache: dict = field(default_factory=dict, repr=False)
    _dead: set = field(default_factory=set, repr=False)
    _warned_empty: bool = False

    @property
    def model(self):
        return self.layering.model

    @property
    def periphery_mass(self) -> Fraction:
        return self.estimate.l2plus_size if self.estimate is not None else Fraction(0)


@dataclass
class SampleRun:
    """Traces plus the cumulative cost series for amortized reporting."""

    traces: list[SampleTrace]
    cumulative_queries: np.ndarray   # sampling-phase queries after each draw
    preprocessing_queries: int

    def amortized(self, include_preprocessing: bool = True) -> np.ndarray:
        idx = np.arange(1, self.cumulative_queries.size + 1)
        base = self.preprocessing_queries if include_preprocessing else 0
        return (base + self.cumulative_queries) / idx


def make_handle(layering: Layering, *, l2plus_size, rs0,
                rng: np.random.Generator, estimate: PeripherySizeEstimate | None = None,
                epsilon: float = 0.0,
                second_hop: SecondHop = SecondHop.L2_ONLY,
                attempt_cap: int = DEFAULT_ATTEMPT_CAP,
                preprocessing_queries: int = 0) -> SamplerHandle:
    """Build a handle from explicitly supplied estimates.

    Used by tests and experiments that want exact inputs instead of the
    estimated ones; with the exact periphery size and the minimum node
    score as ``rs0`` the sampler is exactly uniform.
    """
    size = Fraction(l2plus_size)
    if estimate is None and size > 0:
        estimate = PeripherySizeEstimate(l2plus_size=size, d1_plus_avg=Fraction(0),
                                         d2_minus_avg=Fraction(0), s1_used=0,
                                         s2_used=0)
    n_bar = Fraction(len(layering.l0) + len(layering.l1)) + size
    return SamplerHandle(layering=layering, estimate=estimate,
                         rs0=Fraction(rs0) if rs0 is not None else None,
                         epsilon=epsilon, n_bar=n_bar, rng=rng,
                         second_hop=second_hop, attempt_cap=attempt_cap,
                         preprocessing_queries=preprocessing_queries)


def preprocess(session: AccessSession, v0: int, *, l0_size: int, s1: int,
               s2: int, epsilon: float, warm_start_steps: int = 0,
               second_hop: SecondHop = SecondHop.L2_ONLY,
               attempt_cap: int = DEFAULT_ATTEMPT_CAP,
               layering: Layering | None = None) -> SamplerHandle:
    """Run the full structural learning phase and return a sampler handle.

    The session's counter is reset afterwards so that sampling cost is
    tracked separately; the preprocessing spend is kept on the handle.  A
    prebuilt ``layering`` (for instance one loaded from a snapshot) skips
    the growth step.
    """
    rng = session.rng
    if layering is None:
        layering = generate_l0(session, v0, l0_size, allow_partial=True,
                               warm_start_steps=warm_start_steps)
    comp_cache: dict = {}
    estimate = None
    rs0 = None
    if layering.l1:
        try:
            samples = collect_reach_samples(session, layering, s2, rng=rng,
                                            comp_cache=comp_cache,
                                            attempt_cap=attempt_cap,
                                            second_hop=second_hop)
            d1_values = sample_l1_forward_degrees(session, layering, s1, rng=rng)
            estimate = periphery_size_from_samples(len(layering.l1), d1_values,
                                                   samples)
            rs0 = estimate_baseline_reachability(samples, epsilon)
        except PeripheryUnreachableError:
            log.info("periphery unreachable from this layering; sampling "
                     "will cover the explored layers only")
    handle = SamplerHandle(layering=layering, estimate=estimate, rs0=rs0,
                           epsilon=epsilon,
                           n_bar=Fraction(len(layering.l0) + len(layering.l1))
                           + (estimate.l2plus_size if estimate else Fraction(0)),
                           rng=rng, second_hop=second_hop,
                           attempt_cap=attempt_cap,
                           preprocessing_queries=session.query_count,
                           comp_cache=comp_cache)
    session.reset_count()
    return handle


def sample(handle: SamplerHandle, session: AccessSession) -> SampleTrace:
    """Draw one node, near-uniform over the whole reachable graph."""
    layering = handle.layering
    rng = handle.rng
    start = session.query_count
    n_l0, n_l1 = len(layering.l0), len(layering.l1)
    r = rng.random() * float(handle.n_bar)
    if r >= n_l0 + n_l1:
        if handle.rs0 is not None:
            rejections = 0
            while True:
                try:
                    got = reach_l2(session, layering, rng=rng,
                                   comp_cache=handle.comp_cache,
                                   dead=handle._dead,
                                   attempt_cap=handle.attempt_cap,
                                   second_hop=handle.second_hop)
                except PeripheryUnreachableError:
                    break
                accept = handle.rs0 / got.rs
                if accept >= 1 or rng.random() < float(accept):
                    return SampleTrace(node=got.node, layer=Layer.PERIPHERY,
                                       queries_spent=session.query_count - start,
                                       rejections=rejections)
                rejections += 1
        if not handle._warned_empty:
            log.warning("periphery branch drawn but unreachable; "
                        "renormalizing over the explored layers")
            handle._warned_empty = True
        # dead periphery mass is spread back over the explored layers in
        # proportion to their sizes
        j = int(rng.integers(n_l0 + n_l1))
        queries = session.query_count - start
        if j < n_l0:
            return SampleTrace(node=int(layering.l0[j]), layer=Layer.L0,
                               queries_spent=queries, rejections=0)
        return SampleTrace(node=int(layering.l1[j - n_l0]), layer=Layer.L1,
                           queries_spent=queries, rejections=0)
    if r < n_l0:
        node = layering.l0[rng.integers(n_l0)]
        return SampleTrace(node=int(node), layer=Layer.L0,
                           queries_spent=session.query_count - start,
                           rejections=0)
    node = layering.l1[rng.integers(n_l1)]
    return SampleTrace(node=int(node), layer=Layer.L1,
                       queries_spent=session.query_count - start, rejections=0)


def sample_many(handle: SamplerHandle, session: AccessSession,
                count: int) -> SampleRun:
    """Draw ``count`` independent samples and record the cost series."""
    if count < 1:
        raise ValueError("count must be at least 1")
    traces = []
    cumulative = np.empty(count, dtype=np.int64)
    for i in range(count):
        traces.append(sample(handle, session))
        cumulative[i] = session.query_count
    return SampleRun(traces=traces, cumulative_queries=cumulative,
                     preprocessing_queries=handle.preprocessing_queries)
