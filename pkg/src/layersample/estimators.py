"""Preprocessing-phase estimators and structural diagnostics.

The two-hop reach procedure lands in periphery components with probability
proportional to their reachability score, so every estimate computed from
reached nodes is importance-weighted by ``1/rs``.  The periphery size
follows from the bipartite edge-count identity between the neighbor layer
and the periphery: ``|L1| * avg-forward-degree = |periphery| *
avg-backward-degree``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphs import AccessSession, QueryModel
from .layering import (Component, Layering, SecondHop, comp_reachability_plus,
                       comp_reachability_sl, component_bfs)
from .stats import weighted_quantile

DEFAULT_ATTEMPT_CAP = 1_000_000


class PeripheryUnreachableError(RuntimeError):
    """No two-hop attempt can leave the neighbor layer."""


class EstimationError(RuntimeError):
    """The collected samples are mutually inconsistent."""


@dataclass
class ReachSample:
    """One periphery node delivered by the two-hop reach procedure."""

    node: int
    component_size: int
    rs: Fraction  # per-node reachability score, component score / size
    d_minus: int  # neighbors in L1; zero exactly for deep-periphery nodes
    attempts: int = 1
    component: Component | None = field(default=None, repr=False)


@dataclass
class PeripherySizeEstimate:
    l2plus_size: Fraction
    d1_plus_avg: Fraction
    d2_minus_avg: Fraction
    s1_used: int
    s2_used: int


@dataclass
class LayeringDiagnostics:
    """The structural quantities governing per-sample query cost."""

    mu: float            # node-weighted mean periphery component size
    alpha: float         # fraction of reach attempts whose second hop existed
    c_ratio: float       # max observed rs over the baseline rs0
    w_expected: float    # mean component size under the reach distribution
    d_bridge: float      # max bridges-per-node over observed components
    c_rs: float          # mean rs over min rs among observed samples


def reach_attempt(session: AccessSession, layering: Layering,
                  rng: np.random.Generator, *,
                  second_hop: SecondHop = SecondHop.L2_ONLY):
    """One two-hop attempt.  Returns ``(u, landing)``; landing may be None."""
    l0_set, l1_set = layering.l0_set, layering.l1_set
    if layering.model is QueryModel.DEGREE_REVEALING:
        u = layering.draw_l1_by_plus_weights(rng)
        nbrs = session.query(u)
        cand = [w for w in nbrs.tolist() if w not in l0_set]
        w = cand[rng.integers(len(cand))]
        return u, (None if w in l1_set else w)
    u = layering.draw_l1_by_l0_edges(rng)
    nbrs = session.query(u)
    if second_hop is SecondHop.L2_ONLY:
        cand = [w for w in nbrs.tolist() if w not in l0_set and w not in l1_set]
        if not cand:
            return u, None
        return u, cand[rng.integers(len(cand))]
    cand = [w for w in nbrs.tolist() if w not in l0_set]
    if not cand:
        return u, None
    w = cand[rng.integers(len(cand))]
    return u, (None if w in l1_set else w)


def _score(session, layering, comp, second_hop) -> Fraction:
    if comp.rs is not None:
        return comp.rs
    if layering.model is QueryModel.DEGREE_REVEALING:
        return comp_reachability_plus(comp)
    return comp_reachability_sl(session, layering, comp, second_hop=second_hop)


def reach_l2(session: AccessSession, layering: Layering, *,
             rng: np.random.Generator | None = None,
             comp_cache: dict | None = None,
             dead: set | None = None,
             attempt_cap: int = DEFAULT_ATTEMPT_CAP,
             second_hop: SecondHop = SecondHop.L2_ONLY) -> ReachSample:
    """Repeat two-hop attempts until one lands, then explore and sample.

    The landed component is fully explored (or taken from ``comp_cache``),
    scored for reachability under the session's query model, and a uniform
    node from it is returned together with its per-node score.

    ``dead`` accumulates L1 nodes proven to have no periphery neighbor; once
    every drawable L1 node is dead the periphery is unreachable and the
    attempt loop stops immediately instead of burning the cap.
    """
    rng = rng if rng is not None else session.rng
    if dead is None:
        dead = set()
    l0_set, l1_set = layering.l0_set, layering.l1_set
    drawable = layering.drawable_l1_count()
    if drawable == 0 or not layering.l1:
        raise PeripheryUnreachableError("the neighbor layer is empty")
    if len(dead) >= drawable:
        raise PeripheryUnreachableError("no L1 node has a periphery neighbor")
    attempts = 0
    while attempts < attempt_cap:
        attempts += 1
        u, landing = reach_attempt(session, layering, rng, second_hop=second_hop)
        if landing is not None:
            comp = (comp_cache.get(landing) if comp_cache is not None else None)
            if comp is None:
                comp = component_bfs(session, layering, landing, comp_cache)
            rs_comp = _score(session, layering, comp, second_hop)
            node = comp.nodes[rng.integers(comp.size)]
            d_minus = sum(1 for w in session.query(node).tolist() if w in l1_set)
            return ReachSample(node=int(node), component_size=comp.size,
                               rs=rs_comp / comp.size, d_minus=d_minus,
                               attempts=attempts, component=comp)
        if u not in dead:
            nbrs = session.query(u).tolist()
            if not any(w not in l0_set and w not in l1_set for w in nbrs):
                dead.add(u)
                if len(dead) >= drawable:
                    raise PeripheryUnreachableError(
                        "no L1 node has a periphery neighbor")
    raise PeripheryUnreachableError(
        f"no periphery reached within {attempt_cap} attempts; "
        "the entry probability is effectively zero")


def collect_reach_samples(session: AccessSession, layering: Layering,
                          count: int, *, rng: np.random.Generator | None = None,
                          comp_cache: dict | None = None,
                          attempt_cap: int = DEFAULT_ATTEMPT_CAP,
                          second_hop: SecondHop = SecondHop.L2_ONLY) -> list[ReachSample]:
    rng = rng if rng is not None else session.rng
    dead: set[int] = set()
    cache = comp_cache if comp_cache is not None else {}
    return [reach_l2(session, layering, rng=rng, comp_cache=cache, dead=dead,
                     attempt_cap=attempt_cap, second_hop=second_hop)
            for _ in range(count)]


def sample_l1_forward_degrees(session: AccessSession, layering: Layering,
                              count: int, *,
                              rng: np.random.Generator | None = None) -> list[int]:
    """Forward degrees of ``count`` uniform L1 nodes (each queried)."""
    rng = rng if rng is not None else session.rng
    if not layering.l1:
        raise ValueError("the neighbor layer is empty")
    l0_set, l1_set = layering.l0_set, layering.l1_set
    out = []
    for _ in range(count):
        u = layering.l1[rng.integers(len(layering.l1))]
        nbrs = session.query(u).tolist()
        out.append(sum(1 for w in nbrs if w not in l0_set and w not in l1_set))
    return out


def periphery_size_from_samples(l1_size: int, d1_values: list[int],
                                samples: list[ReachSample]) -> PeripherySizeEstimate:
    """Pure combination step of the size estimator, exact in rationals."""
    if not d1_values or not samples:
        raise ValueError("need at least one sample on each side")
    d1_avg = Fraction(sum(d1_values), len(d1_values))
    num = Fraction(0)
    den = Fraction(0)
    for s in samples:
        num += Fraction(s.d_minus) / s.rs
        den += Fraction(1) / s.rs
    if d1_avg == 0:
        raise EstimationError(
            "sampled L1 nodes show no forward edges although the periphery "
            "was reached; the samples are inconsistent")
    if num == 0:
        raise EstimationError(
            "reached periphery nodes show no edges back to L1; increase the "
            "reach sample count")
    d2_avg = num / den
    return PeripherySizeEstimate(l2plus_size=Fraction(l1_size) * d1_avg / d2_avg,
                                 d1_plus_avg=d1_avg, d2_minus_avg=d2_avg,
                                 s1_used=len(d1_values), s2_used=len(samples))


def estimate_periphery_size(session: AccessSession, layering: Layering,
                            s1: int, s2: int, *,
                            rng: np.random.Generator | None = None,
                            comp_cache: dict | None = None,
                            attempt_cap: int = DEFAULT_ATTEMPT_CAP,
                            second_hop: SecondHop = SecondHop.L2_ONLY) -> PeripherySizeEstimate:
    """Draw both sample sets and combine them into a periphery size estimate."""
    if s1 < 1 or s2 < 1:
        raise ValueError("sample counts must be at least 1")
    rng = rng if rng is not None else session.rng
    d1_values = sample_l1_forward_degrees(session, layering, s1, rng=rng)
    samples = collect_reach_samples(session, layering, s2, rng=rng,
                                    comp_cache=comp_cache,
                                    attempt_cap=attempt_cap,
                                    second_hop=second_hop)
    return periphery_size_from_samples(len(layering.l1), d1_values, samples)


def estimate_baseline_reachability(samples: list[ReachSample],
                                   epsilon) -> Fraction:
    """Importance-corrected epsilon-quantile of the observed node scores.

    Reached nodes over-represent high-reachability components, so each
    sample is weighted by ``1/rs`` to recover the plain node distribution
    before taking the quantile.
    """
    if not samples:
        raise ValueError("no reach samples")
    if not (0 < epsilon < 1):
        raise ValueError("epsilon must lie strictly between 0 and 1")
    values = [s.rs for s in samples]
    weights = [Fraction(1) / s.rs for s in samples]
    return weighted_quantile(values, weights, epsilon)


def diagnostics(session: AccessSession, layering: Layering,
                samples: list[ReachSample], *, epsilon: float = 0.1,
                rs0: Fraction | None = None) -> LayeringDiagnostics:
    """Summarize the cost-governing structure visible in the reach samples."""
    if not samples:
        raise ValueError("no reach samples to diagnose")
    if rs0 is None:
        rs0 = estimate_baseline_reachability(samples, epsilon)
    inv = [Fraction(1) / s.rs for s in samples]
    total_inv = sum(inv)
    mu = float(sum(w * s.component_size for w, s in zip(inv, samples)) / total_inv)
    total_attempts = sum(s.attempts for s in samples)
    alpha = len(samples) / total_attempts
    rs_values = [s.rs for s in samples]
    seen: dict[tuple[int, ...], Component] = {}
    for s in samples:
        if s.component is not None:
            seen[s.component.nodes] = s.component
    d_bridge = max((c.bridge_count / c.size for c in seen.values()), default=0.0)
    mean_rs = sum(rs_values) / len(rs_values)
    return LayeringDiagnostics(mu=mu, alpha=alpha,
                               c_ratio=float(max(rs_values) / rs0),
                               w_expected=float(
                                   sum(s.component_size for s in samples) / len(samples)),
                               d_bridge=float(d_bridge),
                               c_rs=float(mean_rs / min(rs_values)))
