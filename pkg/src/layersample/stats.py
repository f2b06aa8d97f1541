"""Statistical verification primitives.

Empirical distance to uniformity, its simulated reference value for truly
uniform draws, an exact-variance collision test, and the weighted quantile
behind the baseline-reachability estimate.  Everything is pure and safe to
call from anywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def empirical_tv_to_uniform(samples, n: int) -> float:
    """Half the L1 distance between the sample histogram and uniform on n.

    For ``k = n`` truly uniform draws this concentrates near ``1/e``; the
    simulated reference from :func:`uniform_reference_tv` covers every
    ``(k, n)`` regime.
    """
    if n < 1:
        raise ValueError("support size must be at least 1")
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("no samples")
    if samples.min() < 0 or samples.max() >= n:
        raise ValueError("sample value outside the support 0..n-1")
    counts = np.bincount(samples, minlength=n)
    return 0.5 * float(np.abs(counts / samples.size - 1.0 / n).sum())


def uniform_reference_tv(k: int, n: int, trials: int = 20, rng=None) -> float:
    """Monte-Carlo mean of the empirical distance for truly uniform draws."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n == 1:
        return 0.0
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    acc = 0.0
    for _ in range(trials):
        counts = np.bincount(rng.integers(n, size=k), minlength=n)
        acc += 0.5 * float(np.abs(counts / k - 1.0 / n).sum())
    return acc / trials


def collision_count(samples, n: int) -> int:
    counts = np.bincount(np.asarray(samples), minlength=n).astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())


def collision_test(samples, n: int) -> float:
    """Z-score of the pairwise collision count against uniform sampling.

    For i.i.d. uniform draws the pair indicators are pairwise independent,
    so the variance is exactly ``C(k,2) * p * (1-p)`` with ``p = 1/n``; no
    Poisson approximation is involved, which matters at small n.
    """
    samples = np.asarray(samples)
    k = samples.size
    if k < 2:
        raise ValueError("need at least two samples to count collisions")
    c = collision_count(samples, n)
    pairs = k * (k - 1) / 2.0
    p = 1.0 / n
    mean = pairs * p
    var = pairs * p * (1.0 - p)
    if var == 0.0:
        return 0.0
    return (c - mean) / math.sqrt(var)


def weighted_quantile(values, weights, q):
    """Largest value whose strictly-below weight share does not exceed q.

    Ties in ``values`` are merged before scanning.  Works with exact
    rationals as well as floats; with constant weights it reduces to the
    plain empirical quantile under the same convention.
    """
    if len(values) == 0:
        raise ValueError("empty input")
    if len(values) != len(weights):
        raise ValueError("values and weights must have equal length")
    if not (0 < q < 1):
        raise ValueError("q must lie strictly between 0 and 1")
    merged: dict = {}
    for v, w in zip(values, weights):
        if w <= 0:
            raise ValueError("weights must be positive")
        merged[v] = merged.get(v, 0) + w
    total = sum(merged.values())
    threshold = q * total
    below = 0
    answer = None
    for v in sorted(merged):
        if below <= threshold:
            answer = v
        else:
            break
        below += merged[v]
    return answer


@dataclass
class UniformityReport:
    """Outcome of testing a sample set against the uniform distribution."""

    k: int
    n: int
    empirical_tv: float
    reference_tv: float
    collision_z: float
    zeta: float
    method: str
    passed: bool


def uniformity_report(samples, n: int, *, zeta: float, method: str = "tv",
                      rng=None, trials: int = 20) -> UniformityReport:
    """Evaluate samples with either the TV criterion or the collision test."""
    if method not in ("tv", "collisions"):
        raise ValueError(f"unknown method {method!r}")
    samples = np.asarray(samples)
    tv = empirical_tv_to_uniform(samples, n)
    ref = uniform_reference_tv(samples.size, n, trials=trials, rng=rng)
    z = collision_test(samples, n) if samples.size >= 2 else 0.0
    passed = abs(tv - ref) <= zeta if method == "tv" else z <= 3.0
    return UniformityReport(k=int(samples.size), n=n, empirical_tv=tv,
                            reference_tv=ref, collision_z=z, zeta=zeta,
                            method=method, passed=passed)
