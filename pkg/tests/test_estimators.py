from fractions import Fraction

import numpy as np
import pytest

from layersample import AccessSession, QueryModel, load_edge_list
from layersample.estimators import (EstimationError, PeripheryUnreachableError,
                                    ReachSample, collect_reach_samples,
                                    diagnostics, estimate_baseline_reachability,
                                    estimate_periphery_size,
                                    periphery_size_from_samples, reach_l2)
from layersample.generators import forest_fire, path, star
from layersample.layering import generate_l0

from conftest import small_graph_collection
from oracle import OracleDecomposition


def _layer(graph, v0, l0_size, model=QueryModel.STANDARD, seed=0):
    s = AccessSession(graph, model=model, seed=seed)
    return s, generate_l0(s, v0, l0_size, allow_partial=True)


def test_reach_star_distribution():
    s, lay = _layer(star(5), 1, 1, seed=7)
    rng = np.random.default_rng(7)
    counts = {v: 0 for v in (2, 3, 4, 5)}
    for _ in range(8000):
        got = reach_l2(s, lay, rng=rng)
        assert got.rs == Fraction(1, 4)
        assert got.component_size == 1
        counts[got.node] += 1
    for v in counts:
        assert abs(counts[v] / 8000 - 0.25) < 0.02


def test_reach_path_distribution():
    s, lay = _layer(path(4), 0, 1, seed=8)
    rng = np.random.default_rng(8)
    counts = {2: 0, 3: 0}
    for _ in range(8000):
        got = reach_l2(s, lay, rng=rng)
        assert got.rs == Fraction(1, 2)
        counts[got.node] += 1
    assert abs(counts[2] / 8000 - 0.5) < 0.02


def test_reach_unreachable_periphery_errors_fast():
    g = load_edge_list("0 1\n1 2\n0 2\n")
    s, lay = _layer(g, 0, 3)
    with pytest.raises(PeripheryUnreachableError):
        reach_l2(s, lay, rng=np.random.default_rng(0))
    # star covered up to its leaves: L1 exists but nothing lies beyond it
    s2, lay2 = _layer(star(5), 1, 2)
    with pytest.raises(PeripheryUnreachableError):
        reach_l2(s2, lay2, rng=np.random.default_rng(0))
    assert s2.query_count <= 6  # the dead-set exit, not the attempt cap


def test_estimate_star_exact_any_sample_sizes():
    for s1, s2 in ((1, 1), (3, 5), (10, 2)):
        s, lay = _layer(star(5), 1, 1, seed=s1 * 10 + s2)
        est = estimate_periphery_size(s, lay, s1, s2)
        assert est.l2plus_size == Fraction(4)
        assert est.d1_plus_avg == Fraction(4)
        assert est.d2_minus_avg == Fraction(1)


def test_estimate_path_balanced_samples_exact():
    s, lay = _layer(path(4), 0, 1)
    half = Fraction(1, 2)
    samples = [
        ReachSample(node=2, component_size=2, rs=half, d_minus=1),
        ReachSample(node=3, component_size=2, rs=half, d_minus=0),
    ]
    est = periphery_size_from_samples(1, [1], samples)
    assert est.d1_plus_avg == Fraction(1)
    assert est.d2_minus_avg == Fraction(1, 2)
    assert est.l2plus_size == Fraction(2)


def test_estimate_validation_and_inconsistency():
    with pytest.raises(ValueError):
        periphery_size_from_samples(1, [], [])
    sample = ReachSample(node=2, component_size=1, rs=Fraction(1, 4), d_minus=1)
    with pytest.raises(EstimationError):
        periphery_size_from_samples(1, [0, 0], [sample])
    interior = ReachSample(node=2, component_size=1, rs=Fraction(1, 4), d_minus=0)
    with pytest.raises(EstimationError):
        periphery_size_from_samples(1, [1], [interior])


def test_bipartite_identity_exact_on_collection():
    for name, g, v0, l0_size in small_graph_collection():
        s, lay = _layer(g, v0, l0_size, seed=4)
        oracle = OracleDecomposition(g, lay.l0)
        if not oracle.periphery:
            continue
        d1, d2 = oracle.degree_averages()
        assert d1 * len(oracle.l1) == d2 * len(oracle.periphery), name


def test_backward_ratio_identity_exact_on_collection():
    # the ratio-of-expectations identity behind the size estimator
    for name, g, v0, l0_size in small_graph_collection():
        for model in (QueryModel.STANDARD, QueryModel.DEGREE_REVEALING):
            s, lay = _layer(g, v0, l0_size, model=model, seed=4)
            oracle = OracleDecomposition(g, lay.l0)
            if not oracle.periphery:
                continue
            ratio = oracle.expected_backward_ratio(
                model is QueryModel.DEGREE_REVEALING)
            _, d2 = oracle.degree_averages()
            assert ratio == d2, (name, model)


def test_backward_estimate_converges_monte_carlo():
    g = forest_fire(150, 0.37, 0.3, seed=12)
    s, lay = _layer(g, 0, 8, seed=12)
    oracle = OracleDecomposition(g, lay.l0)
    if not oracle.periphery:
        pytest.skip("layering covered the whole graph")
    rng = np.random.default_rng(99)
    samples = collect_reach_samples(s, lay, 20_000, rng=rng)
    num = sum(float(s_.d_minus / s_.rs) for s_ in samples)
    den = sum(float(1 / s_.rs) for s_ in samples)
    estimate = num / den
    truth = float(oracle.degree_averages()[1])
    spread = np.std([float(s_.d_minus / s_.rs) for s_ in samples])
    stderr = spread / np.sqrt(len(samples)) / (den / len(samples))
    assert abs(estimate - truth) <= 3 * stderr + 1e-9


def test_baseline_reachability_quantiles():
    quarter = Fraction(1, 4)
    constant = [ReachSample(node=i, component_size=1, rs=quarter, d_minus=1)
                for i in range(5)]
    for eps in (0.01, 0.5, 0.99):
        assert estimate_baseline_reachability(constant, eps) == quarter

    mixed = [
        ReachSample(node=0, component_size=1, rs=Fraction(1), d_minus=1),
        ReachSample(node=1, component_size=1, rs=Fraction(1), d_minus=1),
        ReachSample(node=2, component_size=1, rs=Fraction(2), d_minus=1),
    ]
    assert estimate_baseline_reachability(mixed, 0.5) == Fraction(1)
    assert estimate_baseline_reachability(mixed, Fraction(1, 10 ** 9)) == Fraction(1)

    with pytest.raises(ValueError):
        estimate_baseline_reachability(mixed, 1.5)
    with pytest.raises(ValueError):
        estimate_baseline_reachability([], 0.5)


def test_diagnostics_star_and_path():
    s, lay = _layer(star(5), 1, 1, seed=3)
    samples = collect_reach_samples(s, lay, 50, rng=np.random.default_rng(3))
    d = diagnostics(s, lay, samples)
    assert d.mu == 1.0
    assert d.alpha == 1.0
    assert d.w_expected == 1.0
    assert d.d_bridge == 1.0
    assert d.c_ratio == 1.0
    assert d.c_rs == 1.0

    sp, layp = _layer(path(4), 0, 1, seed=3)
    dsamples = collect_reach_samples(sp, layp, 50, rng=np.random.default_rng(3))
    dp = diagnostics(sp, layp, dsamples)
    assert dp.mu == 2.0
    assert dp.alpha == 1.0
    assert dp.d_bridge == 0.5


def test_diagnostics_needs_samples():
    s, lay = _layer(star(5), 1, 1)
    with pytest.raises(ValueError):
        diagnostics(s, lay, [])
