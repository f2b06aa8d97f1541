"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdicts as
they happen.  The minutes-long runs are marked ``slow`` and can be skipped
with ``--skip-slow`` during development; the full suite runs them.
"""
from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps

from layersample import AccessSession, CountingMode, QueryModel
from layersample.estimators import (collect_reach_samples, diagnostics,
                                    reach_attempt,
                                    sample_l1_forward_degrees)
from layersample.layering import (comp_reachability_plus, comp_reachability_sl,
                                  component_bfs, generate_l0)
from layersample.samplers import preprocess, sample_many
from layersample.stats import empirical_tv_to_uniform, uniform_reference_tv
from layersample.walks import Walker, calibrate_interval, rw_sample_many
from layersample.experiments import (ExperimentConfig, rows_to_csv_bytes,
                                     run_amortized_qc, run_lb_scaling,
                                     run_mu_vs_l0)

from oracle import OracleDecomposition

# operating point tuned for the FF(100k) benchmark graph; the plus model
# affords a larger base layer because true-degree growth builds a better one
FF_SEED = 42
SL_PARAMS = dict(l0_size=2500, s1=3000, s2=200, epsilon=0.02)
SLP_PARAMS = dict(l0_size=5000, s1=1000, s2=100, epsilon=0.02)


def _verdict(num: int, name: str, passed: bool, detail: str) -> None:
    tag = "PASS" if passed else "FAIL"
    print(f"\nACCEPTANCE {num} [{tag}] {name}: {detail}")


def _collection_layerings(small_collection, model, seed=17):
    for name, graph, v0, l0_size in small_collection:
        session = AccessSession(graph, model=model, seed=seed)
        layering = generate_l0(session, v0, l0_size, allow_partial=True)
        yield name, graph, session, layering


def test_criterion_1_exact_uniformity(small_collection):
    """Brute-force enumeration gives exactly 1/n per node under exact inputs."""
    worst = Fraction(0)
    graphs = 0
    for model in (QueryModel.STANDARD, QueryModel.DEGREE_REVEALING):
        plus = model is QueryModel.DEGREE_REVEALING
        for name, graph, session, layering in _collection_layerings(
                small_collection, model):
            oracle = OracleDecomposition(graph, layering.l0)
            assert oracle.l1 == layering.l1_set, name
            # the library's component scores must equal the enumerated ones
            hits = oracle.component_hit_probabilities(plus)
            denom = oracle.plus_total if plus else oracle.edge_total
            cache: dict = {}
            for idx, comp_nodes in enumerate(oracle.components):
                entry = next(v for v in comp_nodes if v in oracle.direct)
                comp = component_bfs(session, layering, entry, cache)
                rs = (comp_reachability_plus(comp) if plus else
                      comp_reachability_sl(session, layering, comp))
                assert rs == hits[idx] * denom, (name, idx)
            rs0 = oracle.min_score(plus)
            probs = oracle.sampler_distribution(
                plus, len(oracle.periphery), rs0 if rs0 is not None else 1)
            target = Fraction(1, graph.node_count)
            assert sum(probs.values()) == 1
            for v, p in probs.items():
                worst = max(worst, abs(p - target))
                assert abs(p - target) <= Fraction(1, 10 ** 9), (name, model, v)
            graphs += 1
    _verdict(1, "exact uniformity", True,
             f"{graphs} graph/model pairs, max |P - 1/n| = {float(worst):.2e}")


def test_criterion_2_distribution_bound(small_collection):
    """Percentile baseline plus injected size error stays under the bound."""
    eps = Fraction(1, 10)
    delta = Fraction(1, 20)
    bound_factor = 1 + eps + delta + 2 * (eps + delta) ** 2
    worst_ratio = 0.0
    checks = 0
    for model in (QueryModel.STANDARD, QueryModel.DEGREE_REVEALING):
        plus = model is QueryModel.DEGREE_REVEALING
        for name, graph, session, layering in _collection_layerings(
                small_collection, model):
            oracle = OracleDecomposition(graph, layering.l0)
            exact_size = len(oracle.periphery)
            if exact_size:
                rs0 = oracle.score_percentile(plus, eps)
            else:
                rs0 = Fraction(1)
            n = graph.node_count
            for sign in (1, -1):
                ell_bar = (1 + sign * delta) * Fraction(exact_size)
                probs = oracle.sampler_distribution(plus, ell_bar, rs0)
                max_p = max(probs.values())
                bound = bound_factor / n
                worst_ratio = max(worst_ratio, float(max_p / bound))
                assert max_p <= bound, (name, model, sign)
                checks += 1
    _verdict(2, "near-uniformity bound", True,
             f"{checks} checks, max P relative to bound = {worst_ratio:.3f}")


@pytest.mark.slow
def test_criterion_3_empirical_uniformity_at_scale(ff100k):
    """TV distance of n sampler draws sits at the uniform reference."""
    g = ff100k
    n = g.node_count
    session = AccessSession(g, seed=7)
    handle = preprocess(session, 0, **SL_PARAMS)
    t0 = time.time()
    run = sample_many(handle, session, n)
    nodes = np.asarray([t.node for t in run.traces])
    tv = empirical_tv_to_uniform(nodes, n)
    ref = uniform_reference_tv(n, n, trials=10, rng=1)
    diff = abs(tv - ref)
    passed = diff <= 0.01
    _verdict(3, "empirical uniformity at scale", passed,
             f"tv={tv:.4f} reference={ref:.4f} |diff|={diff:.4f} "
             f"(threshold 0.01, {time.time() - t0:.0f}s for {n} draws)")
    assert passed


@pytest.mark.slow
def test_criterion_4_size_estimator_convergence(ff100k):
    """Median periphery-size error over 10 seeded runs at s1=3000, s2=200.

    This criterion pins the sample sizes; on this graph family the weighted
    backward-degree estimate is far noisier than on the real social
    networks the sample sizes were quoted for, and the 5 percent target is
    not attainable.  The run is reported honestly rather than retuned.
    """
    g = ff100k
    errors = []
    d1_side = []
    for run in range(10):
        session = AccessSession(g, seed=100 + run)
        handle = preprocess(session, 0, **SL_PARAMS)
        truth = g.node_count - len(handle.layering.l0) - len(handle.layering.l1)
        err = abs(float(handle.estimate.l2plus_size) - truth) / truth
        errors.append(err)
        # forward-degree side alone, backward average held at its exact value
        d1v = sample_l1_forward_degrees(
            session, handle.layering, SL_PARAMS["s1"],
            rng=np.random.default_rng(run))
        exact_d2 = _exact_backward_average(g, handle.layering)
        est = len(handle.layering.l1) * np.mean(d1v) / exact_d2
        d1_side.append(abs(est - truth) / truth)
    median = float(np.median(errors))
    passed = median <= 0.05
    _verdict(4, "size-estimator convergence", passed,
             f"median error {median * 100:.1f}% over 10 runs "
             f"(threshold 5%); per-run: "
             + " ".join(f"{e * 100:.1f}" for e in sorted(errors))
             + f"; forward-side-only median {np.median(d1_side) * 100:.1f}%")
    # the forward sweep at its top value converges as the curve implies
    assert float(np.median(d1_side)) <= 0.05
    if not passed:
        pytest.fail(
            "size estimate at the pinned sample sizes (s1=3000, s2=200) has "
            f"median error {median * 100:.1f}% on forest-fire graphs at this "
            "scale. The backward-degree estimate is importance-weighted by "
            "1/rs and the reachability spread here puts its standard error "
            "near 20% at 200 samples (the theory scales the needed sample "
            "count with that spread; roughly 1500+ samples would be needed "
            "for 5%). The forward side alone converges as required; see the "
            "decisions ledger for the full analysis.")


def _exact_backward_average(graph, layering):
    total = 0
    count = 0
    for v in range(graph.node_count):
        if v in layering.l0_set or v in layering.l1_set:
            continue
        total += sum(1 for w in graph.neighbors(v).tolist()
                     if w in layering.l1_set)
        count += 1
    return total / count


@pytest.mark.slow
def test_criterion_5_query_complexity_improvement(ff100k):
    """Layered samplers beat their walker analogues on folded amortized cost."""
    g = ff100k
    n = g.node_count
    num = n // 100

    session = AccessSession(g, seed=7)
    handle = preprocess(session, 0, **SL_PARAMS)
    run = sample_many(handle, session, num)
    sl = (handle.preprocessing_queries + int(run.cumulative_queries[-1])) / num

    cal_rej = calibrate_interval(g, Walker.REJ, walks=n, zeta=0.03, seed=5,
                                 num_starts=3)
    rej = {}
    for mode in (CountingMode.CACHED, CountingMode.UNCACHED):
        s = AccessSession(g, counting=mode, seed=8)
        r = rw_sample_many(s, Walker.REJ, 0, num, cal_rej.interval,
                           rng=np.random.default_rng(8))
        rej[mode] = int(r.cumulative_queries[-1]) / num

    sp = AccessSession(g, model=QueryModel.DEGREE_REVEALING, seed=9)
    hp = preprocess(sp, 0, **SLP_PARAMS)
    runp = sample_many(hp, sp, num)
    slp = (hp.preprocessing_queries + int(runp.cumulative_queries[-1])) / num

    cal_mh = calibrate_interval(g, Walker.MH, walks=n, zeta=0.03, seed=5,
                                num_starts=3)
    mhp = {}
    for mode in (CountingMode.CACHED, CountingMode.UNCACHED):
        s = AccessSession(g, model=QueryModel.DEGREE_REVEALING, counting=mode,
                          seed=10)
        r = rw_sample_many(s, Walker.MH_PLUS, 0, num, cal_mh.interval,
                           rng=np.random.default_rng(10))
        mhp[mode] = int(r.cumulative_queries[-1]) / num

    ratio_sl = sl / rej[CountingMode.CACHED]
    ratio_slp = slp / mhp[CountingMode.CACHED]
    passed = ratio_sl <= 0.7 and ratio_slp <= 0.5
    _verdict(5, "query-complexity improvement", passed,
             f"samplayer {sl:.1f}/sample vs rej {rej[CountingMode.CACHED]:.1f} "
             f"(ratio {ratio_sl:.2f}, need <=0.70); "
             f"samplayer+ {slp:.1f} vs mh+ {mhp[CountingMode.CACHED]:.1f} "
             f"(ratio {ratio_slp:.2f}, need <=0.50); intervals "
             f"rej={cal_rej.interval} mh={cal_mh.interval}; uncached walker "
             f"costs (informational): rej {rej[CountingMode.UNCACHED]:.0f}, "
             f"mh+ {mhp[CountingMode.UNCACHED]:.0f}")
    assert passed


@pytest.mark.slow
def test_criterion_6_lower_bound_scaling():
    """Walker cost grows with the component scale; the layered sampler's does not."""
    t_grid = [25, 50, 100]
    rows = run_lb_scaling(20000, t_grid, 2000, seed=0, l0_size=5000,
                          s1=500, s2=100, zeta=0.01)
    rej = {r["t"]: r["queries_per_sample"] for r in rows
           if r["algorithm"] == "rej" and r["counting"] == "uncached"}
    layer = {r["t"]: r["queries_per_sample"] for r in rows
             if r["algorithm"] == "samplayer"}
    ratios = [rej[b] / rej[a] for a, b in zip(t_grid, t_grid[1:])]
    spread = max(layer.values()) / min(layer.values())
    passed = all(r >= 1.6 for r in ratios) and spread <= 1.3
    _verdict(6, "mixing-time scaling", passed,
             f"rej uncached per-sample {[round(rej[t], 1) for t in t_grid]} "
             f"consecutive ratios {[round(r, 2) for r in ratios]} (need >=1.6); "
             f"samplayer per-sample {[round(layer[t], 2) for t in t_grid]} "
             f"spread {spread:.2f} (need <=1.3)")
    assert passed


@pytest.mark.slow
def test_criterion_7_component_size_decay(ff10k):
    """Mean component size falls monotonically as the base layer grows."""
    grid = [100, 200, 400, 800, 1200, 1600, 2400, 3000]
    rows = run_mu_vs_l0(ff10k, grid, seeds=5, base_seed=3)
    means = []
    for l0_size in grid:
        vals = [r["mu"] for r in rows if r["l0_size"] == l0_size]
        means.append(float(np.mean(vals)))
    rho = float(sps.spearmanr(grid, means).statistic)
    passed = rho < -0.8
    _verdict(7, "component-size decay", passed,
             f"mu over grid {[round(m, 2) for m in means]}, spearman {rho:.3f} "
             "(need < -0.8)")
    assert passed


@pytest.mark.slow
def test_criterion_8_reach_frequency_agreement(small_collection):
    """Observed component hit rates match the reachability scores.

    Each component's frequency is a binomial estimate, so over thousands of
    components a few legitimately exceed three standard errors; the share
    inside three is checked at its statistical rate and a hard ceiling
    catches real biases.
    """
    attempts = 1_000_000
    all_z = []
    per_graph = []
    for model in (QueryModel.STANDARD, QueryModel.DEGREE_REVEALING):
        plus = model is QueryModel.DEGREE_REVEALING
        for name, graph, session, layering in _collection_layerings(
                small_collection, model, seed=29):
            oracle = OracleDecomposition(graph, layering.l0)
            if not oracle.periphery:
                continue
            hits = oracle.component_hit_probabilities(plus)
            rng = np.random.default_rng(hash((name, plus)) % (2 ** 31))
            counts = np.zeros(len(oracle.components), dtype=np.int64)
            t0 = time.time()
            for _ in range(attempts):
                _, landing = reach_attempt(session, layering, rng)
                if landing is not None:
                    counts[oracle.comp_of[landing]] += 1
            zs = []
            for idx, p in enumerate(hits):
                p = float(p)
                se = np.sqrt(p * (1 - p) / attempts)
                zs.append(abs(counts[idx] / attempts - p) / se if se else 0.0)
            all_z.extend(zs)
            per_graph.append((name, plus, max(zs), time.time() - t0))
    all_z = np.asarray(all_z)
    share_in = float((all_z <= 3.0).mean())
    passed = share_in >= 0.995 and all_z.max() <= 4.5
    slowest = max(per_graph, key=lambda g: g[3])
    _verdict(8, "reach frequency agreement", passed,
             f"{all_z.size} components over {len(per_graph)} graph/model "
             f"pairs; share within 3 SE {share_in:.4f} (need >=0.995), "
             f"max z {all_z.max():.2f} (ceiling 4.5); slowest graph "
             f"{slowest[0]} took {slowest[3]:.1f}s")
    assert passed


def test_criterion_9_accounting_invariants(tmp_path):
    """Cached counts, CSV accounting and byte-level reproducibility."""
    cfg = ExperimentConfig(graph="ff:n=2000", algorithm="samplayer", l0=60,
                           s1=40, s2=30, epsilon=0.1, samples=200, seed=11)
    rows_a, summary_a = run_amortized_qc(cfg)
    rows_b, summary_b = run_amortized_qc(cfg)
    identical = rows_to_csv_bytes(rows_a) == rows_to_csv_bytes(rows_b)

    # a session that never resets bills exactly its distinct queried nodes
    from layersample.experiments import make_graph
    g = make_graph("ff:n=2000", seed=11)
    session = AccessSession(g, seed=12)
    layering = generate_l0(session, 0, 60)
    collect_reach_samples(session, layering, 50)
    walker = AccessSession(g, seed=13)
    rw_sample_many(walker, Walker.MH, 0, 100, 7)
    cached_ok = (session.query_count == session.distinct_queried()
                 and walker.query_count == walker.distinct_queried())

    csv_ok = (rows_a[-1]["sampling_queries"] == summary_a["session_query_count"]
              and all(r["amortized_qps"] == r["cumulative_queries"] / r["sample_index"]
                      for r in rows_a))
    wcfg = ExperimentConfig(graph="ff:n=2000", algorithm="rej", samples=50,
                            interval=5, seed=11)
    wrows, wsummary = run_amortized_qc(wcfg)
    csv_ok = csv_ok and wrows[-1]["cumulative_queries"] == wsummary["session_query_count"]

    passed = identical and cached_ok and csv_ok
    _verdict(9, "accounting invariants", passed,
             f"deterministic CSV: {identical}; cached=distinct: {cached_ok}; "
             f"CSV totals equal session counts: {csv_ok}")
    assert passed


@pytest.mark.slow
def test_cost_bound_constant_report(ff10k):
    """Informational: implied constant of the per-sample cost bound."""
    g = ff10k
    session = AccessSession(g, seed=31)
    layering = generate_l0(session, 0, 400)
    cache: dict = {}
    samples = collect_reach_samples(session, layering, 300, comp_cache=cache)
    diag = diagnostics(session, layering, samples, epsilon=0.02)
    handle = preprocess(AccessSession(g, seed=31), 0, l0_size=400, s1=300,
                        s2=100, epsilon=0.02)
    fresh = AccessSession(g, seed=33)
    fresh_handle = preprocess(fresh, 0, l0_size=400, s1=300, s2=100,
                              epsilon=0.02)
    run = sample_many(fresh_handle, fresh, 2000)
    periphery_costs = [t.queries_spent for t in run.traces
                       if t.layer.value == "periphery"]
    measured = float(np.mean(periphery_costs)) if periphery_costs else 0.0
    shape = 1.0 / diag.alpha + diag.w_expected * max(diag.d_bridge, 1.0)
    # literal c (max score over baseline) is blown up by a thin upper tail
    # of very reachable components, so the trimmed spread is also shown
    from layersample.stats import weighted_quantile
    trimmed_c = float(weighted_quantile(
        [s.rs for s in samples], [1 / s.rs for s in samples], 0.97)
        / min(s.rs for s in samples))
    _verdict(0, "cost-bound constant (informational)", True,
             f"mean periphery cost {measured:.2f} queries/sample; shape "
             f"(1/alpha + w*d) = {shape:.2f} with alpha={diag.alpha:.2f}, "
             f"w={diag.w_expected:.2f}, d={diag.d_bridge:.2f}; score spread "
             f"c={diag.c_ratio:.0f} (max-based), {trimmed_c:.1f} (97% trimmed); "
             f"implied constant {measured / (trimmed_c * shape):.4f} at the "
             f"trimmed spread")
