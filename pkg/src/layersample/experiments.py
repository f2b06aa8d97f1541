"""Experiment drivers: amortized query-cost curves, component-size decay,
reachability histograms, size-estimator sweeps and the mixing-time scaling
run.  Each driver returns plain row dictionaries ready for CSV emission, so
runs are reproducible byte for byte under a fixed seed.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields as dataclass_fields
from fractions import Fraction

import numpy as np

from . import exact
from .estimators import (collect_reach_samples, diagnostics,
                         periphery_size_from_samples,
                         sample_l1_forward_degrees)
from .generators import forest_fire, lower_bound_graph, path, random_regular, star
from .graphs import (AccessSession, CountingMode, Graph, QueryModel,
                     load_edge_list)
from .layering import generate_l0, load_layering, save_layering
from .samplers import preprocess, sample_many
from .stats import weighted_quantile
from .walks import (Walker, calibrate_interval, default_calibration_plan,
                    rw_sample_many)

ALGORITHMS = ("samplayer", "samplayer+", "rej", "mh", "mh+")
DEGREE_REVEALING_ALGOS = ("samplayer+", "mh+")


class ConfigError(ValueError):
    """Bad or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    graph: str
    algorithm: str = "samplayer"
    l0: int = 0                     # 0 picks 2 percent of n
    s1: int = 3000
    s2: int = 200
    epsilon: float = 0.02
    samples: int = 1000
    seed: int = 0
    counting: str = "cached"
    interval: int = 0               # 0 means calibrate
    calibrate: str = "tv"
    zeta: float = 0.01
    walks: int = 0                  # 0 means the default plan
    v0: int = 0
    repetitions: int = 5
    out: str = ""
    layering_in: str = ""
    layering_out: str = ""

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}, "
                              f"expected one of {ALGORITHMS}")
        if self.counting not in ("cached", "uncached"):
            raise ConfigError(f"counting must be cached or uncached, "
                              f"got {self.counting!r}")
        if self.calibrate not in ("tv", "collisions"):
            raise ConfigError(f"calibrate must be tv or collisions, "
                              f"got {self.calibrate!r}")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if not (0 < self.epsilon < 1):
            raise ConfigError("epsilon must lie strictly between 0 and 1")

    @property
    def model(self) -> QueryModel:
        if self.algorithm in DEGREE_REVEALING_ALGOS:
            return QueryModel.DEGREE_REVEALING
        return QueryModel.STANDARD

    @property
    def counting_mode(self) -> CountingMode:
        return CountingMode.CACHED if self.counting == "cached" else CountingMode.UNCACHED


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    known = {f.name: f.type for f in dataclass_fields(ExperimentConfig)}
    kwargs = {}
    for key, value in mapping.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(ExperimentConfig, name, None)
        target = type(current) if current is not None else str
        if name == "graph" or target is str:
            kwargs[name] = str(value)
        elif target is float:
            kwargs[name] = float(value)
        else:
            kwargs[name] = int(value)
    if "graph" not in kwargs:
        raise ConfigError("config needs a graph source")
    cfg = ExperimentConfig(**kwargs)
    cfg.validate()
    return cfg


def parse_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` text, ``#`` comments allowed."""
    mapping: dict[str, str] = {}
    with open(path, "rt") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, sep, value = stripped.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key=value")
            mapping[key.strip()] = value.strip()
    return mapping


def make_graph(spec: str, seed=None) -> Graph:
    """Build or load a graph from a compact source spec.

    ``ff:n=10000,pf=0.37,pb=0.3``, ``lb:n=20000,t=50[,deg=3][,kind=star]``,
    ``star:k=5``, ``path:k=4``, ``rr:n=1000,d=10`` or ``file:PATH`` (a bare
    path works too).
    """
    kind, sep, rest = spec.partition(":")
    if not sep:
        return load_edge_list(spec)
    if kind == "file":
        return load_edge_list(rest)
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"bad graph parameter {item!r} in {spec!r}")
            params[key.strip()] = value.strip()
    try:
        if kind == "ff":
            return forest_fire(int(params["n"]), float(params.get("pf", 0.37)),
                               float(params.get("pb", 0.3)), seed=seed)
        if kind == "lb":
            return lower_bound_graph(int(params["n"]), int(params["t"]),
                                     core_degree=int(params.get("deg", 3)),
                                     component_kind=params.get("kind", "star"),
                                     seed=seed)
        if kind == "star":
            return star(int(params["k"]))
        if kind == "path":
            return path(int(params["k"]))
        if kind == "rr":
            return random_regular(int(params["n"]), int(params["d"]), seed=seed)
    except KeyError as missing:
        raise ConfigError(f"graph spec {spec!r} is missing {missing}") from None
    raise ConfigError(f"unknown graph kind {kind!r}")


def default_l0(graph: Graph) -> int:
    return max(2, graph.node_count // 50)


def write_csv(rows: list[dict], destination) -> None:
    """Write rows with a header; field order follows the first row."""
    if not rows:
        raise ValueError("no rows to write")
    fieldnames = list(rows[0].keys())
    own = isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__")
    fh = open(destination, "wt", newline="") if own else destination
    try:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if own:
            fh.close()


def rows_to_csv_bytes(rows: list[dict]) -> bytes:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue().encode()


# ---- amortized query complexity -------------------------------------------


def run_amortized_qc(config: ExperimentConfig, graph: Graph | None = None):
    """Per-sample amortized query cost for the configured algorithm.

    Returns ``(rows, summary)``.  Rows carry both the folded series (fixed
    preprocessing cost included, the way the headline curves are drawn) and
    the sampling-only series.
    """
    config.validate()
    if graph is None:
        graph = make_graph(config.graph, seed=config.seed)
    session = AccessSession(graph, model=config.model,
                            counting=config.counting_mode, seed=config.seed)
    experiment = f"{config.algorithm}-seed{config.seed}"
    if config.algorithm in ("samplayer", "samplayer+"):
        return _qc_layer_sampler(config, graph, session, experiment)
    return _qc_walker(config, graph, session, experiment)


def _qc_layer_sampler(config, graph, session, experiment):
    l0_size = config.l0 or default_l0(graph)
    prebuilt = load_layering(config.layering_in) if config.layering_in else None
    handle = preprocess(session, config.v0, l0_size=l0_size, s1=config.s1,
                        s2=config.s2, epsilon=config.epsilon,
                        layering=prebuilt)
    if config.layering_out:
        save_layering(handle.layering, config.layering_out)
    run = sample_many(handle, session, config.samples)
    folded = run.amortized(include_preprocessing=True)
    separated = run.amortized(include_preprocessing=False)
    rows = []
    for i, trace in enumerate(run.traces):
        total = handle.preprocessing_queries + int(run.cumulative_queries[i])
        rows.append({
            "experiment": experiment,
            "sample_index": i + 1,
            "node": trace.node,
            "layer": trace.layer.value,
            "cumulative_queries": total,
            "amortized_qps": float(folded[i]),
            "sampling_queries": int(run.cumulative_queries[i]),
            "sampling_amortized": float(separated[i]),
        })
    summary = {
        "experiment": experiment,
        "node_count": graph.node_count,
        "preprocessing_queries": handle.preprocessing_queries,
        "total_queries": handle.preprocessing_queries
        + int(run.cumulative_queries[-1]),
        "session_query_count": session.query_count,
        "distinct_queried": session.distinct_queried(),
        "interval": None,
        "n_bar": float(handle.n_bar),
        "rs0": float(handle.rs0) if handle.rs0 is not None else None,
    }
    return rows, summary


def _qc_walker(config, graph, session, experiment):
    kind = Walker(config.algorithm)
    interval = config.interval
    if interval <= 0:
        walks = config.walks or default_calibration_plan(graph, config.zeta)[1]
        calib = calibrate_interval(graph, kind, walks=walks, zeta=config.zeta,
                                   method=config.calibrate, seed=config.seed)
        interval = calib.interval
    rng = np.random.default_rng(config.seed + 1)
    run = rw_sample_many(session, kind, config.v0, config.samples, interval,
                         rng=rng)
    rows = []
    for i in range(run.samples.size):
        cum = int(run.cumulative_queries[i])
        rows.append({
            "experiment": experiment,
            "sample_index": i + 1,
            "node": int(run.samples[i]),
            "layer": "",
            "cumulative_queries": cum,
            "amortized_qps": cum / (i + 1),
            "sampling_queries": cum,
            "sampling_amortized": cum / (i + 1),
        })
    summary = {
        "experiment": experiment,
        "node_count": graph.node_count,
        "preprocessing_queries": 0,
        "total_queries": int(run.cumulative_queries[-1]),
        "session_query_count": session.query_count,
        "distinct_queried": session.distinct_queried(),
        "interval": interval,
        "total_steps": run.total_steps,
    }
    return rows, summary


# ---- component-size decay ---------------------------------------------------


def run_mu_vs_l0(graph: Graph, l0_grid, *, seeds: int = 5, v0: int = 0,
                 model: QueryModel = QueryModel.STANDARD, base_seed: int = 0):
    """Exact node-weighted mean component size for each base-layer size.

    The layering is grown through the oracle; the component statistics are
    harness-level exact values from the full decomposition.
    """
    if not l0_grid:
        raise ValueError("the l0 grid is empty")
    rows = []
    for l0_size in l0_grid:
        for s in range(seeds):
            session = AccessSession(graph, model=model,
                                    seed=base_seed * 1000 + s)
            layering = generate_l0(session, v0, int(l0_size), allow_partial=True)
            tp = exact.decompose(graph, layering.l0)
            rows.append({
                "l0_size": int(l0_size),
                "seed": s,
                "mu": tp.mu(),
                "periphery_size": tp.l2plus_size,
                "periphery_empty": int(tp.l2plus_size == 0),
            })
    return rows


# ---- reachability histogram -------------------------------------------------


def run_reach_hist(config: ExperimentConfig, graph: Graph | None = None,
                   bins: int = 30, with_diagnostics: bool = False):
    """Importance-weighted histogram of observed node reachabilities.

    Emits the full view plus one with the top 3 percent of the weighted
    reachability mass trimmed away, which is how the thin upper tail is
    usually hidden for display.  With ``with_diagnostics`` the return value
    is ``(rows, diagnostics_mapping)``.
    """
    config.validate()
    if graph is None:
        graph = make_graph(config.graph, seed=config.seed)
    session = AccessSession(graph, model=config.model, seed=config.seed)
    l0_size = config.l0 or default_l0(graph)
    layering = generate_l0(session, config.v0, l0_size, allow_partial=True)
    samples = collect_reach_samples(session, layering, config.s2)
    values = np.asarray([float(s.rs) for s in samples])
    weights = np.asarray([1.0 / float(s.rs) for s in samples])
    weights /= weights.sum()
    rows = []
    for view, (vals, wts) in (
            ("full", (values, weights)),
            ("trimmed97", _trim_top(samples, 0.97))):
        if vals.size == 0:
            continue
        hist, edges = np.histogram(vals, bins=bins, weights=wts)
        counts, _ = np.histogram(vals, bins=bins)
        for b in range(hist.size):
            rows.append({
                "view": view,
                "bin_left": float(edges[b]),
                "bin_right": float(edges[b + 1]),
                "weight_share": float(hist[b]),
                "samples_in_bin": int(counts[b]),
            })
    if not with_diagnostics:
        return rows
    diag = diagnostics(session, layering, samples, epsilon=config.epsilon)
    mapping = {
        "mu": diag.mu,
        "alpha": diag.alpha,
        "c_ratio": diag.c_ratio,
        "w_expected": diag.w_expected,
        "d_bridge": diag.d_bridge,
        "c_rs": diag.c_rs,
        "l2plus_estimate": float(
            periphery_size_from_samples(
                len(layering.l1),
                sample_l1_forward_degrees(session, layering, config.s1),
                samples).l2plus_size),
    }
    return rows, mapping


def _trim_top(samples, keep_quantile):
    values = [s.rs for s in samples]
    weights = [Fraction(1) / s.rs for s in samples]
    cutoff = weighted_quantile(values, weights, keep_quantile)
    kept = [(float(v), float(w)) for v, w in zip(values, weights) if v <= cutoff]
    vals = np.asarray([v for v, _ in kept])
    wts = np.asarray([w for _, w in kept])
    if wts.size:
        wts /= wts.sum()
    return vals, wts


# ---- size-estimator sweeps ----------------------------------------------------


def run_size_error(graph: Graph, *, v0: int = 0, l0_size: int, s1_grid,
                   s2_grid, repetitions: int = 5, seed: int = 0,
                   model: QueryModel = QueryModel.STANDARD):
    """Error of the periphery-size estimate under two one-variable sweeps.

    One sweep varies how many neighbor-layer nodes back the forward
    average, holding the backward average at its exact value; the other
    does the opposite.  Ground truth comes from the full decomposition.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    if not s1_grid and not s2_grid:
        raise ValueError("both sweep grids are empty")
    session = AccessSession(graph, model=model, seed=seed)
    layering = generate_l0(session, v0, l0_size, allow_partial=True)
    tp = exact.decompose(graph, layering.l0)
    truth = tp.l2plus_size
    if truth == 0:
        raise ValueError("the periphery is empty, nothing to estimate")
    d1_exact, d2_exact = exact.degree_averages(graph, tp)
    l1_size = len(layering.l1)
    rows = []
    cache: dict = {}
    for value in s1_grid:
        for rep in range(repetitions):
            rng = np.random.default_rng((seed, 1, int(value), rep))
            d1_values = sample_l1_forward_degrees(session, layering, int(value),
                                                  rng=rng)
            d1 = Fraction(sum(d1_values), len(d1_values))
            estimate = float(Fraction(l1_size) * d1 / d2_exact)
            rows.append(_size_error_row("s1", value, rep, estimate, truth))
    for value in s2_grid:
        for rep in range(repetitions):
            rng = np.random.default_rng((seed, 2, int(value), rep))
            samples = collect_reach_samples(session, layering, int(value),
                                            rng=rng, comp_cache=cache)
            num = sum(Fraction(s.d_minus) / s.rs for s in samples)
            den = sum(Fraction(1) / s.rs for s in samples)
            if num == 0:
                estimate = float("inf")
            else:
                estimate = float(Fraction(l1_size) * d1_exact / (num / den))
            rows.append(_size_error_row("s2", value, rep, estimate, truth))
    return rows


def _size_error_row(sweep, value, rep, estimate, truth):
    return {
        "sweep": sweep,
        "value": int(value),
        "rep": rep,
        "estimate": estimate,
        "truth": truth,
        "error_pct": abs(estimate - truth) / truth * 100.0,
    }


# ---- lower-bound scaling ------------------------------------------------------


def run_lb_scaling(n: int, t_grid, num_samples: int, *, seed: int = 0,
                   l0_size: int | None = None, s1: int = 500, s2: int = 100,
                   epsilon: float = 0.05, zeta: float = 0.01,
                   core_degree: int = 3, component_kind: str = "star",
                   walks: int | None = None):
    """Walker cost versus the layered sampler on the bridge-heavy construction.

    For each component scale ``t`` the walker interval is recalibrated, so
    its per-sample cost tracks the mixing time, while the layered sampler
    pays each satellite component once.  The walker is reported in both
    counting modes; uncached counting equals walk length and is the measure
    the scaling argument is about.

    Calibration starts are fixed structural positions (one core node plus
    three satellite-interior nodes) rather than random draws: the satellite
    starts are the ones that actually expose the mixing time, and pinning
    them keeps the max-over-starts interval stable across the grid.
    """
    rows = []
    for t in t_grid:
        t = int(t)
        graph = lower_bound_graph(n, t, core_degree=core_degree,
                                  component_kind=component_kind,
                                  seed=seed + t)
        k = walks or min(n, 100_000)
        core_size = n // 2
        ell = n // (2 * t)
        starts = [0, core_size + 1, core_size + (ell // 2) * t,
                  core_size + (ell - 1) * t + 1]
        calib = calibrate_interval(graph, Walker.REJ, walks=k, zeta=zeta,
                                   method="tv", seed=seed, starts=starts)
        for counting in (CountingMode.UNCACHED, CountingMode.CACHED):
            session = AccessSession(graph, counting=counting, seed=seed)
            run = rw_sample_many(session, Walker.REJ, 0, num_samples,
                                 calib.interval,
                                 rng=np.random.default_rng(seed + 7))
            rows.append({
                "t": int(t),
                "algorithm": "rej",
                "counting": counting.value,
                "interval": calib.interval,
                "preprocessing_queries": 0,
                "total_queries": int(run.cumulative_queries[-1]),
                "queries_per_sample": float(run.cumulative_queries[-1]) / num_samples,
            })
        session = AccessSession(graph, seed=seed + 13)
        handle = preprocess(session, 0, l0_size=l0_size or (n // 4),
                            s1=s1, s2=s2, epsilon=epsilon)
        run = sample_many(handle, session, num_samples)
        total = handle.preprocessing_queries + int(run.cumulative_queries[-1])
        rows.append({
            "t": int(t),
            "algorithm": "samplayer",
            "counting": "cached",
            "interval": 0,
            "preprocessing_queries": handle.preprocessing_queries,
            "total_queries": total,
            "queries_per_sample": total / num_samples,
        })
    return rows
