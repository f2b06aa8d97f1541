"""Query-budgeted uniform node sampling over layered graph decompositions.

The package splits a network, seen only through a neighbor-query oracle,
into a greedily grown base layer, its neighbors, and a periphery of small
components, then samples near-uniform nodes at a per-sample query cost that
does not track the mixing time of random walks.  Walk-based samplers and
statistical verification tools are included for comparison experiments.
"""
from .graphs import (AccessSession, CountingMode, Graph, GraphParseError,
                     QueryModel, from_edges, load_edge_list, save_edge_list)
from .generators import forest_fire, lower_bound_graph, path, random_regular, star
from .layering import (Component, Layer, Layering, SecondHop, classify,
                       comp_reachability_plus, comp_reachability_sl,
                       component_bfs, generate_l0, generate_l0_plus,
                       generate_l0_sl, load_layering, save_layering)
from .estimators import (EstimationError, LayeringDiagnostics,
                         PeripherySizeEstimate, PeripheryUnreachableError,
                         ReachSample, collect_reach_samples, diagnostics,
                         estimate_baseline_reachability,
                         estimate_periphery_size, periphery_size_from_samples,
                         reach_l2)
from .samplers import (SampleRun, SampleTrace, SamplerHandle, make_handle,
                       preprocess, sample, sample_many)
from .walks import (CalibrationError, IntervalCalibration, Walker,
                    calibrate_interval, default_calibration_plan,
                    rw_sample_many, walk_step)
from .stats import (UniformityReport, collision_test, empirical_tv_to_uniform,
                    uniform_reference_tv, uniformity_report, weighted_quantile)

__version__ = "0.1.0"
