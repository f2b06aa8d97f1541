"""Quickstart: decompose a synthetic social graph and draw uniform nodes.

Everything the sampler learns about the graph flows through a query
session; the printout shows how few queries the whole pipeline needs.
"""
from collections import Counter

import numpy as np

from layersample import AccessSession
from layersample.generators import forest_fire
from layersample.samplers import preprocess, sample_many
from layersample.stats import empirical_tv_to_uniform, uniform_reference_tv

graph = forest_fire(20_000, 0.37, 0.3, seed=1)
print(f"graph: {graph} average degree {graph.average_degree:.1f}")

session = AccessSession(graph, seed=1)
handle = preprocess(session, v0=0, l0_size=600, s1=800, s2=120, epsilon=0.02)
lay = handle.layering
print(f"base layer {len(lay.l0)} nodes, neighbor layer {len(lay.l1)},")
print(f"estimated periphery {float(handle.periphery_mass):.0f} "
      f"(true {graph.node_count - len(lay.l0) - len(lay.l1)})")
print(f"preprocessing spent {handle.preprocessing_queries} queries")

run = sample_many(handle, session, 20_000)
nodes = np.asarray([t.node for t in run.traces])
tv = empirical_tv_to_uniform(nodes, graph.node_count)
ref = uniform_reference_tv(20_000, graph.node_count, trials=10, rng=2)
print(f"20000 draws: tv to uniform {tv:.4f}, uniform reference {ref:.4f}")

layer_mix = Counter(t.layer.value for t in run.traces)
print(f"layer mix of the samples: {dict(layer_mix)}")
folded = run.amortized(include_preprocessing=True)
print(f"amortized queries/sample: {folded[99]:.1f} after 100, "
      f"{folded[-1]:.2f} after {len(folded)}")
