"""Tour of the seeded generators.

The burning-model graph reproduces the heavy-tailed, core-plus-whiskers
texture of social networks; the bridge construction realizes the family of
graphs on which interval-sampled walks provably pay per crossed bridge.
"""
import numpy as np

from layersample.generators import (forest_fire, lower_bound_graph, path,
                                    random_regular, star)

ff = forest_fire(50_000, 0.37, 0.3, seed=7)
deg = ff.degrees()
print(f"forest fire: {ff}, avg degree {ff.average_degree:.2f}, "
      f"max degree {deg.max()}, p99 {np.quantile(deg, 0.99):.0f}")
again = forest_fire(50_000, 0.37, 0.3, seed=7)
print(f"deterministic under the seed: "
      f"{np.array_equal(ff.indices, again.indices)}")

lb = lower_bound_graph(20_000, 50, seed=7)
core = 10_000
satellite_edges = sum(1 for u in range(core, 20_000)
                      for w in lb.neighbors(u) if w < core or w >= 20_000)
print(f"bridge construction: {lb}, one bridge per satellite "
      f"({satellite_edges} bridges for {20_000 // (2 * 50)} satellites)")

print(f"fixtures: star(5) degrees {sorted(star(5).degrees().tolist())}, "
      f"path(4) degrees {path(4).degrees().tolist()}")
rr = random_regular(10_000, 10, seed=7)
print(f"regular graph: every degree 10 -> {bool((rr.degrees() == 10).all())}")
