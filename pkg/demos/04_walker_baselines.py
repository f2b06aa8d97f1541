"""Interval-sampled random walks: calibration, then uniform samples.

The calibration harness has full graph access (it is an experiment tool,
not part of the billed algorithm): it runs many walks in lockstep and finds
the earliest step at which the extracted samples pass a uniformity test.
"""
import numpy as np

from layersample import AccessSession, CountingMode
from layersample.generators import forest_fire
from layersample.stats import uniformity_report
from layersample.walks import Walker, calibrate_interval, rw_sample_many

graph = forest_fire(20_000, 0.37, 0.3, seed=5)
n = graph.node_count

cal = calibrate_interval(graph, Walker.REJ, walks=n, zeta=0.03, seed=5,
                         num_starts=3)
print(f"rej interval: {cal.interval} steps (per start {cal.per_start})")

session = AccessSession(graph, seed=6)
run = rw_sample_many(session, Walker.REJ, 0, 2000, cal.interval,
                     rng=np.random.default_rng(6))
report = uniformity_report(run.samples, n, zeta=0.03, rng=7)
print(f"2000 rej samples: tv {report.empirical_tv:.4f} vs reference "
      f"{report.reference_tv:.4f}, collision z {report.collision_z:.2f}, "
      f"passed={report.passed}")
print(f"walk length {run.total_steps} steps, cached query cost "
      f"{run.cumulative_queries[-1]} "
      f"({run.cumulative_queries[-1] / 2000:.1f}/sample)")

uncached = AccessSession(graph, counting=CountingMode.UNCACHED, seed=6)
run_u = rw_sample_many(uncached, Walker.REJ, 0, 200, cal.interval,
                       rng=np.random.default_rng(6))
print(f"uncached cost (walk length itself): "
      f"{run_u.cumulative_queries[-1] / 200:.0f}/sample")
