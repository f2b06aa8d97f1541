"""Command-line entry point.

Subcommands: ``generate``, ``qc``, ``mu``, ``reach-hist``, ``size-error``,
``lb-scaling`` and ``calibrate``.  ``qc`` accepts a flat key=value config
file; individual flags override it.  The ``LAYERSAMPLE_OUT`` environment
variable sets the default output directory.
"""
from __future__ import annotations

import argparse
import os
import sys

from .experiments import (ConfigError, config_from_mapping, make_graph,
                          parse_config_file, run_amortized_qc,
                          run_lb_scaling, run_mu_vs_l0, run_reach_hist,
                          run_size_error, write_csv)
from .graphs import save_edge_list
from .walks import Walker, calibrate_interval, default_calibration_plan


def _out_path(name: str | None, fallback: str) -> str:
    base = os.environ.get("LAYERSAMPLE_OUT", ".")
    target = name or fallback
    if os.path.isabs(target):
        return target
    return os.path.join(base, target)


def _parse_grid(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output CSV path")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="layersample")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic graph as an edge list")
    p.add_argument("--graph", required=True,
                   help="generator spec, e.g. ff:n=10000,pf=0.37,pb=0.3")
    _add_common(p)

    p = sub.add_parser("qc", help="amortized query cost per sample")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry")
    p.add_argument("--graph", default=None)
    p.add_argument("--algorithm", choices=list(
        ("samplayer", "samplayer+", "rej", "mh", "mh+")), default=None)
    p.add_argument("--walker", choices=["rej", "mh", "mh+"], default=None,
                   help="shorthand for --algorithm limited to walkers")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--l0", type=int, default=None)
    p.add_argument("--s1", type=int, default=None)
    p.add_argument("--s2", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--counting", choices=["cached", "uncached"], default=None)
    p.add_argument("--interval", type=int, default=None,
                   help="walker sampling interval; omit to calibrate")
    p.add_argument("--calibrate", choices=["tv", "collisions"], default=None)
    p.add_argument("--zeta", type=float, default=None)
    p.add_argument("--walks", type=int, default=None)
    p.add_argument("--v0", type=int, default=None)
    p.add_argument("--layering-in", default=None,
                   help="reuse a saved layering snapshot")
    p.add_argument("--layering-out", default=None,
                   help="save the layering snapshot after preprocessing")
    p.add_argument("--report-uniformity", action="store_true",
                   help="test the emitted samples for uniformity")
    p.add_argument("--report-zeta", type=float, default=0.01)
    _add_common(p)

    p = sub.add_parser("mu", help="mean component size versus base-layer size")
    p.add_argument("--graph", required=True)
    p.add_argument("--l0-grid", required=True, help="comma separated sizes")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--v0", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("reach-hist", help="reachability histogram")
    p.add_argument("--graph", required=True)
    p.add_argument("--l0", type=int, default=0)
    p.add_argument("--s1", type=int, default=500)
    p.add_argument("--s2", type=int, default=200)
    p.add_argument("--algorithm", choices=["samplayer", "samplayer+"],
                   default="samplayer")
    p.add_argument("--bins", type=int, default=30)
    _add_common(p)

    p = sub.add_parser("size-error", help="periphery size estimate sweeps")
    p.add_argument("--graph", required=True)
    p.add_argument("--l0", type=int, required=True)
    p.add_argument("--s1-grid", default="")
    p.add_argument("--s2-grid", default="")
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--v0", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("lb-scaling", help="walker cost versus component scale")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-grid", required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--l0", type=int, default=0)
    p.add_argument("--zeta", type=float, default=0.03)
    _add_common(p)

    p = sub.add_parser("calibrate", help="find the walker sampling interval")
    p.add_argument("--graph", required=True)
    p.add_argument("--walker", choices=["rej", "mh", "mh+"], required=True)
    p.add_argument("--calibrate", choices=["tv", "collisions"], default="tv")
    p.add_argument("--zeta", type=float, default=0.01)
    p.add_argument("--walks", type=int, default=0)
    p.add_argument("--starts", type=int, default=3)
    _add_common(p)

    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.effective_seed = 0
    else:
        args.effective_seed = args.seed
    try:
        return _dispatch(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "generate":
        graph = make_graph(args.graph, seed=args.effective_seed)
        out = _out_path(args.out, "graph.txt")
        save_edge_list(graph, out,
                       header=f"generated from {args.graph} seed={args.effective_seed}")
        print(f"wrote {graph.node_count} nodes / {graph.edge_count} edges to {out}")
        return 0

    if args.command == "qc":
        mapping = parse_config_file(args.config) if args.config else {}
        for item in args.set:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            mapping[key.strip()] = value.strip()
        for name in ("graph", "algorithm", "samples", "l0", "s1", "s2",
                     "epsilon", "counting", "interval", "calibrate", "zeta",
                     "walks", "v0", "layering_in", "layering_out", "out"):
            value = getattr(args, name, None)
            if value is not None:
                mapping[name] = value
        if args.walker is not None:
            mapping["algorithm"] = args.walker
        if args.seed is not None:
            mapping["seed"] = args.seed
        config = config_from_mapping(mapping)
        rows, summary = run_amortized_qc(config)
        out = _out_path(config.out or None, "qc.csv")
        write_csv(rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        for key, value in summary.items():
            print(f"{key}={value}")
        if args.report_uniformity:
            from .stats import uniformity_report
            report = uniformity_report(
                [r["node"] for r in rows], summary["node_count"],
                zeta=args.report_zeta, rng=config.seed)
            report_row = {
                "k": report.k, "n": report.n,
                "empirical_tv": report.empirical_tv,
                "reference_tv": report.reference_tv,
                "collision_z": report.collision_z,
                "zeta": report.zeta, "method": report.method,
                "passed": int(report.passed),
            }
            for key, value in report_row.items():
                print(f"uniformity.{key}={value}")
            write_csv([report_row], out + ".uniformity.csv")
        return 0

    if args.command == "mu":
        graph = make_graph(args.graph, seed=args.effective_seed)
        rows = run_mu_vs_l0(graph, _parse_grid(args.l0_grid), seeds=args.seeds,
                            v0=args.v0, base_seed=args.effective_seed)
        out = _out_path(args.out, "mu.csv")
        write_csv(rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        return 0

    if args.command == "reach-hist":
        config = config_from_mapping({
            "graph": args.graph, "algorithm": args.algorithm, "l0": args.l0,
            "s1": args.s1, "s2": args.s2, "seed": args.effective_seed})
        rows, diag = run_reach_hist(config, bins=args.bins,
                                    with_diagnostics=True)
        out = _out_path(args.out, "reach_hist.csv")
        write_csv(rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        for key, value in diag.items():
            print(f"{key}={value}")
        write_csv([diag], out + ".diagnostics.csv")
        return 0

    if args.command == "size-error":
        graph = make_graph(args.graph, seed=args.effective_seed)
        rows = run_size_error(graph, v0=args.v0, l0_size=args.l0,
                              s1_grid=_parse_grid(args.s1_grid),
                              s2_grid=_parse_grid(args.s2_grid),
                              repetitions=args.repetitions,
                              seed=args.effective_seed)
        out = _out_path(args.out, "size_error.csv")
        write_csv(rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        return 0

    if args.command == "lb-scaling":
        rows = run_lb_scaling(args.n, _parse_grid(args.t_grid), args.samples,
                              seed=args.effective_seed, l0_size=args.l0 or None,
                              zeta=args.zeta)
        out = _out_path(args.out, "lb_scaling.csv")
        write_csv(rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        return 0

    if args.command == "calibrate":
        graph = make_graph(args.graph, seed=args.effective_seed)
        walks = args.walks or default_calibration_plan(graph, args.zeta)[1]
        calib = calibrate_interval(graph, Walker(args.walker), walks=walks,
                                   zeta=args.zeta, method=args.calibrate,
                                   num_starts=args.starts,
                                   seed=args.effective_seed)
        print(f"interval={calib.interval}")
        print(f"per_start={','.join(map(str, calib.per_start))}")
        print(f"method={calib.method} zeta={calib.zeta} walks={calib.walks_used}")
        return 0

    raise ConfigError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
