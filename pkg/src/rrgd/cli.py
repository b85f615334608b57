from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis
from .config import EngineConfig, OpacityMode
from .formats import DrawingDocument, FormatError, read_graph, write_drawing, write_svg
from .layout import INITIALIZERS, initial_drawing
from .model import GraphError
from .optimizer import rrgd

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_SAFETY_CAP = 3


def _mode(name: str, eps: float) -> OpacityMode:
    return OpacityMode(randomized=name == "rand", epsilon_rand=eps)


def _csv(kind):
    def parse(text: str):
        return [kind(x) for x in text.split(",") if x]
    return parse


def cmd_layout(args) -> int:
    graph = read_graph(args.graph)
    cfg = EngineConfig(
        rays=args.R,
        ray_size=args.nr,
        delta_e=args.delta_e,
        prohibition_ratio=args.pw,
        mode=_mode(args.mode, args.eps_rand),
        seed=args.seed,
        max_outer_iterations=args.max_iterations,
    )
    d0 = initial_drawing(graph, args.init, rng=args.seed, width=args.width, height=args.height)
    trace = open(args.trace, "w") if args.trace else None
    try:
        def emit(rec):
            trace.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")

        final, stats = rrgd(d0, cfg, on_record=emit if trace else None)
    finally:
        if trace:
            trace.close()
    meta = {
        "seed": args.seed,
        "init": args.init,
        "config": cfg.to_dict(),
        "rest_length": stats.rest_length,
        "delta_e": stats.delta_e,
        "initial_cr": stats.initial_crossings,
        "final_cr": stats.final_crossings,
        "energy": stats.final_energy,
        "outer_iterations": stats.outer_iterations,
        "stop_reason": stats.stop_reason,
    }
    if args.out:
        Path(args.out).write_text(write_drawing(DrawingDocument(final, meta)))
    if args.svg:
        Path(args.svg).write_text(write_svg(final))
    print(f"cr {stats.initial_crossings} -> {stats.final_crossings} in {stats.outer_iterations} passes ({stats.stop_reason})")
    if not stats.converged:
        print(f"rrgd: stopped by the safety cap after {stats.safety_cap} passes", file=sys.stderr)
        return EXIT_SAFETY_CAP
    return EXIT_OK


def load_corpus(source: str, seed: int = 0) -> list:
    """Graphs from a directory of files, or a generator spec.

    Generator specs: ``3c:SIZES[:COUNT]`` (expanded K4, e.g. ``3c:8,12:5``)
    and ``rand:N,M[:COUNT]`` (uniform graphs with N vertices, M edges).
    """
    path = Path(source)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file())
        return [(p.name, read_graph(p)) for p in files]
    parts = source.split(":")
    if len(parts) not in (2, 3) or parts[0] not in ("3c", "rand"):
        raise ValueError(f"{source!r} is neither a directory nor a generator spec")
    count = int(parts[2]) if len(parts) == 3 else 1
    rng = np.random.default_rng(seed)
    nums = [int(x) for x in parts[1].split(",")]
    corpus = []
    if parts[0] == "3c":
        for size in nums:
            for i in range(count):
                corpus.append((f"3c-{size}-{i}", analysis.gen_3connected(size, rng)))
    else:
        if len(nums) != 2:
            raise ValueError("rand spec needs N,M")
        for i in range(count):
            corpus.append((f"rand-{nums[0]}-{nums[1]}-{i}", analysis.gen_random(nums[0], nums[1], rng)))
    return corpus


def cmd_bench(args) -> int:
    corpus = load_corpus(args.source, args.master_seed)
    base = EngineConfig(mode=_mode("det", args.eps_rand), max_outer_iterations=args.max_iterations)
    configs = analysis.config_grid(
        base,
        rays=args.R,
        ray_size=args.nr,
        delta_e=args.delta_e or [None],
        prohibition_ratio=args.pw,
        mode=args.mode,
    )
    report = analysis.run_benchmark(corpus, configs, seeds=args.seeds, init=args.init, master_seed=args.master_seed)
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    print("config  R  n_r  delta_e  pw    mode  runs  mean_cr  sd_cr")
    for agg in report["aggregates"]:
        s = agg["settings"]
        cr = agg["final_cr"]
        de = "auto" if s["delta_e"] is None else f"{s['delta_e']:g}"
        print(
            f"{agg['config']:>6} {s['rays']:>2} {s['ray_size']:>4} {de:>8} {s['prohibition_ratio']:<5g} "
            f"{s['mode']:>4} {cr['n']:>5} {cr['mean']:>8.3f} {cr['sd']:>6.3f}"
        )
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.what == "mc-lemma":
        print(repr(analysis.ray_edge_probability_mc(args.samples, np.random.default_rng(args.seed))))
    elif args.what == "facet-prob":
        print(repr(analysis.facet_hit_probability(args.nv, args.ne, args.cr, args.R)))
    elif args.what == "rays-needed":
        print(analysis.rays_needed(args.q, args.nv, args.ne, args.cr))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rrgd", description="Ray-based crossing minimization for straight-line drawings.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    lay = sub.add_parser("layout", help="optimize one graph")
    lay.add_argument("graph", help="edge list (u v per line) or .graphml file")
    lay.add_argument("--init", choices=INITIALIZERS, default="random")
    lay.add_argument("--mode", choices=("det", "rand"), default="det")
    lay.add_argument("-R", type=int, default=10, help="rays per move")
    lay.add_argument("--nr", type=int, default=10, help="ray size (hits per ray)")
    lay.add_argument("--delta-e", type=float, default=None, help="energy delta (default 1e-3 * L0^2)")
    lay.add_argument("--pw", type=float, default=0.1, help="prohibition window as a fraction of |V|")
    lay.add_argument("--eps-rand", type=float, default=0.05)
    lay.add_argument("--seed", type=int, default=0)
    lay.add_argument("--width", type=float, default=1000.0)
    lay.add_argument("--height", type=float, default=1000.0)
    lay.add_argument("--max-iterations", type=int, default=None)
    lay.add_argument("--out", help="drawing JSON output")
    lay.add_argument("--svg", help="SVG output")
    lay.add_argument("--trace", help="per-pass records, one JSON object per line")
    lay.set_defaults(func=cmd_layout)

    b = sub.add_parser("bench", help="run a parameter grid over a corpus")
    b.add_argument("source", help="directory of graph files, or 3c:SIZES[:COUNT] / rand:N,M[:COUNT]")
    b.add_argument("-R", type=_csv(int), default=[10])
    b.add_argument("--nr", type=_csv(int), default=[10])
    b.add_argument("--delta-e", type=_csv(float), default=None)
    b.add_argument("--pw", type=_csv(float), default=[0.1])
    b.add_argument("--mode", type=_csv(str), default=["det"])
    b.add_argument("--eps-rand", type=float, default=0.05)
    b.add_argument("--init", choices=INITIALIZERS, default="random")
    b.add_argument("--seeds", type=int, default=1)
    b.add_argument("--master-seed", type=int, default=0)
    b.add_argument("--max-iterations", type=int, default=None)
    b.add_argument("--report", help="JSON report output")
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("analyze", help="facet-access probabilities")
    asub = a.add_subparsers(dest="what", required=True)
    mc = asub.add_parser("mc-lemma")
    mc.add_argument("--samples", type=int, default=1_000_000)
    mc.add_argument("--seed", type=int, default=0)
    fp = asub.add_parser("facet-prob")
    rn = asub.add_parser("rays-needed")
    for sp in (fp, rn):
        sp.add_argument("--nv", type=int, required=True)
        sp.add_argument("--ne", type=int, required=True)
        sp.add_argument("--cr", type=int, default=0)
    fp.add_argument("-R", type=int, required=True)
    rn.add_argument("--q", type=float, required=True)
    a.set_defaults(func=cmd_analyze)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, FormatError, GraphError, ValueError) as exc:
        print(f"rrgd: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
