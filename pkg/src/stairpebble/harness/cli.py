"""Command-line front end: ``stairpebble <command> ...``.

Exit codes: 0 success, 1 a check came out false (mismatch, unsolvable,
unreachable), 2 usage or input error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

import numpy as np

from .. import _kernels
from ..constructions import ConstructionError, construct, grid_seven_diagonal, widen
from ..grid import (
    PebbleGraph,
    StaircaseSpec,
    build_grid_window,
    build_staircase,
    collapse,
    merge_negative_diagonals_7to6,
    slash_to_path_map,
)
from ..pebble import Distribution, ReachQuery, first_unreachable, reach_witness
from ..search import Budget, BudgetExhausted, optimal_pebbling_number
from .cache import CacheEntry, WitnessCache, default_cache_path
from .verify import EXPERIMENTS, PROFILES, run_conjecture_experiment, verify_theorem

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("stairpebble")


class UsageError(Exception):
    pass


def parse_range(text: str) -> range:
    """``"5"``, ``"3..7"`` (inclusive) or ``"3-7"``."""
    for sep in ("..", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


def parse_grid(text: str) -> tuple[int, int]:
    rows, cols = text.lower().split("x")
    return int(rows), int(cols)


def _graph_from_args(args) -> PebbleGraph:
    if getattr(args, "spec", None):
        return build_staircase(StaircaseSpec.parse(args.spec))
    if getattr(args, "grid", None):
        return build_grid_window(*parse_grid(args.grid))
    raise UsageError("give --spec or --grid")


def _dist_from_args(args, graph: PebbleGraph) -> Distribution:
    if args.dist:
        data = json.loads(Path(args.dist).read_text())
        return Distribution.from_json(data, graph)
    if args.pebbles:
        pairs = []
        for item in args.pebbles.split(","):
            v, _, c = item.partition(":")
            pairs.append((int(v), int(c or 1)))
        return Distribution.from_pairs(len(graph), pairs)
    raise UsageError("give --pebbles v:c,... or --dist FILE")


def _budget(args) -> Budget:
    return Budget(
        seconds=args.budget_seconds,
        max_size=args.max_size,
        threads=args.threads,
        checkpoint=args.checkpoint,
    )


def _cache(args) -> WitnessCache:
    return WitnessCache.load(args.cache or default_cache_path())


def _emit(args, data: dict, text: str, graph: PebbleGraph | None = None, dist: Distribution | None = None):
    if args.format == "json":
        print(json.dumps(data, indent=1, sort_keys=True))
    elif args.format == "dot":
        if graph is None:
            raise UsageError("this command has no DOT output")
        print(graph.to_dot(dist), end="")
    else:
        print(text)


# -- commands ----------------------------------------------------------------------------


def cmd_gen(args) -> int:
    graph = _graph_from_args(args)
    dist = None
    data = graph.to_json()
    if args.random_pebbles:
        rng = random.Random(args.seed)
        dist = Distribution.from_multiset(len(graph), (rng.randrange(len(graph)) for _ in range(args.random_pebbles)))
        data = dist.to_json(graph)
    text = f"{graph.name}: {len(graph)} vertices, {len(graph.edges)} edges"
    _emit(args, data, text, graph, dist)
    return EXIT_OK


def cmd_optimal(args) -> int:
    graph = _graph_from_args(args)
    try:
        rep = optimal_pebbling_number(graph, args.k, _budget(args))
    except BudgetExhausted as exc:
        rep = exc.report
        _emit(args, rep.to_json(timing=not args.no_timing), f"budget exhausted: optimum in [{rep.lower}, {rep.upper}]", graph)
        return EXIT_BUDGET
    text = f"{rep.optimal_size}\nwitness: {rep.witness.pebbles()}"
    _emit(args, rep.to_json(timing=not args.no_timing), text, graph, rep.witness)
    if args.record and graph.spec is not None:
        cache = _cache(args)
        cache.put(CacheEntry(graph.spec, args.k, rep.witness, rep.exhaustive))
        cache.save(args.cache or default_cache_path())
    return EXIT_OK


def cmd_reach(args) -> int:
    graph = _graph_from_args(args)
    dist = _dist_from_args(args, graph)
    if args.target is None:
        bad = first_unreachable(graph, dist, args.k)
        data = {"solvable": bad is None, "k": args.k, "unreachable": bad}
        text = "solvable" if bad is None else f"not solvable: vertex {bad} ({graph.vertices[bad]}) unreachable"
        _emit(args, data, text, graph, dist)
        return EXIT_OK if bad is None else EXIT_FALSE
    targets = [int(t) for t in args.target.split(",")]
    moves = reach_witness(graph, dist, ReachQuery(targets, args.k))
    data = {"reachable": moves is not None, "target": targets, "k": args.k,
            "moves": [list(m) for m in moves] if moves is not None else None}
    text = "unreachable" if moves is None else "reachable" + (
        "".join(f"\n  {u} -> {w}" for u, w in moves) if args.moves else ""
    )
    _emit(args, data, text, graph, dist)
    return EXIT_OK if moves is not None else EXIT_FALSE


def cmd_construct(args) -> int:
    cache = _cache(args)
    if args.grid:
        rows, cols = parse_grid(args.grid)
        graph = build_grid_window(rows, cols)
        dist = grid_seven_diagonal(rows, cols)
        data = {**dist.to_json(graph), "size": dist.size, "family": "seven-diagonal"}
        _emit(args, data, f"{graph.name}: {dist.size} pebbles\n{dist.pebbles()}", graph, dist)
        return EXIT_OK
    if not args.spec:
        raise UsageError("give --spec or --grid")
    spec = StaircaseSpec.parse(args.spec)
    c = construct(spec, cache)
    out_spec, dist, data = spec, c.dist, c.to_json()
    if args.widen:
        out_spec, dist = widen(spec, c.dist)
        data = {"spec": str(out_spec), "family": "widen", "from": c.to_json(), "size": dist.size,
                "pebbles": [[v, n] for v, n in dist.pebbles()]}
    graph = build_staircase(out_spec)
    _emit(args, data, f"{out_spec}: {dist.size} pebbles\n{dist.pebbles()}", graph, dist)
    return EXIT_OK


def cmd_collapse(args) -> int:
    graph = _graph_from_args(args)
    dist = _dist_from_args(args, graph)
    qmap = slash_to_path_map(graph) if args.map == "slash-path" else merge_negative_diagonals_7to6(graph)
    out = collapse(qmap, dist)
    data = out.to_json(qmap.target)
    _emit(args, data, f"{qmap.target.name}: {out.pebbles()}", qmap.target, out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cache = _cache(args)
    report = verify_theorem(args.family, parse_range(args.n), _budget(args), args.profile, cache, args.record)
    if args.record:
        cache.save(args.cache or default_cache_path())
    _emit(args, report.to_json(timing=False), report.to_text())
    if not report.ok:
        print(f"verification FAILED for {args.family}", file=sys.stderr)
        return EXIT_FALSE
    if any(r.status == "incomplete" for r in report.rows):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_experiment(args) -> int:
    budget = _budget(args) if args.budget_seconds else None
    report = run_conjecture_experiment(args.id, parse_range(args.n), budget, _cache(args), args.stack)
    _emit(args, report.to_json(), report.to_text())
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=1, help="pebbles required on each target (default 1)")
    common.add_argument("--budget-seconds", type=float, default=None)
    common.add_argument("--max-size", type=int, default=64, help="largest distribution size to try")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--checkpoint", type=Path, default=None)
    common.add_argument("--cache", type=Path, default=None, help="witness cache JSON (default: bundled)")
    common.add_argument("--format", choices=("json", "dot", "text"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="stairpebble", description="Optimal pebbling of staircase graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s (kernel backend: {_kernels.BACKEND})")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_args(sp):
        sp.add_argument("--spec", help="staircase, e.g. S3,6 or S'5,7")
        sp.add_argument("--grid", help="grid window ROWSxCOLS")

    def dist_args(sp):
        sp.add_argument("--pebbles", help="comma separated vertex:count pairs")
        sp.add_argument("--dist", help="distribution JSON file")

    sp = sub.add_parser("gen", parents=[common], help="emit a graph")
    graph_args(sp)
    sp.add_argument("--random-pebbles", type=int, default=0, help="also emit a random distribution (uses --seed)")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("optimal", parents=[common], help="compute the optimal pebbling number")
    graph_args(sp)
    sp.add_argument("--no-timing", action="store_true", help="omit elapsed time from JSON")
    sp.add_argument("--record", action="store_true", help="store the witness in the cache")
    sp.set_defaults(func=cmd_optimal)

    sp = sub.add_parser("reach", parents=[common], help="decide reachability or solvability")
    graph_args(sp)
    dist_args(sp)
    sp.add_argument("--target", help="target vertex or comma separated set; omit to test solvability")
    sp.add_argument("--moves", action="store_true", help="print the witness move sequence")
    sp.set_defaults(func=cmd_reach)

    sp = sub.add_parser("construct", parents=[common], help="emit a verified construction")
    graph_args(sp)
    sp.add_argument("--widen", action="store_true", help="extend the construction by one diagonal")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("collapse", parents=[common], help="collapse a distribution along a quotient map")
    graph_args(sp)
    dist_args(sp)
    sp.add_argument("--map", choices=("slash-path", "7to6"), default="slash-path")
    sp.set_defaults(func=cmd_collapse)

    sp = sub.add_parser("verify", parents=[common], help="check a published table against search")
    sp.add_argument("--family", required=True, help="width3 ... width8")
    sp.add_argument("--n", required=True, help="length or inclusive range a..b")
    sp.add_argument("--profile", choices=PROFILES, default="default")
    sp.add_argument("--record", action="store_true", help="store computed witnesses in the cache")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("experiment", parents=[common], help="tabulate a conjecture")
    sp.add_argument("--id", required=True, choices=EXPERIMENTS)
    sp.add_argument("--n", required=True, help="inclusive range a..b")
    sp.add_argument("--stack", type=int, default=2, help="number of 7-wide strips for 'stacked'")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    random.seed(args.seed)
    np.random.seed(args.seed)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
