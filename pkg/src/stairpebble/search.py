"""Exact optimal pebbling numbers by branch-and-bound enumeration.

For each size ``t`` the candidate space (multisets of ``t`` vertices) is
split into shards by a fixed-length prefix.  Shards are enumerated by the
kernel in ``_kernels``, which applies the coverage prescreen and keeps only
orbit-minimal candidates; the survivors are decided exactly.  The reported
witness is the lexicographically first solvable candidate, so results do not
depend on the number of worker threads.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .grid import PebbleGraph, StaircaseSpec, iter_isomorphisms, lattice_alignments, path_graph
from .pebble import (
    Distribution,
    ReachQuery,
    Side,
    crossing_move_possible,
    first_unreachable,
    is_k_reachable,
    is_k_solvable,
    split_at_cut,
    two_reachable_slashes,
)

log = logging.getLogger(__name__)

ENGINE_VERSION = "1"


class BudgetExhausted(RuntimeError):
    def __init__(self, report: SearchReport):
        super().__init__(f"budget exhausted; optimum in [{report.lower}, {report.upper}]")
        self.report = report


@dataclass
class Budget:
    """Limits and execution knobs for :func:`optimal_pebbling_number`."""

    seconds: float | None = None
    max_size: int = 64
    threads: int = 1
    checkpoint: Path | str | None = None
    checkpoint_every: float = 30.0
    shard_depth: int | None = None  # None: 2 below size 8, else 3


def graph_id(graph: PebbleGraph) -> str:
    return str(graph.spec) if graph.spec else (graph.name or f"graph{len(graph)}")


@dataclass
class SearchReport:
    graph: PebbleGraph = field(repr=False)
    k: int
    optimal_size: int | None
    lower: int
    upper: int | None
    witness: Distribution | None
    candidates_examined: int = 0
    nodes: int = 0
    pruned_by_weight: int = 0
    elapsed: float = 0.0
    exhaustive: bool = False

    def __post_init__(self):
        if self.witness is not None:
            bad = first_unreachable(self.graph, self.witness, self.k)
            if bad is not None:
                raise ValueError(f"witness fails at vertex {bad}")
            if self.upper is not None and self.witness.size != self.upper:
                raise ValueError("witness size differs from the reported upper bound")
        if self.optimal_size is not None and self.witness is not None:
            if self.witness.size != self.optimal_size:
                raise ValueError("witness size differs from the optimal size")

    @property
    def complete(self) -> bool:
        return self.optimal_size is not None

    def to_json(self, timing: bool = True) -> dict:
        data = {
            "graph": graph_id(self.graph),
            "spec": self.graph.spec.to_json() if self.graph.spec else None,
            "k": self.k,
            "optimal_size": self.optimal_size,
            "lower": self.lower,
            "upper": self.upper,
            "witness": self.witness.to_json()["pebbles"] if self.witness else None,
            "candidates_examined": self.candidates_examined,
            "nodes": self.nodes,
            "pruned_by_weight": self.pruned_by_weight,
            "exhaustive": self.exhaustive,
            "engine": ENGINE_VERSION,
        }
        if timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


# -- automorphisms ------------------------------------------------------------------

AUTOMORPHISM_VERTEX_CAP = 64
AUTOMORPHISM_GROUP_CAP = 5040


def automorphism_generators(graph: PebbleGraph, cap: int = AUTOMORPHISM_VERTEX_CAP) -> list[tuple[int, ...]]:
    """Edge-preserving vertex permutations, identity first.

    Lattice symmetries of the vertex set are always included.  Graphs up to
    ``cap`` vertices also get an exhaustive search (stopped after
    ``AUTOMORPHISM_GROUP_CAP`` elements); any subset of the automorphism group
    keeps the orbit-minimal reduction sound.
    """
    n = len(graph)
    ident = tuple(range(n))
    found = {ident}
    for mapping in lattice_alignments(graph.vertices, graph.vertices):
        found.add(tuple(graph.index[mapping[c]] for c in graph.vertices))
    if n <= cap:
        for perm in iter_isomorphisms(graph, graph):
            found.add(perm)
            if len(found) >= AUTOMORPHISM_GROUP_CAP:
                break
    return [ident] + sorted(found - {ident})


# -- optimal pebbling number ----------------------------------------------------------


def _shard_depth(budget: Budget, t: int) -> int:
    if budget.shard_depth is not None:
        return budget.shard_depth
    return 2 if t < 8 else 3


def _shards(n: int, t: int, depth: int) -> list[tuple[int, ...]]:
    return list(combinations_with_replacement(range(n), min(depth, t)))


@dataclass
class _ShardResult:
    examined: int
    nodes: int
    pruned: int
    witness: tuple[int, ...] | None


class _Checkpoint:
    def __init__(self, path, graph: PebbleGraph, k: int):
        self.path = Path(path) if path else None
        self.graph = graph_id(graph)
        self.spec = graph.spec.to_json() if graph.spec else None
        self.k = k

    def load(self) -> dict | None:
        if not self.path or not self.path.exists():
            return None
        data = json.loads(self.path.read_text())
        if data.get("graph") != (self.spec or self.graph) or data.get("k") != self.k:
            log.warning("ignoring checkpoint %s for a different search", self.path)
            return None
        return data

    def save(self, t: int, cursor: int, elapsed: float, counters: dict):
        if not self.path:
            return
        data = {
            "graph": self.spec or self.graph,
            "k": self.k,
            "t": t,
            "cursor": cursor,
            "elapsed_ms": int(elapsed * 1000),
            **counters,
        }
        tmp = self.path.with_name(self.path.name + ".tmp")
        tmp.write_text(json.dumps(data, indent=1))
        os.replace(tmp, self.path)


def optimal_pebbling_number(
    graph: PebbleGraph,
    k: int = 1,
    budget: Budget | None = None,
    *,
    start: int | None = None,
    upper: int | None = None,
    symmetry: bool = True,
    progress: Callable[[int, int, int], None] | None = None,
) -> SearchReport:
    """Least ``t`` admitting a ``k``-solvable distribution, with a witness.

    Sizes are tried upward from ``start`` (default ``k``).  The report is
    ``exhaustive`` only when every size below the optimum was refuted here,
    i.e. when no ``start`` above ``k`` was given.  On timeout the report holds
    the interval ``[lower, upper]`` and ``optimal_size`` is ``None``.
    """
    budget = budget or Budget()
    n = len(graph)
    if n == 0:
        raise ValueError("empty graph")
    if k < 1:
        raise ValueError("k must be at least 1")
    began = time.monotonic()
    if n == 1:
        wit = Distribution((k,))
        return SearchReport(graph, k, k, k, k, wit, 1, 0, 0, time.monotonic() - began, True)

    weights, suffix, need = _kernels.coverage_weights(graph.distances, k)
    perms = np.asarray(automorphism_generators(graph)[1:] if symmetry else [], dtype=np.int64).reshape(-1, n)
    first = k if start is None else max(start, 1)
    exhaustive_from_start = first <= k
    counters = {"examined": 0, "nodes": 0, "pruned": 0}
    cp = _Checkpoint(budget.checkpoint, graph, k)
    t, cursor = first, 0
    resumed = cp.load()
    if resumed:
        t, cursor = int(resumed["t"]), int(resumed["cursor"])
        for key in counters:
            counters[key] = int(resumed.get(key, 0))
        began -= resumed.get("elapsed_ms", 0) / 1000
        exhaustive_from_start = bool(resumed.get("exhaustive_from_start", exhaustive_from_start))
        if resumed.get("shard_depth", _shard_depth(budget, t)) != _shard_depth(budget, t):
            cursor = 0  # shard numbering changed; redo this size from the start
        log.info("resuming %s at t=%d shard %d", graph_id(graph), t, cursor)

    def run_shard(prefix: tuple[int, ...]) -> _ShardResult:
        leaves, nodes, pruned = _kernels.enumerate_leaves(weights, suffix, need, t, prefix, perms)
        examined = 0
        for row in leaves:
            examined += 1
            cand = Distribution.from_multiset(n, row.tolist())
            if first_unreachable(graph, cand, k) is None:
                return _ShardResult(examined, nodes, pruned, tuple(int(v) for v in row))
        return _ShardResult(examined, nodes, pruned, None)

    last_save = time.monotonic()
    threads = max(1, int(budget.threads))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        while t <= budget.max_size:
            shards = _shards(n, t, _shard_depth(budget, t))
            witness = None
            window = max(1, 4 * threads)
            while cursor < len(shards):
                if budget.seconds is not None and time.monotonic() - began > budget.seconds:
                    cp.save(t, cursor, time.monotonic() - began, {**counters, "exhaustive_from_start": exhaustive_from_start, "shard_depth": _shard_depth(budget, t)})
                    report = SearchReport(
                        graph, k, None, t if exhaustive_from_start else first, upper, None,
                        counters["examined"], counters["nodes"], counters["pruned"],
                        time.monotonic() - began, False,
                    )
                    raise BudgetExhausted(report)
                batch = shards[cursor:cursor + window]
                results = list(pool.map(run_shard, batch)) if threads > 1 else [run_shard(p) for p in batch]
                for res in results:
                    counters["examined"] += res.examined
                    counters["nodes"] += res.nodes
                    counters["pruned"] += res.pruned
                    cursor += 1
                    if res.witness is not None:
                        witness = res.witness
                        break
                if witness is not None:
                    break
                if progress:
                    progress(t, cursor, len(shards))
                if time.monotonic() - last_save > budget.checkpoint_every:
                    cp.save(t, cursor, time.monotonic() - began, {**counters, "exhaustive_from_start": exhaustive_from_start, "shard_depth": _shard_depth(budget, t)})
                    last_save = time.monotonic()
            if witness is not None:
                wit = Distribution.from_multiset(n, witness)
                if cp.path and cp.path.exists():
                    cp.path.unlink()
                return SearchReport(
                    graph, k, t, t if exhaustive_from_start else first, t, wit,
                    counters["examined"], counters["nodes"], counters["pruned"],
                    time.monotonic() - began, exhaustive_from_start,
                )
            log.info("%s: no %d-solvable distribution of size %d", graph_id(graph), k, t)
            t += 1
            cursor = 0
            cp.save(t, cursor, time.monotonic() - began, {**counters, "exhaustive_from_start": exhaustive_from_start, "shard_depth": _shard_depth(budget, t)})
    report = SearchReport(
        graph, k, None, t if exhaustive_from_start else first, upper, None,
        counters["examined"], counters["nodes"], counters["pruned"], time.monotonic() - began, False,
    )
    raise BudgetExhausted(report)


def search_size(graph: PebbleGraph, t: int, k: int = 1, symmetry: bool = True) -> Distribution | None:
    """Lexicographically first ``k``-solvable distribution of exactly ``t`` pebbles."""
    try:
        rep = optimal_pebbling_number(graph, k, Budget(max_size=t), start=t, symmetry=symmetry)
    except BudgetExhausted:
        return None
    return rep.witness


def all_solvable_of_size(graph: PebbleGraph, t: int, k: int = 1) -> list[Distribution]:
    """Every ``k``-solvable distribution of size ``t`` (no symmetry reduction)."""
    weights, suffix, need = _kernels.coverage_weights(graph.distances, k)
    leaves, _, _ = _kernels.enumerate_leaves(weights, suffix, need, t)
    n = len(graph)
    out = []
    for row in leaves:
        cand = Distribution.from_multiset(n, row.tolist())
        if is_k_solvable(graph, cand, k):
            out.append(cand)
    return out


PATH_CAP = 14


def k_optimal_size_path(n: int, k: int = 2, cap: int = PATH_CAP) -> tuple[int, list[Distribution]]:
    """Minimal ``k``-solvable size on ``P_n`` and all minimal witnesses."""
    if n < 1:
        raise ValueError("path needs at least one vertex")
    if n > cap:
        raise ValueError(f"n={n} above the exhaustive cap {cap}")
    graph = path_graph(n)
    t = k
    while True:
        found = all_solvable_of_size(graph, t, k)
        if found:
            return t, found
        t += 1


# -- 2-optimal path structure -------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    start: int
    end: int  # inclusive
    kind: str  # "TYPE_A": one doubled vertex, "TYPE_B": 0-4-0 block


@dataclass(frozen=True)
class PrimeSegmentReport:
    segments: tuple[Segment, ...]
    separators: tuple[int, ...]


@dataclass(frozen=True)
class Rejection:
    position: int
    reason: str

    def __bool__(self):
        return False


def prime_segment_decomposition(counts: Sequence[int]) -> PrimeSegmentReport | Rejection:
    """Split a path distribution into prime segments separated by single zeros.

    A prime segment is all ones except for exactly one vertex with two
    pebbles (``TYPE_A``), or all ones except for one ``0, 4, 0`` block
    (``TYPE_B``).  Positions are 0-based path indices.
    """
    counts = list(counts)
    n = len(counts)
    block_zero = [False] * n
    for i, c in enumerate(counts):
        if c == 4:
            if i == 0 or i == n - 1 or counts[i - 1] != 0 or counts[i + 1] != 0:
                return Rejection(i, "4-pile without zero neighbours")
            if block_zero[i - 1]:
                return Rejection(i - 1, "zero shared by two 0-4-0 blocks")
            block_zero[i - 1] = block_zero[i + 1] = True
        elif c not in (0, 1, 2):
            return Rejection(i, f"count {c} never occurs in a prime segment")
    separators = [i for i, c in enumerate(counts) if c == 0 and not block_zero[i]]
    bounds = [-1] + separators + [n]
    segments = []
    for lo, hi in zip(bounds, bounds[1:]):
        if hi - lo < 2:
            return Rejection(max(lo, 0) if hi < n else n - 1, "empty segment between separators")
        seg = counts[lo + 1:hi]
        twos = [lo + 1 + j for j, c in enumerate(seg) if c == 2]
        fours = [lo + 1 + j for j, c in enumerate(seg) if c == 4]
        if fours and twos:
            return Rejection(twos[0], "segment mixes a 2 and a 0-4-0 block")
        if len(twos) > 1:
            return Rejection(twos[1], "two doubled vertices in one segment")
        if len(fours) > 1:
            return Rejection(fours[1], "two 0-4-0 blocks in one segment")
        if not twos and not fours:
            return Rejection(lo + 1, "segment has neither a 2 nor a 0-4-0 block")
        segments.append(Segment(lo + 1, hi - 1, "TYPE_A" if twos else "TYPE_B"))
    return PrimeSegmentReport(tuple(segments), tuple(separators))


# -- cut decomposition -----------------------------------------------------------------------


@dataclass(frozen=True)
class CutCertificate:
    c: int
    boundary: int
    side: Side
    left_spec: StaircaseSpec | None
    right_spec: StaircaseSpec | None
    left_dist: Distribution
    right_dist: Distribution

    @property
    def left_size(self) -> int:
        return self.left_dist.size

    @property
    def right_size(self) -> int:
        return self.right_dist.size


def inner_non_two_reachable(graph: PebbleGraph, dist: Distribution) -> list[int]:
    n = graph.num_slashes
    reach = two_reachable_slashes(graph, dist)
    return [s for s in range(2, n) if s not in reach]


def decompose_and_bound(graph: PebbleGraph, dist: Distribution) -> CutCertificate:
    """Cut a small solvable staircase distribution into two solvable parts.

    Needs ``|dist| < n - 1``.  The first inner slash that is not 2-reachable
    admits no crossing move on at least one side; the right side is preferred
    (cut after that slash), else the cut goes before it.
    """
    n = graph.num_slashes
    if dist.size >= n - 1:
        raise ValueError(f"|P| = {dist.size} is not below n - 1 = {n - 1}")
    if not is_k_solvable(graph, dist, 1):
        raise ValueError("distribution is not solvable")
    inner = inner_non_two_reachable(graph, dist)
    if not inner:
        raise AssertionError("no inner slash fails 2-reachability; solvability check is inconsistent")
    boundary = inner[0]
    left, right = crossing_move_possible(graph, dist, boundary)
    if left and right:
        raise AssertionError(f"slash {boundary} can be crossed on both sides")
    side = Side.RIGHT if not right else Side.LEFT
    split = split_at_cut(graph, dist, boundary, side)
    return CutCertificate(
        split.cut_after, boundary, side,
        split.left_graph.spec, split.right_graph.spec, split.left_dist, split.right_dist,
    )

