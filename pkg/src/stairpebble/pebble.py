"""Pebbling moves and exact reachability / solvability decisions.

All decisions are exact: a depth-first search over reachable distributions,
memoised on the full count vector.  Every move removes one pebble from the
board, so a search path never revisits a state and has at most ``|P|`` moves.

Pruning uses the weight ``sum_v P(v) 2^-d(v, T)`` toward the target set ``T``.
A move ``u -> w`` changes it by ``-2*2^-d(u) + 2^-d(w) <= 0`` because
``d(w) >= d(u) - 1``, and a state with ``k`` pebbles on ``T`` has weight at
least ``k``; states below ``k`` are dead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Mapping, NamedTuple, Sequence

from . import grid

if TYPE_CHECKING:
    from .grid import PebbleGraph


@dataclass(frozen=True)
class Distribution:
    """Pebble counts indexed by vertex, in the graph's vertex order."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError("pebble counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def empty(cls, n: int) -> Distribution:
        return cls((0,) * n)

    @classmethod
    def from_pairs(cls, n: int, pairs: Mapping[int, int] | Iterable[tuple[int, int]]) -> Distribution:
        counts = [0] * n
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        for v, c in items:
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} outside 0..{n - 1}")
            counts[v] += int(c)
        return cls(tuple(counts))

    @classmethod
    def from_multiset(cls, n: int, vertices: Iterable[int]) -> Distribution:
        return cls.from_pairs(n, ((v, 1) for v in vertices))

    @property
    def size(self) -> int:
        return sum(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, v: int) -> int:
        return self.counts[v]

    def pebbles(self) -> list[tuple[int, int]]:
        """Occupied vertices as ``(vertex, count)`` pairs."""
        return [(v, c) for v, c in enumerate(self.counts) if c]

    def multiset(self) -> tuple[int, ...]:
        return tuple(v for v, c in enumerate(self.counts) for _ in range(c))

    def permuted(self, perm: Sequence[int]) -> Distribution:
        """Image under the vertex map ``v -> perm[v]``."""
        counts = [0] * len(self.counts)
        for v, c in enumerate(self.counts):
            counts[perm[v]] += c
        return Distribution(tuple(counts))

    def plus(self, other: Distribution) -> Distribution:
        return Distribution(tuple(a + b for a, b in zip(self.counts, other.counts, strict=True)))

    def to_json(self, graph: PebbleGraph | None = None) -> dict:
        data: dict = {"pebbles": [[v, c] for v, c in self.pebbles()]}
        if graph is not None:
            data = {"graph": graph.to_json(), **data}
        return data

    @classmethod
    def from_json(cls, data: dict, graph: PebbleGraph | None = None) -> Distribution:
        if graph is None:
            if "graph" not in data:
                raise ValueError("distribution JSON without a graph needs an explicit graph")
            graph = grid.PebbleGraph.from_json(data["graph"])
        return cls.from_pairs(len(graph), [(int(v), int(c)) for v, c in data["pebbles"]])


class Move(NamedTuple):
    src: int
    dst: int


@dataclass(frozen=True)
class ReachQuery:
    target: frozenset[int]
    k: int = 1

    def __init__(self, target: int | Iterable[int], k: int = 1):
        tgt = frozenset([target]) if isinstance(target, int) else frozenset(target)
        if not tgt:
            raise ValueError("reach query needs a nonempty target")
        if k < 1:
            raise ValueError("k must be at least 1")
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "k", k)


class PebblingError(ValueError):
    """Illegal pebbling move."""


def _check_sizes(graph: PebbleGraph, dist: Distribution):
    if len(dist) != len(graph):
        raise ValueError(f"distribution has {len(dist)} entries, graph has {len(graph)} vertices")


def apply_move(graph: PebbleGraph, dist: Distribution, move: Move) -> Distribution:
    u, w = move
    if not graph.has_edge(u, w):
        raise PebblingError(f"{u} -> {w} is not an edge")
    if dist[u] < 2:
        raise PebblingError(f"vertex {u} holds {dist[u]} pebble(s); a move needs 2")
    counts = list(dist.counts)
    counts[u] -= 2
    counts[w] += 1
    return Distribution(tuple(counts))


def apply_moves(graph: PebbleGraph, dist: Distribution, moves: Iterable[Move]) -> Distribution:
    for mv in moves:
        dist = apply_move(graph, dist, Move(*mv))
    return dist


def _target_distance(graph: PebbleGraph, targets: frozenset[int]) -> list[int]:
    rows = graph.distances[sorted(targets)]
    out = []
    for col in rows.T.tolist():
        finite = [d for d in col if d >= 0]
        out.append(min(finite) if finite else -1)
    return out


def _scaled_weights(graph: PebbleGraph, targets: frozenset[int]) -> tuple[list[int], int]:
    """Integer weights ``2^(D - d(v, T))`` and the scale exponent ``D``."""
    dist = _target_distance(graph, targets)
    top = max(dist)
    return [1 << (top - d) if d >= 0 else 0 for d in dist], top


def weight_bound(graph: PebbleGraph, dist: Distribution, target: int | Iterable[int]) -> Fraction:
    """Exact ``sum_v P(v) 2^-d(v, target)``; unreachable vertices contribute 0."""
    _check_sizes(graph, dist)
    targets = frozenset([target]) if isinstance(target, int) else frozenset(target)
    weights, top = _scaled_weights(graph, targets)
    return Fraction(sum(c * w for c, w in zip(dist.counts, weights)), 1 << top)


class SearchLimit(RuntimeError):
    """Raised when a reachability search visits more states than allowed."""


def _search(
    graph: PebbleGraph,
    start: Sequence[int],
    targets: frozenset[int],
    k: int,
    prune: bool = True,
    no_reverse: bool = False,
    max_states: int | None = None,
) -> list[Move] | None:
    """Move list putting ``k`` pebbles on ``targets``, or ``None`` if impossible."""
    adj = graph.adjacency
    n = len(adj)
    counts = list(start)
    on_target = sum(counts[t] for t in targets)
    if on_target >= k:
        return []
    in_t = [v in targets for v in range(n)]
    weights, top = _scaled_weights(graph, targets)
    need = k << top
    weight = sum(c * w for c, w in zip(counts, weights))
    if prune and weight < need:
        return None

    def moves_from(used):
        # least weight loss first; the ordering only affects speed
        out = []
        for u in range(n):
            if counts[u] >= 2:
                for w in adj[u]:
                    if no_reverse and (w, u) in used:
                        continue
                    out.append((2 * weights[u] - weights[w], u, w))
        out.sort()
        return [(u, w) for _, u, w in out]

    used: frozenset = frozenset()
    seen = {(tuple(counts), used) if no_reverse else tuple(counts)}
    path: list[Move] = []
    stack = [iter(moves_from(used))]
    while stack:
        mv = next(stack[-1], None)
        if mv is None:
            stack.pop()
            if path:
                u, w = path.pop()
                counts[u] += 2
                counts[w] -= 1
                weight += 2 * weights[u] - weights[w]
                on_target += 2 * in_t[u] - in_t[w]
                if no_reverse:
                    used = frozenset(Move(*m) for m in path)
            continue
        u, w = mv
        counts[u] -= 2
        counts[w] += 1
        new_weight = weight - 2 * weights[u] + weights[w]
        new_on = on_target - 2 * in_t[u] + in_t[w]
        new_used = used | {mv} if no_reverse else used
        key = (tuple(counts), new_used) if no_reverse else tuple(counts)
        if key in seen or (prune and new_weight < need):
            counts[u] += 2
            counts[w] -= 1
            continue
        seen.add(key)
        if max_states is not None and len(seen) > max_states:
            raise SearchLimit(f"more than {max_states} states")
        path.append(Move(u, w))
        weight, on_target, used = new_weight, new_on, new_used
        if on_target >= k:
            return path
        stack.append(iter(moves_from(used)))
    return None


def is_k_reachable(
    graph: PebbleGraph,
    dist: Distribution,
    query: ReachQuery,
    *,
    prune: bool = True,
    no_reverse: bool = False,
) -> bool:
    """Whether ``query.k`` pebbles can be gathered on ``query.target``.

    ``no_reverse`` forbids using an edge in both directions within one move
    sequence; it is sound by the no-cycle lemma and is checked against the
    unpruned oracle in the test suite.
    """
    return reach_witness(graph, dist, query, prune=prune, no_reverse=no_reverse) is not None


def reach_witness(
    graph: PebbleGraph,
    dist: Distribution,
    query: ReachQuery,
    *,
    prune: bool = True,
    no_reverse: bool = False,
) -> list[Move] | None:
    """Replayable move list reaching the query, or ``None``."""
    _check_sizes(graph, dist)
    if not all(0 <= t < len(graph) for t in query.target):
        raise ValueError("target vertex outside the graph")
    return _search(graph, dist.counts, query.target, query.k, prune, no_reverse)


LOCAL_RADIUS = 4
LOCAL_MIN_VERTICES = 48


def _ball(graph: PebbleGraph, v: int, radius: int) -> list[int]:
    row = graph.distances[v]
    return [u for u in range(len(graph)) if 0 <= row[u] <= radius]


def _reachable_locally(graph: PebbleGraph, counts, v: int, k: int, radius: int) -> bool:
    """Sufficient test: reachable using only the ball of ``radius`` around ``v``.

    Moves inside an induced subgraph are moves of the whole graph.
    """
    keep = _ball(graph, v, radius)
    if len(keep) == len(graph):
        return False
    sub = graph.induced(keep, renumber_slashes=False)
    sub_counts = [counts[u] for u in keep]
    return _search(sub, sub_counts, frozenset([keep.index(v)]), k) is not None


def first_unreachable(
    graph: PebbleGraph,
    dist: Distribution,
    k: int = 1,
    local_radius: int | None | str = "auto",
    max_states: int | None = None,
) -> int | None:
    """First vertex that is not ``k``-reachable, or ``None`` if ``dist`` is ``k``-solvable.

    Vertices are tried by ascending weight (ties by index), so the weakest
    vertex fails first; the yes/no answer does not depend on the order.  On
    large graphs each vertex is first tried inside a small distance ball; the
    global search decides whatever the ball cannot certify.  With
    ``max_states`` set, a global search that grows past it raises
    :class:`SearchLimit` instead of answering.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    _check_sizes(graph, dist)
    if local_radius == "auto":
        local_radius = LOCAL_RADIUS if len(graph) > LOCAL_MIN_VERTICES else None
    counts = dist.counts
    todo = [v for v in range(len(graph)) if counts[v] < k]
    if not todo:
        return None
    dmat = graph.distances
    top = int(dmat.max()) if len(graph) else 0
    scale = [1 << (top - d) if d >= 0 else 0 for d in range(top + 1)]

    def weight(v):
        return sum(c * scale[d] for c, d in zip(counts, dmat[v].tolist()) if c and d >= 0)

    ranked = sorted((weight(v), v) for v in todo)
    for wt, v in ranked:
        if wt < (k << top):
            return v
        if local_radius is not None and _reachable_locally(graph, counts, v, k, local_radius):
            continue
        if _search(graph, counts, frozenset([v]), k, max_states=max_states) is None:
            return v
    return None


def is_k_solvable(graph: PebbleGraph, dist: Distribution, k: int = 1) -> bool:
    return first_unreachable(graph, dist, k) is None


def is_solvable(graph: PebbleGraph, dist: Distribution) -> bool:
    return first_unreachable(graph, dist, 1) is None


def max_reachable(graph: PebbleGraph, dist: Distribution, target: int | Iterable[int]) -> int:
    """Largest number of pebbles that can be gathered on ``target``."""
    query_k = 1
    targets = frozenset([target]) if isinstance(target, int) else frozenset(target)
    while _search(graph, dist.counts, targets, query_k) is not None:
        query_k += 1
    return query_k - 1


# -- slash structure --------------------------------------------------------------


def two_reachable_slashes(graph: PebbleGraph, dist: Distribution) -> frozenset[int]:
    """Slashes onto which a total of two pebbles can be gathered."""
    _check_sizes(graph, dist)
    return frozenset(
        s for s, members in graph.slashes.items() if _search(graph, dist.counts, frozenset(members), 2) is not None
    )


def _cut_crossable(graph: PebbleGraph, dist: Distribution, left_slash: int) -> bool:
    ends = sorted({v for e in graph.cut_edges(left_slash) for v in e})
    return any(_search(graph, dist.counts, frozenset([v]), 2) is not None for v in ends)


def crossing_move_possible(graph: PebbleGraph, dist: Distribution, boundary: int) -> tuple[bool, bool]:
    """Can some reachable state move a pebble across the cut left/right of ``boundary``?

    A move over an edge needs two pebbles on one of its ends, so a side is
    crossable iff some endpoint of its cut edges is 2-reachable.
    """
    _check_sizes(graph, dist)
    n = graph.num_slashes
    if not 1 < boundary < n:
        raise ValueError(f"boundary {boundary} is not an inner slash of 1..{n}")
    return _cut_crossable(graph, dist, boundary - 1), _cut_crossable(graph, dist, boundary)


class Side(enum.Enum):
    LEFT = "left"    # cut between slashes boundary-1 and boundary
    RIGHT = "right"  # cut between slashes boundary and boundary+1


@dataclass(frozen=True)
class Split:
    cut_after: int
    left_graph: PebbleGraph
    left_dist: Distribution
    right_graph: PebbleGraph
    right_dist: Distribution


def right_part_variant(spec: grid.StaircaseSpec, c: int) -> grid.Variant:
    """Variant of the part after slash ``c``: odd cuts swap plain and prime."""
    if spec.m % 2 == 0:
        return grid.Variant.PLAIN
    if c % 2 == 0:
        return spec.variant
    return grid.Variant.PLAIN if spec.prime else grid.Variant.PRIME


def _restrict(graph: PebbleGraph, dist: Distribution, keep, spec):
    part = graph.induced(keep)
    part_dist = Distribution(tuple(dist[v] for v in sorted(keep)))
    if spec is None:
        return part, part_dist
    canon = grid.build_staircase(spec)
    perm = grid.align_slashed(part, canon)
    if perm is None:
        raise ValueError(f"part is not isometric to {spec}")
    return canon, part_dist.permuted(perm)


def split_staircase(graph: PebbleGraph, dist: Distribution, c: int) -> Split:
    """Delete the edges between slashes ``c`` and ``c + 1`` (no checks)."""
    n = graph.num_slashes
    if not 1 <= c < n:
        raise ValueError(f"cut position {c} outside 1..{n - 1}")
    left = [v for v, s in enumerate(graph.slash_index) if s <= c]
    right = [v for v, s in enumerate(graph.slash_index) if s > c]
    spec = graph.spec
    lspec = rspec = None
    if spec is not None:
        lspec = spec.with_length(c)
        rspec = spec.with_length(n - c, right_part_variant(spec, c))
    lg, ld = _restrict(graph, dist, left, lspec)
    rg, rd = _restrict(graph, dist, right, rspec)
    return Split(c, lg, ld, rg, rd)


def split_at_cut(graph: PebbleGraph, dist: Distribution, boundary: int, side: Side) -> Split:
    """Cut next to ``boundary`` where no pebbling move can cross.

    Parts of a staircase are returned as canonical staircases, the right part
    with the variant fixed by the parity of the cut.  Both induced
    distributions are re-verified solvable.
    """
    side = Side(side)
    left_ok, right_ok = crossing_move_possible(graph, dist, boundary)
    crossable = left_ok if side is Side.LEFT else right_ok
    if crossable:
        raise ValueError(f"a pebbling move can cross the {side.value} cut of slash {boundary}")
    c = boundary - 1 if side is Side.LEFT else boundary
    split = split_staircase(graph, dist, c)
    for g, d, label in ((split.left_graph, split.left_dist, "left"), (split.right_graph, split.right_dist, "right")):
        bad = first_unreachable(g, d)
        if bad is not None:
            raise ValueError(f"{label} part is not solvable (vertex {bad} unreachable)")
    return split
