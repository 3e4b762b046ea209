"""Brute-force reference implementations.

Nothing here prunes, memoises on weights, or uses symmetry; these functions
exist to be compared against the fast paths in ``pebble`` and ``search``.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Iterable

from .grid import PebbleGraph


def reachable_states(graph: PebbleGraph, counts: Iterable[int]) -> set[tuple[int, ...]]:
    """Every distribution reachable by pebbling moves (breadth first)."""
    start = tuple(counts)
    seen = {start}
    frontier = [start]
    adj = graph.adjacency
    while frontier:
        nxt = []
        for state in frontier:
            for u, c in enumerate(state):
                if c < 2:
                    continue
                for w in adj[u]:
                    s = list(state)
                    s[u] -= 2
                    s[w] += 1
                    t = tuple(s)
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        frontier = nxt
    return seen


def naive_max_on(graph: PebbleGraph, counts: Iterable[int], targets: Iterable[int]) -> int:
    targets = list(targets)
    return max(sum(s[t] for t in targets) for s in reachable_states(graph, counts))


def naive_reachable(graph: PebbleGraph, counts: Iterable[int], targets: Iterable[int], k: int) -> bool:
    return naive_max_on(graph, counts, targets) >= k


def naive_solvable(graph: PebbleGraph, counts: Iterable[int], k: int = 1) -> bool:
    states = reachable_states(graph, counts)
    best = [0] * len(graph)
    for s in states:
        for v, c in enumerate(s):
            if c > best[v]:
                best[v] = c
    return all(b >= k for b in best)


def naive_optimal(graph: PebbleGraph, k: int = 1, limit: int = 64) -> tuple[int, tuple[int, ...]]:
    """Smallest ``k``-solvable size by trying every multiset of every size."""
    n = len(graph)
    for t in range(k, limit + 1):
        for combo in combinations_with_replacement(range(n), t):
            counts = [0] * n
            for v in combo:
                counts[v] += 1
            if naive_solvable(graph, counts, k):
                return t, tuple(counts)
    raise RuntimeError(f"no {k}-solvable distribution with at most {limit} pebbles")
