"""Explicit solvable distributions on staircases and grid windows.

Every function here verifies its output with the exact solvability check
before returning it; a failed check raises :class:`ConstructionError`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

from .grid import (
    GridCoord,
    PebbleGraph,
    StaircaseSpec,
    Variant,
    align_slashed,
    build_grid_window,
    build_staircase,
    staircase_isomorphism,
)
from .pebble import Distribution, SearchLimit, first_unreachable, right_part_variant
from .search import Budget, BudgetExhausted, optimal_pebbling_number

log = logging.getLogger(__name__)

Block = tuple[StaircaseSpec, Distribution]

BASE_MAX_LENGTH = 9
BASE_BUDGET_SECONDS = 600.0
VERIFY_MAX_STATES = 200_000  # per vertex; bounds memory when ranking candidates


class ConstructionError(RuntimeError):
    """A construction produced a distribution that is not solvable."""


@dataclass(frozen=True)
class ConstructionPlan:
    """Recipe for one distribution: a family name plus its base blocks."""

    spec: StaircaseSpec
    family: str
    blocks: tuple[StaircaseSpec, ...] = ()
    params: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "spec": str(self.spec),
            "family": self.family,
            "blocks": [str(b) for b in self.blocks],
            "params": dict(self.params),
        }


@dataclass(frozen=True)
class Construction:
    plan: ConstructionPlan
    dist: Distribution

    @property
    def spec(self) -> StaircaseSpec:
        return self.plan.spec

    @property
    def size(self) -> int:
        return self.dist.size

    def to_json(self) -> dict:
        return {**self.plan.to_json(), "size": self.size, "pebbles": [[v, c] for v, c in self.dist.pebbles()]}


def verified(
    graph: PebbleGraph, dist: Distribution, what: str = "construction", max_states: int | None = None
) -> Distribution:
    try:
        bad = first_unreachable(graph, dist, max_states=max_states)
    except SearchLimit as exc:
        raise ConstructionError(f"{what} on {graph.name or 'graph'} undecided: {exc}") from exc
    if bad is not None:
        raise ConstructionError(f"{what} on {graph.name or 'graph'} leaves vertex {bad} unreachable")
    return dist


def _place(spec: StaircaseSpec, piles: dict[tuple[int, int], int]) -> Distribution:
    """Distribution on ``build_staircase(spec)`` from ``(neg, pos) -> count``."""
    graph = _graph(spec)
    counts = [0] * len(graph)
    for (s, d), c in piles.items():
        coord = GridCoord.from_diagonals(s, d)
        if coord not in graph.index:
            raise ValueError(f"diagonals ({s}, {d}) are outside {spec}")
        counts[graph.index[coord]] += c
    return Distribution(tuple(counts))


@lru_cache(maxsize=256)
def _graph(spec: StaircaseSpec) -> PebbleGraph:
    return build_staircase(spec)


def transport(dist: Distribution, src: StaircaseSpec, dst: StaircaseSpec) -> Distribution:
    """Move a distribution across an isomorphism ``src -> dst``."""
    if src == dst:
        return dist
    perm = staircase_isomorphism(src, dst)
    if perm is None:
        raise ValueError(f"{src} and {dst} are not isomorphic")
    return dist.permuted(perm)


# -- base blocks ---------------------------------------------------------------------


def base_witness(spec: StaircaseSpec, cache=None, budget: Budget | None = None) -> Distribution:
    """Optimal distribution of a small staircase: cached, else searched."""
    if cache is None:
        from .harness.cache import default_cache

        cache = default_cache()
    entry = cache.get(spec)
    if entry is not None:
        return entry.witness
    if spec.m % 2 == 1 and spec.n % 2 == 0:
        twin = spec.with_length(spec.n, Variant.PRIME if not spec.prime else Variant.PLAIN)
        entry = cache.get(twin)
        if entry is not None:
            return transport(entry.witness, twin, spec)
    budget = budget or Budget(seconds=BASE_BUDGET_SECONDS)
    try:
        report = optimal_pebbling_number(_graph(spec), 1, budget)
    except BudgetExhausted as exc:
        raise ConstructionError(f"no cached optimum for {spec} and search ran out of budget") from exc
    return report.witness


def concatenate(left: Block, right: Block, check: bool = True) -> Block:
    """Glue two staircase distributions of equal width along a slash seam.

    The right block must carry the variant that the seam parity demands of
    the part after slash ``left.n``; even-length blocks are transported
    automatically.  ``check=False`` skips the solvability check.
    """
    (ls, ld), (rs, rd) = left, right
    if ls.m != rs.m:
        raise ValueError(f"widths differ: {ls.m} vs {rs.m}")
    spec = ls.with_length(ls.n + rs.n)
    want = spec.with_length(rs.n, right_part_variant(spec, ls.n))
    if rs != want:
        rd = transport(rd, rs, want)
    whole = _graph(spec)
    counts = [0] * len(whole)
    for part_spec, part_dist, lo, hi in ((ls, ld, 1, ls.n), (want, rd, ls.n + 1, spec.n)):
        keep = [v for v, s in enumerate(whole.slash_index) if lo <= s <= hi]
        perm = align_slashed(_graph(part_spec), whole.induced(keep))
        if perm is None:
            raise ValueError(f"{part_spec} does not fit slashes {lo}..{hi} of {spec}")
        for v, c in enumerate(part_dist.counts):
            counts[keep[perm[v]]] += c
    dist = Distribution(tuple(counts))
    if check:
        verified(whole, dist, f"concatenation {ls} + {want}")
    return spec, dist


# -- widths 3 to 6 -------------------------------------------------------------------


def _block_optima(m: int, cache, max_len: int) -> dict[StaircaseSpec, Distribution]:
    out = {}
    for n in range(1, max_len + 1):
        for var in (Variant.PLAIN, Variant.PRIME) if m % 2 else (Variant.PLAIN,):
            spec = StaircaseSpec(m, n, var)
            try:
                out[spec] = base_witness(spec, cache)
            except ConstructionError:
                log.info("no base block for %s", spec)
    return out


def narrow_plan(spec: StaircaseSpec, cache=None, max_block: int = BASE_MAX_LENGTH) -> list[StaircaseSpec]:
    """Cheapest split of ``spec`` into base blocks, by dynamic programming over cuts.

    Block ``i`` covering slashes ``c+1..c'`` has the variant the cut parity
    gives it.  Concatenations of solvable blocks are solvable, so the total
    is an upper bound.
    """
    blocks = _block_optima(spec.m, cache, max_block)
    inf = float("inf")
    best = [inf] * (spec.n + 1)
    back: list[StaircaseSpec | None] = [None] * (spec.n + 1)
    best[0] = 0
    for end in range(1, spec.n + 1):
        for length in range(min(max_block, end), 0, -1):
            c = end - length
            if best[c] == inf:
                continue
            var = spec.variant if c == 0 else right_part_variant(spec.with_length(end), c)
            block = StaircaseSpec(spec.m, length, var)
            if block not in blocks:
                continue
            cost = best[c] + blocks[block].size
            # ties go to fewer, longer blocks
            if cost < best[end]:
                best[end], back[end] = cost, block
    if best[spec.n] == inf:
        raise ConstructionError(f"no block decomposition for {spec}")
    plan, end = [], spec.n
    while end:
        plan.append(back[end])
        end -= back[end].n
    return plan[::-1]


def _assemble(blocks: list[StaircaseSpec], cache) -> Block:
    cur = (blocks[0], base_witness(blocks[0], cache))
    for b in blocks[1:]:
        cur = concatenate(cur, (b, base_witness(b, cache)))
    return cur


# -- width 7 -----------------------------------------------------------------------


def _prime_pattern_piles(n: int) -> dict[tuple[int, int], int]:
    """``S'_{7,n}`` for ``n = 4k + 3``: corner neighbours plus 4-piles on diagonal 4."""
    if n % 4 != 3:
        raise ValueError("the general pattern needs n = 3 mod 4")
    k = (n - 3) // 4
    piles = {(2, 2): 1, (6, 2): 1, (2, n - 1): 1, (6, n - 1): 1}
    for i in range(1, k + 1):
        piles[(4, 4 * i)] = piles.get((4, 4 * i), 0) + 4
    return piles


def _shift(piles: dict[tuple[int, int], int], dd: int, lo: int, hi: int) -> dict[tuple[int, int], int]:
    return {(s, d + dd): c for (s, d), c in piles.items() if lo <= d <= hi}


# Two extra slashes for S_{7,4k+3}: the first gets both pebbles.
PLAIN_TAIL = ((3, 1), (5, 1))


def seven_wide_pattern(n: int, variant: Variant | str = Variant.PLAIN) -> Distribution:
    """General 7-wide pattern of length ``n`` (``n >= 3``), verified solvable.

    * ``S'_{7,4k+3}``: 1 pebble next to each corner, 4-piles at every fourth
      slash of the middle diagonal (``n + 1`` pebbles);
    * ``S_{7,4k+1}``: the same pattern without its end slashes (``n + 3``);
    * ``S_{7,4k+2}`` and ``S'_{7,4k+2}``: the ``4k+3`` pattern minus its last slash (``n + 2``);
    * ``S_{7,4k+3}``: the ``4k+1`` pattern plus two slashes carrying two pebbles (``n + 3``);
    * ``4k`` and ``S'_{7,4k+1}``: concatenations, see :func:`seven_wide_construction`.
    """
    variant = Variant(variant)
    spec = StaircaseSpec(7, n, variant)
    if n < 3:
        raise ValueError("the general pattern needs n >= 3")
    r = n % 4
    if r == 3 and spec.prime and n < 7:
        raise ValueError("S'_{7,4k+3} pattern needs k >= 1")
    if r == 3 and spec.prime:
        piles = _prime_pattern_piles(n)
    elif r == 1 and not spec.prime:
        # drop the first and last slash of S'_{7,n+2}; d = 2 becomes d = 0
        piles = _shift(_prime_pattern_piles(n + 2), -2, 2, n + 1)
    elif r == 2:
        piles = _shift(_prime_pattern_piles(n + 1), 0, 1, n)
        dist = _place(StaircaseSpec(7, n, Variant.PRIME), piles)
        dist = transport(dist, StaircaseSpec(7, n, Variant.PRIME), spec)
        return verified(_graph(spec), dist, f"pattern {spec}")
    elif r == 3 and not spec.prime:
        if n < 7:
            raise ValueError("S_{7,4k+3} pattern needs k >= 1")
        piles = _shift(_prime_pattern_piles(n), -2, 2, n - 1)
        for (s, off) in PLAIN_TAIL:
            piles[(s, n - 3 + off)] = piles.get((s, n - 3 + off), 0) + 1
    else:
        raise ValueError(f"no direct pattern for {spec}; use seven_wide_construction")
    return verified(_graph(spec), _place(spec, piles), f"pattern {spec}")


SEVEN_BASE_MAX = 8


def _seven_tails(spec: StaircaseSpec, cache) -> list[Distribution]:
    out = []
    try:
        out.append(seven_wide_pattern(spec.n, spec.variant))
    except ValueError:
        pass
    if spec.n <= SEVEN_BASE_MAX:
        out.append(base_witness(spec, cache))
    return out


def seven_wide_construction(spec: StaircaseSpec, cache=None, _twin: bool = True) -> Construction:
    """Best known distribution for a 7-wide staircase.

    Candidates: the cached or searched optimum for ``n <= 8``, the general
    pattern, every small optimal head block followed by a pattern or small
    optimal tail (this covers ``S_{7,5} + S'_{7,4k+3}`` and
    ``S'_{7,6} + S'_{7,4k+3}``), and for even ``n`` the other variant carried
    over by the isomorphism.  Candidates are verified smallest first and the
    first one that checks out wins; a candidate whose check would exceed
    ``VERIFY_MAX_STATES`` is passed over.
    """
    if spec.m != 7:
        raise ValueError("seven_wide_construction needs width 7")
    if cache is None:
        from .harness.cache import default_cache

        cache = default_cache()
    n = spec.n
    cands: list[Construction] = []
    if n <= SEVEN_BASE_MAX or cache.get(spec) is not None:
        cands.append(Construction(ConstructionPlan(spec, "base", (spec,)), base_witness(spec, cache)))
    try:
        cands.append(Construction(ConstructionPlan(spec, "pattern"), seven_wide_pattern(n, spec.variant)))
    except ValueError:
        pass
    for h in range(1, min(SEVEN_BASE_MAX, n - 1) + 1):
        head = spec.with_length(h)
        tail = spec.with_length(n - h, right_part_variant(spec, h))
        tails = _seven_tails(tail, cache)
        if not tails:
            continue
        tail_dist = min(tails, key=lambda d: d.size)
        _, dist = concatenate((head, base_witness(head, cache)), (tail, tail_dist), check=False)
        cands.append(Construction(ConstructionPlan(spec, "concatenation", (head, tail)), dist))
    if _twin and n % 2 == 0:
        other = spec.with_length(n, Variant.PLAIN if spec.prime else Variant.PRIME)
        twin = seven_wide_construction(other, cache, _twin=False)
        plan = ConstructionPlan(spec, "isomorphic", (other,) + twin.plan.blocks, {"via": twin.plan.family})
        cands.append(Construction(plan, transport(twin.dist, other, spec)))
    graph = _graph(spec)
    for c in sorted(cands, key=lambda c: c.size):
        try:
            verified(graph, c.dist, f"{c.plan.family} for {spec}", VERIFY_MAX_STATES)
        except ConstructionError as exc:
            log.debug("skipping candidate: %s", exc)
            continue
        return c
    raise ConstructionError(f"no verified 7-wide construction for {spec}")


# -- width extension -------------------------------------------------------------------


def widen(spec: StaircaseSpec, dist: Distribution) -> tuple[StaircaseSpec, Distribution]:
    """Solvable distribution on the ``m + 1``-wide staircase of the same length.

    Widening an even-width staircase yields the primed variant when ``n`` is
    odd (the two variants coincide for even ``n``).

    One pebble goes on negative diagonal ``m`` at every fourth slash from the
    second (from the first if diagonal ``m`` misses slash 2), and one on the
    last vertex of diagonal ``m`` unless it already got one.  Each old vertex
    then becomes 2-reachable next to the new diagonal.
    """
    graph = _graph(spec)
    verified(graph, dist, f"input to widen on {spec}")
    m, n = spec.m, spec.n
    on_m = {graph.slash_index[v]: v for v in range(len(graph)) if graph.neg_diag_index[v] == m}
    counts = list(dist.counts)
    added = set()
    if on_m:
        first = 2 if 2 in on_m else 1
        for s in range(first, n + 1, 4):
            if s in on_m:
                added.add(on_m[s])
        added.add(on_m[max(on_m)])
    # Build the wider graph in the same coordinates, then align to canonical.
    pos = spec.pos_range()
    coords = [c for c in graph.vertices]
    slash = list(graph.slash_index)
    diag = list(graph.neg_diag_index)
    for d in pos:
        if (m + 1 - d) % 2 == 0:
            coords.append(GridCoord.from_diagonals(m + 1, d))
            slash.append(d - pos.start + 1)
            diag.append(m + 1)
    counts += [0] * (len(coords) - len(graph))
    for v in added:
        counts[v] += 1
    if not on_m:
        last_new = max(range(len(graph), len(coords)), key=lambda v: slash[v])
        counts[last_new] += 1
    wide = PebbleGraph.from_coords(coords, slash, diag)
    # from an even width the new point set is the primed staircase
    for var in (Variant.PLAIN, Variant.PRIME):
        target_spec = StaircaseSpec(m + 1, n, var)
        target = _graph(target_spec)
        perm = align_slashed(wide, target)
        if perm is not None:
            break
    else:
        raise ConstructionError(f"widened {spec} is not a staircase of width {m + 1}")
    out = Distribution(tuple(counts)).permuted(perm)
    if target_spec.prime and n % 2 == 0:
        plain = target_spec.with_length(n, Variant.PLAIN)
        out, target_spec, target = transport(out, target_spec, plain), plain, _graph(plain)
    return target_spec, verified(target, out, f"widen({spec})")


# -- grid windows ---------------------------------------------------------------------


def grid_seven_diagonal(rows: int, cols: int, phase: int = 0) -> Distribution:
    """Solvable distribution on a grid window from the seven-diagonal pattern.

    Negative diagonals ``x + y`` are grouped in sevens starting at ``phase``;
    on each group's middle diagonal, every other vertex (every fourth
    positive diagonal) gets a 4-pile.  Vertices still unreachable are then
    patched one pebble at a time, weakest first.
    """
    graph = build_grid_window(rows, cols)
    counts = [0] * len(graph)
    for v, c in enumerate(graph.vertices):
        s, d = c.neg, c.pos
        if (s - phase) % 7 == 3 and (d - s) % 4 == 0:
            counts[v] += 4
    dist = Distribution(tuple(counts))
    while True:
        bad = first_unreachable(graph, dist)
        if bad is None:
            return dist
        dist = Distribution(tuple(c + (v == bad) for v, c in enumerate(dist.counts)))


# -- dispatcher ------------------------------------------------------------------------


def construct(spec: StaircaseSpec, cache=None, max_block: int = BASE_MAX_LENGTH) -> Construction:
    """Verified construction for any staircase of width 3 to 8."""
    if spec.m in (3, 4, 5, 6):
        blocks = narrow_plan(spec, cache, max_block)
        if len(blocks) == 1:
            return Construction(ConstructionPlan(spec, "base", tuple(blocks)), base_witness(blocks[0], cache))
        _, dist = _assemble(blocks, cache)
        return Construction(ConstructionPlan(spec, "concatenation", tuple(blocks)), dist)
    if spec.m == 7:
        return seven_wide_construction(spec, cache)
    if spec.m == 8:
        if cache is None:
            from .harness.cache import default_cache

            cache = default_cache()
        if cache.get(spec) is not None:
            return Construction(ConstructionPlan(spec, "base", (spec,)), cache.get(spec).witness)
        best = None
        for var in (Variant.PLAIN, Variant.PRIME):
            seven = seven_wide_construction(StaircaseSpec(7, spec.n, var), cache)
            _, dist = widen(seven.spec, seven.dist)
            if best is None or dist.size < best.size:
                best = Construction(ConstructionPlan(spec, "widen", (seven.spec,)), dist)
        return best
    raise ValueError(f"no construction for width {spec.m}")
