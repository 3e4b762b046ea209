"""Grid windows, staircase graphs and quotient maps.

Vertices are lattice points ``(x, y)``.  A staircase is cut out of the
infinite grid by a band of negative diagonals (``x + y`` fixed) and a band of
positive diagonals (``x - y`` fixed).  The positive diagonals that meet the
graph are its *slashes*, numbered ``1..n`` in increasing ``x - y``.
"""

from __future__ import annotations

import enum
import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Callable, Iterator, NamedTuple, Sequence

import numpy as np

if TYPE_CHECKING:
    from .pebble import Distribution


class GridCoord(NamedTuple):
    x: int
    y: int

    @property
    def neg(self) -> int:
        """Index of the negative diagonal, ``x + y``."""
        return self.x + self.y

    @property
    def pos(self) -> int:
        """Index of the positive diagonal, ``x - y``."""
        return self.x - self.y

    @classmethod
    def from_diagonals(cls, neg: int, pos: int) -> GridCoord:
        if (neg - pos) % 2:
            raise ValueError(f"diagonals {neg}, {pos} have different parity")
        return cls((neg + pos) // 2, (neg - pos) // 2)


class Variant(enum.Enum):
    PLAIN = "plain"
    PRIME = "prime"

    def __lt__(self, other: Variant) -> bool:
        if not isinstance(other, Variant):
            return NotImplemented
        return self.value < other.value


_SPEC_RE = re.compile(r"^\s*S(')?_?\{?\s*(\d+)\s*,\s*(\d+)\s*\}?\s*$")


@dataclass(frozen=True, order=True)
class StaircaseSpec:
    m: int
    n: int
    variant: Variant = Variant.PLAIN

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"staircase needs m, n >= 1, got {self.m}, {self.n}")
        # even widths have a single isomorphism class
        if self.m % 2 == 0 and self.variant is Variant.PRIME:
            object.__setattr__(self, "variant", Variant.PLAIN)

    @property
    def prime(self) -> bool:
        return self.variant is Variant.PRIME

    def with_length(self, n: int, variant: Variant | None = None) -> StaircaseSpec:
        return StaircaseSpec(self.m, n, self.variant if variant is None else variant)

    def pos_range(self) -> range:
        """Positive diagonals ``x - y`` covered by the staircase."""
        if self.m % 2 == 1 and not self.prime:
            return range(0, self.n)
        return range(1, self.n + 1)

    @classmethod
    def parse(cls, text: str) -> StaircaseSpec:
        """Parse ``"S3,6"``, ``"S'5,7"`` or ``"S_{7,8}"``."""
        match = _SPEC_RE.match(text)
        if not match:
            raise ValueError(f"cannot parse staircase spec {text!r}")
        prime, m, n = match.groups()
        return cls(int(m), int(n), Variant.PRIME if prime else Variant.PLAIN)

    def __str__(self) -> str:
        return f"S{chr(39) if self.prime else ''}{self.m},{self.n}"

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "variant": self.variant.value}

    @classmethod
    def from_json(cls, data: dict) -> StaircaseSpec:
        return cls(int(data["m"]), int(data["n"]), Variant(data.get("variant", "plain")))


_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True, eq=False)
class PebbleGraph:
    """Finite induced subgraph of the square grid.

    ``adjacency[i]`` lists the neighbours of vertex ``i`` in ascending order.
    Slash and negative-diagonal indices are 1-based and only present for
    staircase-shaped graphs.
    """

    vertices: tuple[GridCoord, ...]
    adjacency: tuple[tuple[int, ...], ...]
    slash_index: tuple[int, ...] | None = None
    neg_diag_index: tuple[int, ...] | None = None
    spec: StaircaseSpec | None = None
    name: str = field(default="", compare=False)

    @classmethod
    def from_coords(
        cls,
        coords: Sequence[tuple[int, int]],
        slash_index: Sequence[int] | None = None,
        neg_diag_index: Sequence[int] | None = None,
        spec: StaircaseSpec | None = None,
        name: str = "",
    ) -> PebbleGraph:
        verts = tuple(GridCoord(int(x), int(y)) for x, y in coords)
        where = {c: i for i, c in enumerate(verts)}
        if len(where) != len(verts):
            raise ValueError("duplicate vertex coordinates")
        adj = []
        for c in verts:
            nbrs = (where.get(GridCoord(c.x + dx, c.y + dy)) for dx, dy in _STEPS)
            adj.append(tuple(sorted(i for i in nbrs if i is not None)))
        return cls(
            verts,
            tuple(adj),
            None if slash_index is None else tuple(int(s) for s in slash_index),
            None if neg_diag_index is None else tuple(int(s) for s in neg_diag_index),
            spec,
            name or (str(spec) if spec else ""),
        )

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> dict[GridCoord, int]:
        return {c: i for i, c in enumerate(self.vertices)}

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, w) for u, nbrs in enumerate(self.adjacency) for w in nbrs if u < w)

    def has_edge(self, u: int, w: int) -> bool:
        return w in self.adjacency[u]

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs hop distances; ``-1`` marks unreachable pairs."""
        n = len(self.vertices)
        dist = np.full((n, n), -1, dtype=np.int64)
        for s in range(n):
            dist[s, s] = 0
            queue = deque([s])
            row = dist[s]
            while queue:
                u = queue.popleft()
                for w in self.adjacency[u]:
                    if row[w] < 0:
                        row[w] = row[u] + 1
                        queue.append(w)
        dist.setflags(write=False)
        return dist

    def is_connected(self) -> bool:
        return len(self.vertices) == 0 or bool((self.distances[0] >= 0).all())

    @property
    def has_slashes(self) -> bool:
        return self.slash_index is not None

    @cached_property
    def slashes(self) -> dict[int, tuple[int, ...]]:
        if self.slash_index is None:
            raise ValueError(f"graph {self.name or '<anonymous>'} has no slash structure")
        out: dict[int, list[int]] = {}
        for v, s in enumerate(self.slash_index):
            out.setdefault(s, []).append(v)
        return {s: tuple(out[s]) for s in sorted(out)}

    @property
    def num_slashes(self) -> int:
        return len(self.slashes)

    def cut_edges(self, left_slash: int) -> tuple[tuple[int, int], ...]:
        """Edges between slash ``left_slash`` and slash ``left_slash + 1``."""
        sl = self.slash_index
        if sl is None:
            raise ValueError("graph has no slash structure")
        return tuple(
            (u, w) for u, w in self.edges if {sl[u], sl[w]} == {left_slash, left_slash + 1}
        )

    def induced(self, keep: Sequence[int], renumber_slashes: bool = True) -> PebbleGraph:
        """Induced subgraph on ``keep`` (vertex order preserved)."""
        keep = sorted(keep)
        coords = [self.vertices[i] for i in keep]
        slash = diag = None
        if self.slash_index is not None:
            slash = [self.slash_index[i] for i in keep]
            if renumber_slashes and slash:
                lo = min(slash)
                slash = [s - lo + 1 for s in slash]
        if self.neg_diag_index is not None:
            diag = [self.neg_diag_index[i] for i in keep]
        return PebbleGraph.from_coords(coords, slash, diag)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json() if self.spec else None,
            "vertices": [[c.x, c.y] for c in self.vertices],
            "edges": [[u, w] for u, w in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> PebbleGraph:
        if data.get("spec") is not None and not data.get("vertices"):
            return build_staircase(StaircaseSpec.from_json(data["spec"]))
        spec = StaircaseSpec.from_json(data["spec"]) if data.get("spec") else None
        if spec is not None:
            graph = build_staircase(spec)
            if [[c.x, c.y] for c in graph.vertices] != [list(map(int, v)) for v in data["vertices"]]:
                raise ValueError(f"vertex list does not match staircase {spec}")
        else:
            graph = cls.from_coords([tuple(v) for v in data["vertices"]])
        edges = sorted(tuple(sorted(map(int, e))) for e in data.get("edges", []))
        if edges and edges != list(graph.edges):
            raise ValueError("edge list is not the induced grid adjacency")
        return graph

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def to_dot(self, dist: Distribution | None = None) -> str:
        lines = [f'graph "{self.name or "G"}" {{', "  node [shape=circle];"]
        for i, c in enumerate(self.vertices):
            label = f"{c.x},{c.y}"
            if dist is not None and dist[i]:
                label = str(dist[i])
            attrs = [f'label="{label}"', f'pos="{c.x},{c.y}!"']
            if self.slash_index is not None:
                attrs.append(f"slash={self.slash_index[i]}")
            lines.append(f"  v{i} [{', '.join(attrs)}];")
        if self.slash_index is not None:
            for s, members in self.slashes.items():
                lines.append(f"  {{ rank=same; {' '.join(f'v{v}' for v in members)} }}")
        for u, w in self.edges:
            lines.append(f"  v{u} -- v{w};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_staircase(spec: StaircaseSpec) -> PebbleGraph:
    """Induced subgraph on ``x + y in [1, m]`` and ``x - y`` in ``spec.pos_range()``."""
    pos_range = spec.pos_range()
    base = pos_range.start
    rows = []
    for pos in pos_range:
        for neg in range(1, spec.m + 1):
            if (neg - pos) % 2 == 0:
                c = GridCoord.from_diagonals(neg, pos)
                rows.append((pos - base + 1, c.x, c, neg))
    rows.sort()
    return PebbleGraph.from_coords(
        [r[2] for r in rows],
        slash_index=[r[0] for r in rows],
        neg_diag_index=[r[3] for r in rows],
        spec=spec,
    )


def build_grid_window(rows: int, cols: int) -> PebbleGraph:
    """The ``rows x cols`` grid ``P_rows [] P_cols``; vertex ``(x, y)`` with ``x < cols``."""
    if rows < 1 or cols < 1:
        raise ValueError(f"grid window needs positive dimensions, got {rows}x{cols}")
    coords = [(x, y) for y in range(rows) for x in range(cols)]
    return PebbleGraph.from_coords(coords, name=f"grid{rows}x{cols}")


def path_graph(n: int) -> PebbleGraph:
    graph = build_grid_window(1, n)
    object.__setattr__(graph, "name", f"P{n}")
    return graph


# -- isometries and isomorphisms ---------------------------------------------

# The eight symmetries of the square lattice, identity first.
_DIHEDRAL: tuple[Callable[[int, int], tuple[int, int]], ...] = (
    lambda x, y: (x, y),
    lambda x, y: (-y, -x),
    lambda x, y: (y, x),
    lambda x, y: (-x, -y),
    lambda x, y: (-x, y),
    lambda x, y: (x, -y),
    lambda x, y: (-y, x),
    lambda x, y: (y, -x),
)


def lattice_alignments(
    src: Sequence[GridCoord], dst: Sequence[GridCoord]
) -> Iterator[dict[GridCoord, GridCoord]]:
    """Yield every lattice isometry carrying the point set ``src`` onto ``dst``."""
    if len(src) != len(dst):
        return
    target = set(dst)
    anchor = min(dst)
    for sym in _DIHEDRAL:
        image = [GridCoord(*sym(c.x, c.y)) for c in src]
        lo = min(image)
        dx, dy = anchor.x - lo.x, anchor.y - lo.y
        moved = [GridCoord(c.x + dx, c.y + dy) for c in image]
        if set(moved) == target:
            yield dict(zip(src, moved))


def align_slashed(src: PebbleGraph, dst: PebbleGraph) -> tuple[int, ...] | None:
    """Vertex map ``src -> dst`` from a lattice isometry keeping slash order.

    Both graphs must carry slash indices; the first isometry (in a fixed
    order) sending slash ``i`` of ``src`` to slash ``i`` of ``dst`` wins.
    """
    for mapping in lattice_alignments(src.vertices, dst.vertices):
        perm = tuple(dst.index[mapping[c]] for c in src.vertices)
        if all(src.slash_index[i] == dst.slash_index[j] for i, j in enumerate(perm)):
            return perm
    return None


def is_isomorphism(g: PebbleGraph, h: PebbleGraph, perm: Sequence[int]) -> bool:
    """Check adjacency and non-adjacency are preserved over all vertex pairs."""
    n = len(g)
    if len(h) != n or sorted(perm) != list(range(n)):
        return False
    for u in range(n):
        image = sorted(perm[w] for w in g.adjacency[u])
        if tuple(image) != h.adjacency[perm[u]]:
            return False
    return True


def iter_isomorphisms(g: PebbleGraph, h: PebbleGraph) -> Iterator[tuple[int, ...]]:
    """Backtracking enumeration of all isomorphisms ``g -> h``.

    Candidates are filtered by the sorted distance profile of each vertex and
    extended only when every distance to already-mapped vertices agrees.
    """
    n = len(g)
    if len(h) != n or len(g.edges) != len(h.edges):
        return
    dg, dh = g.distances, h.distances
    prof_g = [tuple(sorted(r)) for r in dg.tolist()]
    prof_h = [tuple(sorted(r)) for r in dh.tolist()]
    if sorted(prof_g) != sorted(prof_h):
        return
    cands = [[w for w in range(n) if prof_h[w] == prof_g[u]] for u in range(n)]
    # map most constrained vertices first
    order = sorted(range(n), key=lambda u: (len(cands[u]), u))
    perm = [-1] * n
    used = [False] * n

    def extend(depth: int) -> Iterator[tuple[int, ...]]:
        if depth == n:
            yield tuple(perm)
            return
        u = order[depth]
        for w in cands[u]:
            if used[w]:
                continue
            if all(dg[u, order[j]] == dh[w, perm[order[j]]] for j in range(depth)):
                perm[u] = w
                used[w] = True
                yield from extend(depth + 1)
                used[w] = False
                perm[u] = -1

    yield from extend(0)


EXHAUSTIVE_ISO_CAP = 20


def staircase_isomorphism(a: StaircaseSpec, b: StaircaseSpec) -> tuple[int, ...] | None:
    """Explicit vertex bijection ``build_staircase(a) -> build_staircase(b)`` or ``None``.

    Lattice isometries cover the width/length swap and the plain/prime
    coincidence for even lengths; graphs up to ``EXHAUSTIVE_ISO_CAP`` vertices
    additionally get an exhaustive search.
    """
    ga, gb = build_staircase(a), build_staircase(b)
    if len(ga) != len(gb) or len(ga.edges) != len(gb.edges):
        return None
    for mapping in lattice_alignments(ga.vertices, gb.vertices):
        perm = tuple(gb.index[mapping[c]] for c in ga.vertices)
        if is_isomorphism(ga, gb, perm):
            return perm
    if len(ga) <= EXHAUSTIVE_ISO_CAP:
        for perm in iter_isomorphisms(ga, gb):
            if is_isomorphism(ga, gb, perm):
                return perm
    return None


# -- quotients ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """Surjection ``source -> target`` whose edge images are exactly the target edges.

    Source edges whose endpoints share an image are ignored (no loops).
    """

    source: PebbleGraph
    target: PebbleGraph
    assignment: tuple[int, ...]

    def __post_init__(self):
        if len(self.assignment) != len(self.source):
            raise ValueError("assignment must cover every source vertex")
        if set(self.assignment) != set(range(len(self.target))):
            raise ValueError("assignment is not surjective onto the target")
        images = set()
        for u, w in self.source.edges:
            a, b = self.assignment[u], self.assignment[w]
            if a != b:
                images.add((min(a, b), max(a, b)))
        if images != set(self.target.edges):
            raise ValueError("quotient condition fails: edge images differ from target edges")

    def image(self, vertices) -> frozenset[int]:
        return frozenset(self.assignment[v] for v in vertices)


def collapse(qmap: QuotientMap, dist: Distribution) -> Distribution:
    """Collapsed distribution: pebbles summed over each preimage."""
    from .pebble import Distribution

    if len(dist) != len(qmap.source):
        raise ValueError(
            f"distribution has {len(dist)} entries, source graph has {len(qmap.source)} vertices"
        )
    counts = [0] * len(qmap.target)
    for v, c in enumerate(dist.counts):
        counts[qmap.assignment[v]] += c
    return Distribution(tuple(counts))


def identity_map(graph: PebbleGraph) -> QuotientMap:
    return QuotientMap(graph, graph, tuple(range(len(graph))))


def slash_to_path_map(graph: PebbleGraph) -> QuotientMap:
    """Send slash ``s`` to vertex ``s - 1`` of the path ``P_n``."""
    if graph.slash_index is None:
        raise ValueError("slash_to_path_map needs a graph with slash structure")
    n = graph.num_slashes
    return QuotientMap(graph, path_graph(n), tuple(s - 1 for s in graph.slash_index))


def merge_negative_diagonals_7to6(graph: PebbleGraph) -> QuotientMap:
    """Fold negative diagonal 1 of a 7-wide staircase onto diagonal 3.

    The folded vertex set occupies diagonals 2..7, a 6-wide staircase; it is
    carried onto ``S_{6,n}`` by a slash-preserving lattice isometry.
    """
    spec = graph.spec
    if spec is None or spec.m != 7 or graph.neg_diag_index is None:
        raise ValueError("merge_negative_diagonals_7to6 needs a 7-wide staircase")
    folded = []
    for c, diag in zip(graph.vertices, graph.neg_diag_index):
        folded.append(GridCoord(c.x + 1, c.y + 1) if diag == 1 else c)
    image_ids = sorted({graph.index[c] for c in folded})
    middle = graph.induced(image_ids)
    target = build_staircase(StaircaseSpec(6, spec.n))
    perm = align_slashed(middle, target)
    if perm is None:
        raise ValueError(f"folded {spec} is not a 6-wide staircase")
    onto = {middle.vertices[i]: j for i, j in enumerate(perm)}
    return QuotientMap(graph, target, tuple(onto[c] for c in folded))
