"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from stairpebble.grid import StaircaseSpec, Variant, build_staircase
from stairpebble.pebble import Distribution


@st.composite
def specs(draw, min_m=2, max_m=7, min_n=1, max_n=7):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(min_n, max_n))
    var = draw(st.sampled_from([Variant.PLAIN, Variant.PRIME]))
    return StaircaseSpec(m, n, var)


@st.composite
def graphs_with_dist(draw, max_vertices=14, max_pebbles=7, **kw):
    spec = draw(specs(**kw).filter(lambda s: len(build_staircase(s)) <= max_vertices))
    graph = build_staircase(spec)
    size = draw(st.integers(0, max_pebbles))
    verts = draw(st.lists(st.integers(0, len(graph) - 1), min_size=size, max_size=size))
    return graph, Distribution.from_multiset(len(graph), verts)
