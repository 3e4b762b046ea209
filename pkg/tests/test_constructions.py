import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stairpebble.constructions import (
    ConstructionError,
    concatenate,
    construct,
    grid_seven_diagonal,
    narrow_plan,
    seven_wide_construction,
    seven_wide_pattern,
    widen,
)
from stairpebble.grid import StaircaseSpec, Variant, build_grid_window, build_staircase
from stairpebble.harness.cache import default_cache
from stairpebble.harness.tables import expected_value
from stairpebble.pebble import Distribution, is_k_solvable, right_part_variant, split_staircase

S = StaircaseSpec.parse
PLAIN, PRIME = Variant.PLAIN, Variant.PRIME


def _opt(text):
    spec = S(text)
    return spec, default_cache().get(spec).witness


def test_concatenate_two_blocks():
    spec, dist = concatenate(_opt("S3,4"), _opt("S3,4"))
    assert spec == S("S3,8") and dist.size == 6
    assert is_k_solvable(build_staircase(spec), dist)


def test_concatenate_transports_even_blocks():
    # after an odd cut of a plain staircase the right part must be prime
    spec, dist = concatenate(_opt("S3,3"), _opt("S3,4"))
    assert spec == S("S3,7") and dist.size == 6


def test_concatenate_rejects_wrong_odd_variant():
    with pytest.raises(ValueError):
        concatenate(_opt("S3,3"), _opt("S3,3"))  # would need S'3,3


def test_concatenate_rejects_width_mismatch():
    with pytest.raises(ValueError):
        concatenate(_opt("S3,4"), _opt("S4,4"))


@pytest.mark.parametrize("left, right", [("S3,4", "S3,4"), ("S3,3", "S'3,3"), ("S'5,3", "S5,5"), ("S6,5", "S6,6")])
def test_split_at_seam_recovers_blocks(left, right):
    (ls, ld), (rs, rd) = _opt(left), _opt(right)
    spec, dist = concatenate((ls, ld), (rs, rd))
    sp = split_staircase(build_staircase(spec), dist, ls.n)
    assert sp.left_dist == ld
    assert sp.right_graph.spec == rs and sp.right_dist == rd


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_seven_wide_pattern_sizes(k):
    assert seven_wide_pattern(4 * k + 3, PRIME).size == 4 * k + 4
    assert seven_wide_pattern(4 * k + 1, PLAIN).size == 4 * k + 4
    assert seven_wide_pattern(4 * k + 2, PLAIN).size == 4 * k + 4
    assert seven_wide_pattern(4 * k + 2, PRIME).size == 4 * k + 4
    assert seven_wide_pattern(4 * k + 3, PLAIN).size == 4 * k + 6


def test_seven_wide_pattern_needs_k_at_least_one():
    with pytest.raises(ValueError):
        seven_wide_pattern(3, PRIME)
    with pytest.raises(ValueError):
        seven_wide_pattern(8, PLAIN)


@pytest.mark.parametrize("n", [12, 16, 20])
def test_seven_wide_concatenation_recipes(n):
    assert seven_wide_construction(StaircaseSpec(7, n)).size == n + 2
    assert seven_wide_construction(StaircaseSpec(7, n + 1, PRIME)).size == n + 3


@given(st.integers(3, 26), st.sampled_from([PLAIN, PRIME]))
@settings(max_examples=12)
def test_seven_wide_in_interval(n, var):
    c = seven_wide_construction(StaircaseSpec(7, n, var))
    assert n + 1 <= c.size <= n + 3 or n < 5


@pytest.mark.parametrize("m", [3, 4, 5, 6])
@pytest.mark.parametrize("n", [10, 13, 18, 23])
def test_narrow_constructions_meet_formula(m, n):
    for var in (PLAIN, PRIME) if m % 2 else (PLAIN,):
        spec = StaircaseSpec(m, n, var)
        assert construct(spec).size == expected_value(spec)


def test_narrow_plan_blocks_cover_length():
    plan = narrow_plan(S("S5,23"))
    assert sum(b.n for b in plan) == 23


def test_widen_single_slash():
    spec, dist = _opt("S'3,1")
    wide, out = widen(spec, dist)
    assert wide == S("S4,1") and out.size == dist.size + 1


@pytest.mark.parametrize("text", ["S3,6", "S'3,7", "S4,5", "S5,6", "S'5,7", "S6,6", "S7,6", "S'7,7"])
def test_widen_cached_optima(text):
    spec, dist = _opt(text)
    wide, out = widen(spec, dist)
    assert (wide.m, wide.n) == (spec.m + 1, spec.n)
    assert wide.prime == (spec.m % 2 == 0 and spec.n % 2 == 1)
    added = out.size - dist.size
    assert 1 <= added <= (spec.n + 3) // 4 + 1
    assert is_k_solvable(build_staircase(wide), out)


def test_widen_seven_by_eight_exceeds_known_optimum():
    spec, dist = _opt("S7,8")
    _, out = widen(spec, dist)
    assert out.size >= 12 > 11


def test_widen_rejects_unsolvable():
    g = build_staircase(S("S3,4"))
    with pytest.raises(ConstructionError):
        widen(S("S3,4"), Distribution.empty(len(g)))


def test_grid_one_cell():
    assert grid_seven_diagonal(1, 1).counts == (1,)


@pytest.mark.parametrize("rows, cols", [(3, 5), (7, 7), (10, 6)])
def test_grid_windows_solvable(rows, cols):
    dist = grid_seven_diagonal(rows, cols)
    assert is_k_solvable(build_grid_window(rows, cols), dist)


def test_construct_width_eight_uses_cache_then_widen():
    assert construct(S("S8,8")).size == 11 or construct(S("S8,8")).plan.family == "widen"
    c = construct(S("S8,12"))
    assert c.plan.family == "widen"
    assert is_k_solvable(build_staircase(c.spec), c.dist)


def test_construct_rejects_unknown_width():
    with pytest.raises(ValueError):
        construct(S("S9,9"))
