"""Published optimal pebbling numbers of staircases, as lookup tables.

Widths 3 to 6 have exact formulas with finitely many exceptions.  Width 7 is
only pinned to the interval ``[n + 1, n + 3]`` apart from the cases where the
lower bound is known to be attained.  Values the theorems leave open raise
:class:`Unspecified`; callers then fall back to search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..grid import StaircaseSpec, Variant


class Unspecified(LookupError):
    """The published results give no value for this staircase."""


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def __contains__(self, value: int) -> bool:
        return self.lo <= value <= self.hi

    def to_json(self) -> list[int]:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class TheoremTable:
    family: str
    m: int
    variant: Variant
    formula: Callable[[int], int | Interval] | None
    exceptions: dict[int, int] = field(default_factory=dict)
    unspecified: frozenset[int] = frozenset()
    min_n: int = 1
    source: str = ""

    def spec(self, n: int) -> StaircaseSpec:
        return StaircaseSpec(self.m, n, self.variant)


def _width3_plain(n: int) -> int:
    k, r = divmod(n, 4)
    return 3 * k + r


def _width3_prime(n: int) -> int:
    k, r = divmod(n, 4)
    return 3 * k + 2 if r == 3 else 3 * k + r


def _width5(n: int) -> int:
    k, r = divmod(n, 5)
    return 4 * k + r


def _width7(n: int) -> Interval:
    return Interval(n + 1, n + 3)


_SEVEN_SHARP_PLAIN = {n: n + 1 for n in (5, 6, 7, 8)}

TABLES: dict[tuple[int, Variant], TheoremTable] = {
    (3, Variant.PLAIN): TheoremTable(
        "width3", 3, Variant.PLAIN, _width3_plain, {1: 1}, source="three-wide theorem; S_{3,1} = 1"
    ),
    (3, Variant.PRIME): TheoremTable(
        "width3", 3, Variant.PRIME, _width3_prime, {1: 2}, source="three-wide theorem; S'_{3,1} = 2"
    ),
    (4, Variant.PLAIN): TheoremTable(
        "width4", 4, Variant.PLAIN, _width3_plain, {1: 2, 2: 3}, source="four-wide theorem"
    ),
    (5, Variant.PLAIN): TheoremTable(
        "width5", 5, Variant.PLAIN, _width5, {3: 4}, frozenset({1, 2, 7}), source="five-wide theorem"
    ),
    (5, Variant.PRIME): TheoremTable(
        "width5", 5, Variant.PRIME, _width5, {3: 4, 7: 7}, frozenset({1, 2}), source="five-wide theorem"
    ),
    (6, Variant.PLAIN): TheoremTable(
        "width6", 6, Variant.PLAIN, lambda n: n, {3: 5, 4: 5, 8: 9, 9: 10}, frozenset({1, 2}),
        source="six-wide theorem",
    ),
    (7, Variant.PLAIN): TheoremTable(
        "width7", 7, Variant.PLAIN, _width7, dict(_SEVEN_SHARP_PLAIN), source="seven-wide theorem"
    ),
    (7, Variant.PRIME): TheoremTable(
        "width7", 7, Variant.PRIME, _width7, {6: 7, 8: 9}, source="seven-wide theorem"
    ),
    (8, Variant.PLAIN): TheoremTable("width8", 8, Variant.PLAIN, None, {8: 11}, source="computer search, S_{8,8}"),
}

FAMILIES = {"width3": 3, "width4": 4, "width5": 5, "width6": 6, "width7": 7, "width8": 8}


def table_for(spec: StaircaseSpec) -> TheoremTable:
    try:
        return TABLES[(spec.m, spec.variant)]
    except KeyError:
        raise Unspecified(f"no published table for width {spec.m}") from None


def family_specs(family: str, n: int) -> list[StaircaseSpec]:
    """Staircases of a family at length ``n``: both variants for odd widths."""
    m = FAMILIES[family]
    if m % 2 == 0:
        return [StaircaseSpec(m, n)]
    return [StaircaseSpec(m, n, Variant.PLAIN), StaircaseSpec(m, n, Variant.PRIME)]


def expected_value(table: TheoremTable | StaircaseSpec, n: int | None = None) -> int | Interval:
    """Published value for length ``n``; exceptions override the formula."""
    if isinstance(table, StaircaseSpec):
        n = table.n if n is None else n
        table = table_for(table)
    if n is None or n < 1:
        raise ValueError("n must be a positive integer")
    if n in table.exceptions:
        return table.exceptions[n]
    if n in table.unspecified:
        raise Unspecified(f"{table.spec(n)} is not determined by the published results")
    if table.m == 7 and table.variant is Variant.PRIME and n % 4 == 3 and n >= 7:
        return n + 1
    if table.formula is None:
        raise Unspecified(f"{table.spec(n)} is not determined by the published results")
    return table.formula(n)


def conjectured_seven_wide(spec: StaircaseSpec) -> int:
    """Conjectured exact value for 7-wide staircases with ``n >= 10``."""
    n = spec.n
    if spec.prime and n % 2 == 1:
        return n + 2 if n % 4 == 1 else n + 1
    return n + 2 if n % 2 == 0 else n + 3
