"""Check published tables against the search engine, and run conjecture experiments."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ..constructions import construct, seven_wide_construction, verified
from ..grid import PebbleGraph, StaircaseSpec, Variant, align_slashed, build_staircase
from ..pebble import Distribution
from ..search import Budget, BudgetExhausted, optimal_pebbling_number
from .cache import CacheEntry, WitnessCache
from .tables import FAMILIES, Interval, Unspecified, conjectured_seven_wide, expected_value, family_specs

log = logging.getLogger(__name__)

PROFILES = ("default", "long")


def is_long(spec: StaircaseSpec) -> bool:
    """Cases whose exhaustive search is reserved for ``--profile long``."""
    return (spec.m == 6 and spec.n >= 8) or (spec.m == 7 and spec.n >= 8) or spec.m >= 8


@dataclass
class VerifyRow:
    spec: StaircaseSpec
    expected: int | Interval | None
    status: str  # match | contained | mismatch | computed | incomplete | skipped
    lower: int | None = None
    upper: int | None = None
    witness: Distribution | None = None
    source: str = "search"
    elapsed: float = 0.0

    @property
    def value(self) -> int | None:
        if self.lower is not None and self.lower == self.upper:
            return self.lower
        return None

    def to_json(self, timing: bool = False) -> dict:
        exp = self.expected.to_json() if isinstance(self.expected, Interval) else self.expected
        data = {
            "spec": str(self.spec),
            "expected": exp,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "status": self.status,
            "source": self.source,
            "witness": [[v, c] for v, c in self.witness.pebbles()] if self.witness else None,
        }
        if timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


@dataclass
class VerifyReport:
    family: str
    profile: str
    rows: list[VerifyRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(r.status == "mismatch" for r in self.rows)

    @property
    def complete(self) -> bool:
        return not any(r.status in ("incomplete", "skipped") for r in self.rows)

    def to_json(self, timing: bool = False) -> dict:
        return {
            "family": self.family,
            "profile": self.profile,
            "ok": self.ok,
            "complete": self.complete,
            "rows": [r.to_json(timing) for r in self.rows],
        }

    def to_text(self) -> str:
        lines = [f"{self.family} ({self.profile})"]
        for r in self.rows:
            exp = f"[{r.expected.lo},{r.expected.hi}]" if isinstance(r.expected, Interval) else r.expected
            got = r.value if r.value is not None else f"[{r.lower},{r.upper}]"
            lines.append(f"  {str(r.spec):<8} expected={exp!s:<8} got={got!s:<8} {r.status} ({r.source})")
        lines.append("OK" if self.ok else "MISMATCH")
        return "\n".join(lines)


def _status(expected, lower: int | None, upper: int | None) -> str:
    exact = lower is not None and lower == upper
    if expected is None:
        return "computed" if exact else "incomplete"
    lo, hi = (expected.lo, expected.hi) if isinstance(expected, Interval) else (expected, expected)
    if (lower is not None and lower > hi) or (upper is not None and upper < lo):
        return "mismatch"
    if not exact:
        return "incomplete"
    return "contained" if isinstance(expected, Interval) else "match"


def verify_spec(
    spec: StaircaseSpec,
    budget: Budget | None = None,
    profile: str = "default",
    cache: WitnessCache | None = None,
    record: bool = False,
) -> VerifyRow:
    """Compare one staircase with its published value.

    Long cases in the default profile fall back to an exhaustive cache entry
    (its witness was re-verified on load) or are skipped.
    """
    try:
        expected = expected_value(spec)
    except Unspecified:
        expected = None
    entry = cache.get(spec) if cache is not None else None
    if profile != "long" and is_long(spec):
        if entry is not None and entry.exhaustive:
            return VerifyRow(spec, expected, _status(expected, entry.size, entry.size),
                             entry.size, entry.size, entry.witness, "cache")
        upper = entry.size if entry is not None else None
        return VerifyRow(spec, expected, "skipped", None, upper, entry.witness if entry else None, "skipped")
    graph = build_staircase(spec)
    try:
        rep = optimal_pebbling_number(graph, 1, budget)
    except BudgetExhausted as exc:
        rep = exc.report
        upper = entry.size if entry is not None else rep.upper
        return VerifyRow(spec, expected, _status(expected, rep.lower, upper), rep.lower, upper,
                         entry.witness if entry else None, "search", rep.elapsed)
    if record and cache is not None:
        cache.put(CacheEntry(spec, 1, rep.witness, rep.exhaustive))
    return VerifyRow(spec, expected, _status(expected, rep.lower, rep.upper), rep.lower, rep.upper,
                     rep.witness, "search", rep.elapsed)


def verify_theorem(
    family: str,
    n_range: Iterable[int],
    budget: Budget | None = None,
    profile: str = "default",
    cache: WitnessCache | None = None,
    record: bool = False,
) -> VerifyReport:
    """Run a family table (both variants for odd widths) over ``n_range``."""
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    report = VerifyReport(family, profile)
    for n in n_range:
        for spec in family_specs(family, n):
            row = verify_spec(spec, budget, profile, cache, record)
            log.info("%s: %s", spec, row.status)
            report.rows.append(row)
    return report


# -- experiments -------------------------------------------------------------------------

EXPERIMENTS = ("seven-wide", "eight-wide", "stacked")


@dataclass
class ExperimentRow:
    spec: StaircaseSpec | str
    n: int
    construction: int
    conjectured: int | None = None
    lower: int | None = None
    upper: int | None = None

    def to_json(self) -> dict:
        return {
            "spec": str(self.spec),
            "n": self.n,
            "construction": self.construction,
            "conjectured": self.conjectured,
            "lower": self.lower,
            "upper": self.upper,
        }


@dataclass
class ExperimentReport:
    name: str
    rows: list[ExperimentRow]
    slope: float | None
    intercept: float | None
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "experiment": self.name,
            "params": self.params,
            "slope": None if self.slope is None else round(self.slope, 6),
            "intercept": None if self.intercept is None else round(self.intercept, 6),
            "rows": [r.to_json() for r in self.rows],
        }

    def to_text(self) -> str:
        lines = [f"{self.name} {self.params}"]
        for r in self.rows:
            lines.append(
                f"  {str(r.spec):<10} construction={r.construction:<4} conjectured={r.conjectured!s:<5}"
                f" search=[{r.lower},{r.upper}]"
            )
        if self.slope is not None:
            lines.append(f"  least-squares fit: {self.slope:.4f} n + {self.intercept:.3f}")
        return "\n".join(lines)


def _fit(ns, values) -> tuple[float | None, float | None]:
    if len(ns) < 2:
        return None, None
    slope, intercept = np.polyfit(np.asarray(ns, float), np.asarray(values, float), 1)
    return float(slope), float(intercept)


def _bounds(spec: StaircaseSpec, budget: Budget | None, cache) -> tuple[int | None, int | None]:
    if budget is None or budget.seconds == 0:
        entry = cache.get(spec) if cache is not None else None
        if entry is not None and entry.exhaustive:
            return entry.size, entry.size
        return None, None
    try:
        rep = optimal_pebbling_number(build_staircase(spec), 1, budget)
        return rep.lower, rep.upper
    except BudgetExhausted as exc:
        return exc.report.lower, exc.report.upper


def stacked_distribution(k: int, n: int, cache=None) -> tuple[StaircaseSpec, Distribution]:
    """Solvable distribution on ``S_{7k,n}`` from ``k`` strips of seven diagonals.

    Each strip is a 7-wide staircase (plain or prime depending on where it
    sits); moves inside a strip are moves of the whole graph, so the union
    of strip-wise solvable distributions is solvable.
    """
    spec = StaircaseSpec(7 * k, n)
    whole = build_staircase(spec)
    counts = [0] * len(whole)
    for j in range(k):
        keep = [v for v, d in enumerate(whole.neg_diag_index) if 7 * j < d <= 7 * j + 7]
        strip = whole.induced(keep)
        for var in (Variant.PLAIN, Variant.PRIME):
            part = StaircaseSpec(7, n, var)
            perm = align_slashed(build_staircase(part), strip)
            if perm is not None:
                break
        else:
            raise ValueError(f"strip {j} of {spec} is not a 7-wide staircase")
        c = seven_wide_construction(part, cache)
        for v, cnt in enumerate(c.dist.counts):
            counts[keep[perm[v]]] += cnt
    return spec, verified(whole, Distribution(tuple(counts)), f"stacked S_{{{7 * k},{n}}}")


def run_conjecture_experiment(
    name: str,
    n_range: Iterable[int],
    budget: Budget | None = None,
    cache: WitnessCache | None = None,
    k: int = 2,
) -> ExperimentReport:
    """Tabulate construction sizes against conjectures and search bounds; fit a slope.

    Nothing is asserted: the report is data for the reader.
    """
    rows: list[ExperimentRow] = []
    ns = list(n_range)
    if name == "seven-wide":
        for n in ns:
            for var in (Variant.PLAIN, Variant.PRIME):
                spec = StaircaseSpec(7, n, var)
                c = seven_wide_construction(spec, cache)
                lo, hi = _bounds(spec, budget, cache)
                rows.append(ExperimentRow(spec, n, c.size, conjectured_seven_wide(spec), lo, hi))
        plain = [r for r in rows if not r.spec.prime]
        slope, icpt = _fit([r.n for r in plain], [r.construction for r in plain])
        return ExperimentReport(name, rows, slope, icpt)
    if name == "eight-wide":
        for n in ns:
            spec = StaircaseSpec(8, n)
            c = construct(spec, cache)
            lo, hi = _bounds(spec, budget, cache)
            rows.append(ExperimentRow(spec, n, c.size, None, lo, hi))
        slope, icpt = _fit(ns, [r.construction for r in rows])
        return ExperimentReport(name, rows, slope, icpt)
    if name == "stacked":
        for n in ns:
            spec, dist = stacked_distribution(k, n, cache)
            rows.append(ExperimentRow(spec, n, dist.size))
        slope, icpt = _fit(ns, [r.construction for r in rows])
        return ExperimentReport(name, rows, slope, icpt, {"k": k})
    raise KeyError(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")


def graph_of(spec: StaircaseSpec) -> PebbleGraph:
    return build_staircase(spec)
