"""Time the numba and numpy enumeration backends on the same workloads.

    python benchmarks/bench_kernels.py [--repeat 3] [--cases S6,7:7 S7,7:8]

Each case is ``SPEC:SIZE``.  Both backends must return identical leaves and
counters; the script exits 1 otherwise.  The first numba call compiles (or
loads the on-disk cache), so it is timed separately as "warmup".
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from stairpebble import _kernels
from stairpebble.grid import StaircaseSpec, build_staircase
from stairpebble.search import automorphism_generators

DEFAULT_CASES = ["S5,7:6", "S6,7:7", "S'7,5:7", "S6,8:8", "S7,7:8"]


def _prepare(case: str):
    text, t = case.rsplit(":", 1)
    g = build_staircase(StaircaseSpec.parse(text))
    w, suf, need = _kernels.coverage_weights(g.distances)
    perms = np.asarray(automorphism_generators(g)[1:], dtype=np.int64).reshape(-1, len(g))
    return text, int(t), w, suf, need, perms


def _best(fn, repeat: int) -> tuple[float, tuple]:
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cases", nargs="+", default=DEFAULT_CASES)
    args = ap.parse_args(argv)
    if not _kernels.HAS_NUMBA:
        print("numba unavailable (or disabled); nothing to compare", file=sys.stderr)
        return 2
    print(f"{'case':<12}{'leaves':>8}{'nodes':>12}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    ok = True
    for case in args.cases:
        text, t, w, suf, need, perms = _prepare(case)
        t0 = time.perf_counter()
        _kernels.enumerate_leaves_numba(w, suf, need, t, (), perms)
        warm = time.perf_counter() - t0
        tn, a = _best(lambda: _kernels.enumerate_leaves_numba(w, suf, need, t, (), perms), args.repeat)
        tp, b = _best(lambda: _kernels.enumerate_leaves_numpy(w, suf, need, t, (), perms), args.repeat)
        same = np.array_equal(a[0], b[0]) and a[1:] == b[1:]
        ok &= same
        print(f"{case:<12}{len(a[0]):>8}{a[1]:>12}{tn:>10.3f}{tp:>10.3f}{tp / tn:>8.1f}x"
              + ("" if same else "  MISMATCH") + (f"  (warmup {warm:.2f}s)" if warm > 2 * tn + 0.5 else ""))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
