"""Branch-and-bound enumeration of pebble multisets.

A candidate of size ``t`` is a nondecreasing vertex sequence ``c_1 <= ... <= c_t``;
candidates are produced in lexicographic order.  With integer weights
``W[v, u] = 2^(D - d(v, u))`` a candidate passes the coverage prescreen when
``sum_i W[c_i, u] >= k 2^D`` for every vertex ``u``.  A prefix ending at ``v``
with ``r`` pebbles left is cut as soon as ``cov[u] + r * max_{w >= v} W[w, u]``
falls short for some ``u``.

Two interchangeable backends produce identical leaves and counters:

* numba ``@njit`` depth-first loop (default when numba imports);
* a pure-numpy chunked frontier, selected with ``STAIRPEBBLE_DISABLE_NUMBA=1``.

Optionally only candidates that are lexicographically minimal in their orbit
under the supplied vertex permutations are emitted.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("STAIRPEBBLE_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("disabled by STAIRPEBBLE_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"

MAX_SCALE_BITS = 52


def coverage_weights(distances: np.ndarray, k: int = 1) -> tuple[np.ndarray, np.ndarray, int]:
    """Weights, suffix maxima and the per-vertex requirement ``k 2^D``."""
    dist = np.asarray(distances, dtype=np.int64)
    n = dist.shape[0]
    top = int(dist.max()) if n else 0
    if top > MAX_SCALE_BITS:
        raise ValueError(f"diameter {top} too large for 64-bit weights")
    weights = np.where(dist >= 0, np.left_shift(np.int64(1), np.clip(top - dist, 0, None)), 0)
    weights = weights.astype(np.int64)
    suffix = np.zeros((n + 1, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        suffix[i] = np.maximum(suffix[i + 1], weights[i])
    return weights, suffix, int(k) << top


def _as_perms(perms, n: int) -> np.ndarray:
    if perms is None or len(perms) == 0:
        return np.zeros((0, n), dtype=np.int64)
    return np.ascontiguousarray(np.asarray(perms, dtype=np.int64).reshape(-1, n))


def _prefix_ok(weights, suffix, need, t, prefix) -> bool:
    cov = weights[prefix].sum(axis=0) if len(prefix) else np.zeros(weights.shape[1], np.int64)
    r = t - len(prefix)
    last = prefix[-1] if len(prefix) else 0
    return bool((cov + r * suffix[last] >= need).all())


# -- numpy backend ----------------------------------------------------------------


def canonical_mask(leaves: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Rows that are lexicographically <= their image under every permutation."""
    keep = np.ones(len(leaves), dtype=bool)
    if len(leaves) == 0:
        return keep
    for p in perms:
        img = np.sort(p[leaves], axis=1)
        diff = img - leaves
        nz = diff != 0
        first = nz.argmax(axis=1)
        sign = diff[np.arange(len(leaves)), first]
        keep &= ~(nz.any(axis=1) & (sign < 0))
    return keep


def enumerate_leaves_numpy(weights, suffix, need, t, prefix=(), perms=None, chunk=2048):
    weights = np.asarray(weights, dtype=np.int64)
    n = weights.shape[1]
    prefix = np.asarray(prefix, dtype=np.int64)
    perms = _as_perms(perms, n)
    empty = np.zeros((0, t), dtype=np.int64)
    if not _prefix_ok(weights, suffix, need, t, prefix):
        return empty, 0, 0
    if len(prefix) == t:
        leaves = prefix[None, :]
        return leaves[canonical_mask(leaves, perms)], 0, 0
    cov0 = weights[prefix].sum(axis=0) if len(prefix) else np.zeros(n, np.int64)
    stack = [(prefix[None, :], cov0[None, :])]
    cols = np.arange(n)
    found = []
    nodes = pruned = 0
    while stack:
        seqs, cov = stack.pop()
        depth = seqs.shape[1]
        last = seqs[:, -1] if depth else np.zeros(len(seqs), np.int64)
        rows, vs = np.nonzero(cols[None, :] >= last[:, None])
        r = t - depth - 1
        ccov = cov[rows] + weights[vs]
        ok = (ccov + r * suffix[vs] >= need).all(axis=1)
        nodes += len(rows)
        pruned += int((~ok).sum())
        child = np.concatenate([seqs[rows[ok]], vs[ok, None]], axis=1)
        ccov = ccov[ok]
        if r == 0:
            if len(child):
                found.append(child[canonical_mask(child, perms)])
            continue
        for lo in range(((len(child) - 1) // chunk) * chunk, -1, -chunk):
            stack.append((child[lo:lo + chunk], ccov[lo:lo + chunk]))
    leaves = np.concatenate(found) if found else empty
    return leaves, nodes, pruned


# -- numba backend -----------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _is_canonical(seq, perms):
        t = seq.shape[0]
        img = np.empty(t, np.int64)
        for g in range(perms.shape[0]):
            for i in range(t):
                img[i] = perms[g, seq[i]]
            img.sort()
            for i in range(t):
                if img[i] < seq[i]:
                    return False
                if img[i] > seq[i]:
                    break
        return True

    @njit(cache=True, nogil=True)
    def _leaves_nb(weights, suffix, need, t, prefix, perms):
        n = weights.shape[1]
        plen = prefix.shape[0]
        out = np.empty((16, t), np.int64)
        n_out = 0
        cov = np.zeros(n, np.int64)
        for i in range(plen):
            for u in range(n):
                cov[u] += weights[prefix[i], u]
        last = prefix[plen - 1] if plen > 0 else 0
        r0 = t - plen
        for u in range(n):
            if cov[u] + r0 * suffix[last, u] < need:
                return out[:0], 0, 0
        choice = np.empty(t, np.int64)
        for i in range(plen):
            choice[i] = prefix[i]
        if plen == t:
            if _is_canonical(choice, perms):
                out[0, :] = choice
                return out[:1], 0, 0
            return out[:0], 0, 0
        nodes = 0
        pruned = 0
        pos = plen
        choice[pos] = last
        while True:
            v = choice[pos]
            if v >= n:
                pos -= 1
                if pos < plen:
                    break
                w = choice[pos]
                for u in range(n):
                    cov[u] -= weights[w, u]
                choice[pos] = w + 1
                continue
            for u in range(n):
                cov[u] += weights[v, u]
            nodes += 1
            r = t - pos - 1
            ok = True
            for u in range(n):
                if cov[u] + r * suffix[v, u] < need:
                    ok = False
                    break
            if ok and r == 0:
                if _is_canonical(choice, perms):
                    if n_out == out.shape[0]:
                        grown = np.empty((2 * n_out, t), np.int64)
                        grown[:n_out] = out
                        out = grown
                    out[n_out, :] = choice
                    n_out += 1
            if ok and r > 0:
                pos += 1
                choice[pos] = v
                continue
            if not ok:
                pruned += 1
            for u in range(n):
                cov[u] -= weights[v, u]
            choice[pos] = v + 1
        return out[:n_out], nodes, pruned


def enumerate_leaves_numba(weights, suffix, need, t, prefix=(), perms=None):
    if not HAS_NUMBA:
        raise RuntimeError("numba backend unavailable")
    weights = np.ascontiguousarray(weights, dtype=np.int64)
    n = weights.shape[1]
    prefix = np.asarray(prefix, dtype=np.int64).reshape(-1)
    leaves, nodes, pruned = _leaves_nb(
        weights, np.ascontiguousarray(suffix, dtype=np.int64), np.int64(need), int(t), prefix, _as_perms(perms, n)
    )
    return leaves.copy(), int(nodes), int(pruned)


def enumerate_leaves(weights, suffix, need, t, prefix=(), perms=None):
    """Coverage-feasible, orbit-minimal candidates extending ``prefix``.

    Returns ``(leaves, nodes, pruned)``: a ``(L, t)`` array of vertex sequences
    in lexicographic order, the number of search-tree nodes visited below the
    prefix and how many of them the weight bound cut.
    """
    if HAS_NUMBA:
        return enumerate_leaves_numba(weights, suffix, need, t, prefix, perms)
    return enumerate_leaves_numpy(weights, suffix, need, t, prefix, perms)
