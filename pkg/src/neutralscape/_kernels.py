"""Hot numeric kernels for permutation-flowshop makespan evaluation.

Everything here operates on raw numpy arrays:

* ``p`` is the processing-time matrix, shape (n_jobs, n_machines), int32.
* job sequences (``order``, ``seq``, ``perm``) are int64 index arrays.
* all returned completion times / makespans are int64.

The insertion-scan kernels use the classic head/tail decomposition: for a
sequence of length L, ``heads[k]`` holds the machine completion times of the
first k jobs and ``tails[k]`` the critical-path lengths of the suffix that
starts at position k. Inserting a job at position t then costs O(M), so one
removal yields all L+1 insertion makespans in O(L*M) instead of O(L^2 * M).

Two interchangeable backends are provided:

* a numba ``@njit`` backend (default when numba is importable), and
* a pure-numpy fallback, selected by setting the environment variable
  ``NEUTRALSCAPE_PURE_NUMPY=1`` before import (or used automatically when
  numba is missing).

Both backends are pure integer arithmetic and produce identical results;
``benchmarks/bench_kernels.py`` compares their speed. The module-level names
(``makespan``, ``full_scan``, ...) are bound to the active backend; the
``IMPLEMENTATIONS`` dict exposes both for tests and benchmarks.
"""
from __future__ import annotations

import os

import numpy as np

PURE_NUMPY_ENV = "NEUTRALSCAPE_PURE_NUMPY"


def _pure_numpy_requested() -> bool:
    return os.environ.get(PURE_NUMPY_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


def as_ptimes(matrix) -> np.ndarray:
    """Coerce a processing-time matrix to the kernel layout (C-contiguous int32)."""
    return np.ascontiguousarray(matrix, dtype=np.int32)


def as_jobseq(seq) -> np.ndarray:
    """Coerce a job sequence to the kernel layout (C-contiguous int64)."""
    return np.ascontiguousarray(seq, dtype=np.int64)


# ---------------------------------------------------------------------------
# pure-numpy backend
#
# The row recurrence c[k] = max(b[k], c[k-1]) + a[k], c[0] = 0 has the closed
# form c[k] = S[k] + max(0, max_{i<=k}(b[i] - S[i-1])) with S the prefix sum
# of a, which turns each heads/tails column into one cumsum plus one running
# maximum instead of a Python-level loop over rows.
# ---------------------------------------------------------------------------


def _column_chain(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = np.cumsum(a)
    slack = np.maximum.accumulate(b - (s - a))
    return s + np.maximum(slack, 0)


def heads_numpy(p: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Completion times of every prefix of ``order``: shape (L+1, M)."""
    length = order.shape[0]
    m = p.shape[1]
    e = np.zeros((length + 1, m), dtype=np.int64)
    if length == 0:
        return e
    times = p[order].astype(np.int64)
    prev = np.zeros(length, dtype=np.int64)
    for j in range(m):
        prev = _column_chain(times[:, j], prev)
        e[1:, j] = prev
    return e


def tails_numpy(p: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Reversed-problem completion times for every suffix: shape (L+1, M)."""
    length = order.shape[0]
    m = p.shape[1]
    q = np.zeros((length + 1, m), dtype=np.int64)
    if length == 0:
        return q
    times = p[order].astype(np.int64)
    prev = np.zeros(length, dtype=np.int64)
    for j in range(m - 1, -1, -1):
        prev = _column_chain(times[::-1, j], prev)
        q[:length, j] = prev[::-1]
    return q


def makespan_numpy(p: np.ndarray, order: np.ndarray) -> int:
    if order.shape[0] == 0:
        return 0
    return int(heads_numpy(p, order)[-1, -1])


def insert_scan_numpy(p: np.ndarray, seq: np.ndarray, job: int) -> np.ndarray:
    """Makespan of inserting ``job`` at each of the L+1 positions of ``seq``."""
    e = heads_numpy(p, seq)
    q = tails_numpy(p, seq)
    prev = np.zeros(seq.shape[0] + 1, dtype=np.int64)
    best = np.zeros(seq.shape[0] + 1, dtype=np.int64)
    for j in range(p.shape[1]):
        prev = np.maximum(prev, e[:, j]) + int(p[job, j])
        np.maximum(best, prev + q[:, j], out=best)
    return best


def remove_insert_scan_numpy(p: np.ndarray, perm: np.ndarray, remove_pos: int) -> np.ndarray:
    reduced = np.delete(perm, remove_pos)
    return insert_scan_numpy(p, reduced, int(perm[remove_pos]))


def full_scan_numpy(p: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """All insertion-neighbor makespans: out[a, t] = remove at a, reinsert at t."""
    n = perm.shape[0]
    out = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        out[a] = remove_insert_scan_numpy(p, perm, a)
    return out


def eval_insertion_moves_numpy(
    p: np.ndarray, perm: np.ndarray, a_arr: np.ndarray, b_arr: np.ndarray
) -> np.ndarray:
    out = np.empty(a_arr.shape[0], dtype=np.int64)
    for i in range(a_arr.shape[0]):
        a = int(a_arr[i])
        b = int(b_arr[i])
        neighbor = np.delete(perm, a)
        neighbor = np.insert(neighbor, b, perm[a])
        out[i] = makespan_numpy(p, neighbor)
    return out


def first_improvement_pass_numpy(
    p: np.ndarray,
    perm: np.ndarray,
    current_fit: int,
    remove_order: np.ndarray,
    target_order: np.ndarray,
):
    """One first-improvement pass over the insertion neighborhood.

    Remove positions are visited in ``remove_order``; insertion targets for
    remove position a are tried in ``target_order[a]``, skipping the no-op
    t == a and the duplicate t == a + 1. Returns (a, t, fitness, scans_done)
    with a == -1 when the pass completed without finding an improvement;
    scans_done counts the remove positions whose scan was computed.
    """
    n = perm.shape[0]
    for idx in range(n):
        a = int(remove_order[idx])
        scan = remove_insert_scan_numpy(p, perm, a)
        for t in target_order[a]:
            t = int(t)
            if t == a or t == a + 1:
                continue
            if scan[t] < current_fit:
                return a, t, int(scan[t]), idx + 1
    return -1, -1, int(current_fit), n


NUMPY_IMPL = {
    "makespan": makespan_numpy,
    "heads": heads_numpy,
    "tails": tails_numpy,
    "insert_scan": insert_scan_numpy,
    "remove_insert_scan": remove_insert_scan_numpy,
    "full_scan": full_scan_numpy,
    "eval_insertion_moves": eval_insertion_moves_numpy,
    "first_improvement_pass": first_improvement_pass_numpy,
}


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

NUMBA_IMPL = None

if not _pure_numpy_requested():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - exercised only without numba
        njit = None

    if njit is not None:

        @njit(cache=True)
        def _heads_into(p, seq, e):
            length = seq.shape[0]
            m = p.shape[1]
            for j in range(m):
                e[0, j] = 0
            for k in range(1, length + 1):
                v = seq[k - 1]
                left = np.int64(0)
                for j in range(m):
                    c = e[k - 1, j]
                    if left > c:
                        c = left
                    c = c + p[v, j]
                    e[k, j] = c
                    left = c

        @njit(cache=True)
        def _tails_into(p, seq, q):
            length = seq.shape[0]
            m = p.shape[1]
            for j in range(m):
                q[length, j] = 0
            for k in range(length - 1, -1, -1):
                v = seq[k]
                right = np.int64(0)
                for j in range(m - 1, -1, -1):
                    c = q[k + 1, j]
                    if right > c:
                        c = right
                    c = c + p[v, j]
                    q[k, j] = c
                    right = c

        @njit(cache=True)
        def _insert_scan_into(p, e, q, job, length, out):
            m = p.shape[1]
            for t in range(length + 1):
                prev = np.int64(0)
                best = np.int64(0)
                for j in range(m):
                    c = e[t, j]
                    if prev > c:
                        c = prev
                    c = c + p[job, j]
                    prev = c
                    tot = c + q[t, j]
                    if tot > best:
                        best = tot
                out[t] = best

        @njit(cache=True)
        def makespan_numba(p, order):
            m = p.shape[1]
            c = np.zeros(m, np.int64)
            for i in range(order.shape[0]):
                v = order[i]
                prev = np.int64(0)
                for j in range(m):
                    cur = c[j]
                    if prev > cur:
                        cur = prev
                    cur = cur + p[v, j]
                    c[j] = cur
                    prev = cur
            return c[m - 1]

        @njit(cache=True)
        def heads_numba(p, order):
            e = np.empty((order.shape[0] + 1, p.shape[1]), np.int64)
            _heads_into(p, order, e)
            return e

        @njit(cache=True)
        def tails_numba(p, order):
            q = np.empty((order.shape[0] + 1, p.shape[1]), np.int64)
            _tails_into(p, order, q)
            return q

        @njit(cache=True)
        def insert_scan_numba(p, seq, job):
            length = seq.shape[0]
            e = np.empty((length + 1, p.shape[1]), np.int64)
            q = np.empty((length + 1, p.shape[1]), np.int64)
            _heads_into(p, seq, e)
            _tails_into(p, seq, q)
            out = np.empty(length + 1, np.int64)
            _insert_scan_into(p, e, q, job, length, out)
            return out

        @njit(cache=True)
        def _reduce_into(perm, skip, reduced):
            k = 0
            for i in range(perm.shape[0]):
                if i != skip:
                    reduced[k] = perm[i]
                    k += 1

        @njit(cache=True)
        def remove_insert_scan_numba(p, perm, remove_pos):
            n = perm.shape[0]
            reduced = np.empty(n - 1, np.int64)
            _reduce_into(perm, remove_pos, reduced)
            return insert_scan_numba(p, reduced, perm[remove_pos])

        @njit(cache=True)
        def full_scan_numba(p, perm):
            n = perm.shape[0]
            m = p.shape[1]
            out = np.empty((n, n), np.int64)
            reduced = np.empty(n - 1, np.int64)
            e = np.empty((n, m), np.int64)
            q = np.empty((n, m), np.int64)
            for a in range(n):
                _reduce_into(perm, a, reduced)
                _heads_into(p, reduced, e)
                _tails_into(p, reduced, q)
                _insert_scan_into(p, e, q, perm[a], n - 1, out[a])
            return out

        @njit(cache=True)
        def eval_insertion_moves_numba(p, perm, a_arr, b_arr):
            n = perm.shape[0]
            out = np.empty(a_arr.shape[0], np.int64)
            tmp = np.empty(n, np.int64)
            for i in range(a_arr.shape[0]):
                a = a_arr[i]
                b = b_arr[i]
                v = perm[a]
                if a < b:
                    for t in range(a):
                        tmp[t] = perm[t]
                    for t in range(a, b):
                        tmp[t] = perm[t + 1]
                    tmp[b] = v
                    for t in range(b + 1, n):
                        tmp[t] = perm[t]
                else:
                    for t in range(b):
                        tmp[t] = perm[t]
                    tmp[b] = v
                    for t in range(b + 1, a + 1):
                        tmp[t] = perm[t - 1]
                    for t in range(a + 1, n):
                        tmp[t] = perm[t]
                out[i] = makespan_numba(p, tmp)
            return out

        @njit(cache=True)
        def first_improvement_pass_numba(p, perm, current_fit, remove_order, target_order):
            n = perm.shape[0]
            m = p.shape[1]
            reduced = np.empty(n - 1, np.int64)
            e = np.empty((n, m), np.int64)
            q = np.empty((n, m), np.int64)
            scan = np.empty(n, np.int64)
            for idx in range(n):
                a = remove_order[idx]
                _reduce_into(perm, a, reduced)
                _heads_into(p, reduced, e)
                _tails_into(p, reduced, q)
                _insert_scan_into(p, e, q, perm[a], n - 1, scan)
                for z in range(n):
                    t = target_order[a, z]
                    if t == a or t == a + 1:
                        continue
                    if scan[t] < current_fit:
                        return a, t, scan[t], idx + 1
            return -1, -1, current_fit, n

        NUMBA_IMPL = {
            "makespan": makespan_numba,
            "heads": heads_numba,
            "tails": tails_numba,
            "insert_scan": insert_scan_numba,
            "remove_insert_scan": remove_insert_scan_numba,
            "full_scan": full_scan_numba,
            "eval_insertion_moves": eval_insertion_moves_numba,
            "first_improvement_pass": first_improvement_pass_numba,
        }


IMPLEMENTATIONS = {"numpy": NUMPY_IMPL}
if NUMBA_IMPL is not None:
    IMPLEMENTATIONS["numba"] = NUMBA_IMPL

BACKEND = "numba" if NUMBA_IMPL is not None else "numpy"
_active = IMPLEMENTATIONS[BACKEND]

makespan = _active["makespan"]
heads = _active["heads"]
tails = _active["tails"]
insert_scan = _active["insert_scan"]
remove_insert_scan = _active["remove_insert_scan"]
full_scan = _active["full_scan"]
eval_insertion_moves = _active["eval_insertion_moves"]
first_improvement_pass = _active["first_improvement_pass"]
