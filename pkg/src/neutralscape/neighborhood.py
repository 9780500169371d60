"""Move operators on job permutations: insertion, transpose, exchange.

The insertion neighborhood is the primary search neighborhood. Two move
encodings collide on adjacent positions (shifting a job one slot right via
(a, a+1) equals shifting its successor left via (a+1, a)), so the canonical
enumeration drops b == a+1 and the neighborhood has exactly (n-1)^2 distinct
members. Transpose swaps adjacent positions; exchange swaps arbitrary ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from ._kernels import as_jobseq

INSERTION = "insertion"
TRANSPOSE = "transpose"
EXCHANGE = "exchange"
MOVE_KINDS = (INSERTION, TRANSPOSE, EXCHANGE)


@dataclass(frozen=True)
class Move:
    kind: str
    a: int
    b: int

    def inverted(self) -> "Move":
        """The move that undoes this one."""
        if self.kind == INSERTION:
            return Move(INSERTION, self.b, self.a)
        return self


def check_permutation(perm, n_jobs: int | None = None) -> np.ndarray:
    """Validate and coerce a job permutation; raises ContractError."""
    arr = as_jobseq(perm)
    n = arr.shape[0]
    if n_jobs is not None and n != n_jobs:
        raise ContractError(f"permutation has {n} entries, expected {n_jobs}")
    if n == 0:
        raise ContractError("empty permutation")
    seen = np.zeros(n, dtype=bool)
    for v in arr:
        if v < 0 or v >= n or seen[v]:
            raise ContractError("sequence is not a permutation of 0..N-1")
        seen[v] = True
    return arr


def _check_move(move: Move, n: int) -> None:
    if move.kind not in MOVE_KINDS:
        raise ContractError(f"unknown move kind {move.kind!r}")
    a, b = move.a, move.b
    if move.kind == INSERTION:
        ok = 0 <= a < n and 0 <= b < n and a != b
    elif move.kind == TRANSPOSE:
        ok = 0 <= a < n - 1 and b == a + 1
    else:
        ok = 0 <= a < b < n
    if not ok:
        raise ContractError(f"invalid {move.kind} move ({a}, {b}) for n={n}")


def apply_move(perm, move: Move) -> np.ndarray:
    """Return the neighbor permutation; the input is left untouched."""
    arr = as_jobseq(perm).copy()
    _check_move(move, arr.shape[0])
    a, b = move.a, move.b
    if move.kind == INSERTION:
        job = arr[a]
        if a < b:
            arr[a:b] = arr[a + 1 : b + 1]
        else:
            arr[b + 1 : a + 1] = arr[b:a]
        arr[b] = job
    else:
        arr[a], arr[b] = arr[b], arr[a]
    return arr


def enumerate_insertion_moves(n: int) -> list[Move]:
    """Canonical insertion move set: (n-1)^2 moves, a ascending then b."""
    moves = []
    for a in range(n):
        for b in range(n):
            if b == a or b == a + 1:
                continue
            moves.append(Move(INSERTION, a, b))
    return moves


def canonical_insertion_mask(n: int) -> np.ndarray:
    """Boolean (n, n) mask of canonical (remove, insert) pairs."""
    mask = np.ones((n, n), dtype=bool)
    idx = np.arange(n)
    mask[idx, idx] = False
    mask[idx[:-1], idx[:-1] + 1] = False
    return mask


def insertion_move_count(n: int) -> int:
    return (n - 1) ** 2 if n >= 2 else 0


def random_move(kind: str, n: int, rng: np.random.Generator) -> Move:
    """Draw a move uniformly from the kind's canonical move set."""
    if kind == TRANSPOSE:
        if n < 2:
            raise ContractError("transpose needs n >= 2")
        a = int(rng.integers(n - 1))
        return Move(TRANSPOSE, a, a + 1)
    if kind == EXCHANGE:
        if n < 2:
            raise ContractError("exchange needs n >= 2")
        a, b = sorted(int(v) for v in rng.choice(n, size=2, replace=False))
        return Move(EXCHANGE, a, b)
    if kind == INSERTION:
        if n < 2:
            raise ContractError("insertion needs n >= 2")
        # index the canonical set directly: rows a < n-1 hold n-2 moves, row n-1 holds n-1
        k = int(rng.integers(insertion_move_count(n)))
        if k < (n - 1) * (n - 2):
            a, j = divmod(k, n - 2)
            b = j if j < a else j + 2
        else:
            a = n - 1
            b = k - (n - 1) * (n - 2)
        return Move(INSERTION, a, b)
    raise ContractError(f"unknown move kind {kind!r}")
