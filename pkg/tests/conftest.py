"""Shared fixtures and independent pure-Python oracles.

The oracles here deliberately avoid every accelerated code path in the
package: makespan is the textbook O(N*M) recurrence over Python ints, and
neighborhoods are materialized by list surgery. Tests compare package
output against these, never against the package itself.
"""
from __future__ import annotations

import numpy as np
import pytest

from neutralscape import Instance


def oracle_makespan(matrix, perm) -> int:
    """Completion time of the last job on the last machine, pure Python."""
    matrix = getattr(matrix, "processing_times", matrix)
    rows = [[int(x) for x in row] for row in np.asarray(matrix)]
    m = len(rows[0])
    completion = [0] * m
    for job in perm:
        prev = 0
        for j in range(m):
            prev = max(completion[j], prev) + rows[int(job)][j]
            completion[j] = prev
    return completion[-1]


def oracle_insert(perm, a: int, b: int) -> list[int]:
    """Remove the job at position a and reinsert it at position b."""
    seq = [int(x) for x in perm]
    job = seq.pop(a)
    seq.insert(b, job)
    return seq


def canonical_pairs(n: int) -> list[tuple[int, int]]:
    """All (a, b) insertion moves with b != a and b != a + 1."""
    return [
        (a, b)
        for a in range(n)
        for b in range(n)
        if b != a and b != a + 1
    ]


def oracle_neighbors(matrix, perm) -> dict[tuple[int, int], int]:
    """Fitness of every canonical insertion neighbor, re-evaluated naively."""
    return {
        (a, b): oracle_makespan(matrix, oracle_insert(perm, a, b))
        for a, b in canonical_pairs(len(perm))
    }


def oracle_is_local_optimum(matrix, perm) -> bool:
    fit = oracle_makespan(matrix, perm)
    return all(v >= fit for v in oracle_neighbors(matrix, perm).values())


def random_instance(rng: np.random.Generator, n: int, m: int, high: int = 100) -> Instance:
    matrix = rng.integers(0, high, size=(n, m), dtype=np.int64)
    return Instance(n, m, matrix)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)


@pytest.fixture(scope="session")
def two_by_two() -> Instance:
    # job 0 needs (2, 3), job 1 needs (4, 1)
    return Instance(2, 2, np.array([[2, 3], [4, 1]]))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import sys

    for name, module in list(sys.modules.items()):
        if name.rsplit(".", 1)[-1] != "test_acceptance":
            continue
        lines = getattr(module, "SCOREBOARD", None)
        if lines:
            terminalreporter.section("acceptance scoreboard")
            for line in lines:
                terminalreporter.write_line(line)
        break
