"""Makespan evaluation and accelerated insertion-neighborhood scans.

The makespan of a job permutation follows the classic flowshop recurrence:
the k-th scheduled job starts on each machine as soon as both the previous
job on that machine and its own previous operation have finished.

Head/tail matrices make insertion scans cheap. Heads hold prefix completion
times, tails hold suffix critical-path lengths of the reversed problem; for
a sequence split at position k, max_j(heads[k][j] + tails[k][j]) equals the
full makespan. Removing one job and simulating only the inserted job's row
against the reduced heads/tails yields all N insertion fitnesses in O(N*M).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .instance import Instance
from .neighborhood import check_permutation
from . import _kernels


def makespan(instance: Instance, perm) -> int:
    """C_max of scheduling instance's jobs in the order given by perm."""
    seq = check_permutation(perm, instance.n_jobs)
    return int(_kernels.makespan(instance.processing_times, seq))


@dataclass
class EvalState:
    """Completion-time decomposition of one evaluated permutation.

    heads[k][j]: completion time on machine j of the first k scheduled jobs.
    tails[k][j]: critical-path length from position k to the end, machine j
    onward (reversed-problem completion times). Row 0 of heads and row N of
    tails are zero.
    """

    perm: np.ndarray
    heads: np.ndarray
    tails: np.ndarray
    fitness: int

    def split_bound(self, k: int) -> int:
        """Makespan recomputed from the split at position k; equals fitness."""
        return int(np.max(self.heads[k] + self.tails[k]))


def build_eval_state(instance: Instance, perm) -> EvalState:
    seq = check_permutation(perm, instance.n_jobs)
    p = instance.processing_times
    heads = _kernels.heads(p, seq)
    tails = _kernels.tails(p, seq)
    return EvalState(perm=seq, heads=heads, tails=tails, fitness=int(heads[-1, -1]))


def scan_insertions(instance: Instance, perm, remove_pos: int) -> np.ndarray:
    """Exact makespans of all N reinsertions of the job at remove_pos.

    Entry t is the makespan after removing the job at remove_pos and
    reinserting it at position t; entry remove_pos reproduces the original
    makespan. Costs O(N*M) total.
    """
    seq = check_permutation(perm, instance.n_jobs)
    n = instance.n_jobs
    if not 0 <= remove_pos < n:
        raise ContractError(f"remove_pos {remove_pos} out of range for n={n}")
    return _kernels.remove_insert_scan(instance.processing_times, seq, remove_pos)


def scan_partial_insertions(instance: Instance, partial_seq, job: int) -> np.ndarray:
    """Makespans of inserting `job` at each slot of a partial sequence.

    partial_seq lists L distinct jobs (L may be < N); the result has L+1
    entries, one per insertion slot. Used by constructive heuristics.
    """
    seq = _kernels.as_jobseq(partial_seq)
    n = instance.n_jobs
    if not 0 <= job < n:
        raise ContractError(f"job {job} out of range for n={n}")
    if job in seq:
        raise ContractError(f"job {job} already scheduled")
    return _kernels.insert_scan(instance.processing_times, seq, job)


def scan_all_insertions(instance: Instance, perm) -> np.ndarray:
    """(N, N) matrix of insertion fitnesses: entry [a, t] = scan_insertions(.., a)[t]."""
    seq = check_permutation(perm, instance.n_jobs)
    return _kernels.full_scan(instance.processing_times, seq)


def makespan_lower_bound(instance: Instance) -> int:
    """Permutation-independent floor: max of machine loads and job lengths."""
    p = instance.processing_times.astype(np.int64)
    return int(max(p.sum(axis=0).max(), p.sum(axis=1).max()))


@dataclass
class EvalCounter:
    """Tallies candidate fitness values produced, for budget accounting."""

    used: int = 0
    budget: int | None = None

    def charge(self, count: int) -> None:
        self.used += count

    def exhausted(self) -> bool:
        return self.budget is not None and self.used >= self.budget
