"""Local searches and metaheuristics over the insertion neighborhood.

All searches count every candidate fitness they produce: a full-neighborhood
scan charges its (N-1)^2 canonical entries, a single-removal scan charges
its canonical row, and a constructive partial scan charges one entry per
slot. A run may overshoot its budget by at most one neighborhood scan (the
scan that certifies local optimality is never truncated).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ContractError
from .evaluation import EvalCounter
from .instance import Instance
from .neighborhood import (
    EXCHANGE,
    TRANSPOSE,
    Move,
    apply_move,
    canonical_insertion_mask,
    check_permutation,
    insertion_move_count,
    random_move,
)

ACCEPTANCE_MODES = ("better", "metropolis", "better_or_equal")

_BIG = np.int64(2**62)


@dataclass
class SearchConfig:
    seed: int = 0
    max_evaluations: int = 100_000
    perturbation_strength: int = 3
    metropolis_temperature: float | None = None
    max_neutral_steps: int = 100
    acceptance: str = "metropolis"
    sampled_evolvability: int | None = None
    collect_trajectory: bool = False

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise ContractError("max_evaluations must be >= 1")
        if self.perturbation_strength < 1:
            raise ContractError("perturbation_strength must be >= 1")
        if self.max_neutral_steps < 1:
            raise ContractError("max_neutral_steps must be >= 1")
        if self.acceptance not in ACCEPTANCE_MODES:
            raise ContractError(f"acceptance must be one of {ACCEPTANCE_MODES}")
        if self.sampled_evolvability is not None and self.sampled_evolvability < 1:
            raise ContractError("sampled_evolvability must be >= 1")
        if self.metropolis_temperature is not None and self.metropolis_temperature < 0:
            raise ContractError("metropolis_temperature must be >= 0")


@dataclass
class SearchResult:
    best_perm: np.ndarray
    best_fitness: int
    evaluations_used: int
    descent_lengths: list[int] = field(default_factory=list)
    is_local_optimum: bool = False
    completed: bool = True
    trajectory: list[tuple[int, int, str]] | None = None


def default_temperature(instance: Instance) -> float:
    """Constant Metropolis temperature scaled to the instance magnitude."""
    return instance.total_processing_time / (10.0 * instance.n_jobs * instance.n_machines)


def _canonical_row_count(n: int, a: int) -> int:
    return n - 1 if a == n - 1 else n - 2


class _Run:
    """Shared bookkeeping for one search run."""

    def __init__(self, instance: Instance, budget: int | None, collect: bool):
        self.p = instance.processing_times
        self.n = instance.n_jobs
        self.counter = EvalCounter(budget=budget)
        self.mask = canonical_insertion_mask(self.n)
        self.trajectory: list[tuple[int, int, str]] | None = [] if collect else None

    def log(self, fitness: int, event: str) -> None:
        if self.trajectory is not None:
            self.trajectory.append((self.counter.used, int(fitness), event))

    def full_scan(self, seq: np.ndarray) -> np.ndarray:
        self.counter.charge(insertion_move_count(self.n))
        return _kernels.full_scan(self.p, seq)

    def evaluate(self, seq: np.ndarray) -> int:
        self.counter.charge(1)
        return int(_kernels.makespan(self.p, seq))

    def descend_steepest(self, seq: np.ndarray, fit: int) -> tuple[np.ndarray, int, int, bool]:
        """Best-improvement descent; returns (perm, fitness, steps, certified)."""
        steps = 0
        while True:
            if self.counter.exhausted():
                return seq, fit, steps, False
            scan = self.full_scan(seq)
            masked = np.where(self.mask, scan, _BIG)
            flat = int(masked.argmin())
            a, b = divmod(flat, self.n)
            best = int(masked[a, b])
            if best >= fit:
                return seq, fit, steps, True
            seq = apply_move(seq, Move("insertion", a, b))
            fit = best
            steps += 1
            self.log(fit, "descent")

    def descend_first(
        self, seq: np.ndarray, fit: int, rng: np.random.Generator
    ) -> tuple[np.ndarray, int, int, bool]:
        """First-improvement descent over seeded random move orders."""
        n = self.n
        steps = 0
        targets = np.tile(np.arange(n, dtype=np.int64), (n, 1))
        while True:
            if self.counter.exhausted():
                return seq, fit, steps, False
            remove_order = rng.permutation(n).astype(np.int64)
            target_order = rng.permuted(targets, axis=1)
            a, b, new_fit, scans = _kernels.first_improvement_pass(
                self.p, seq, fit, remove_order, target_order
            )
            for pos in remove_order[:scans]:
                self.counter.charge(_canonical_row_count(n, int(pos)))
            if a < 0:
                return seq, fit, steps, True
            seq = apply_move(seq, Move("insertion", int(a), int(b)))
            fit = int(new_fit)
            steps += 1
            self.log(fit, "descent")

    def perturb(self, seq: np.ndarray, strength: int, rng: np.random.Generator) -> np.ndarray:
        if self.n < 2:
            return seq
        for _ in range(strength):
            kind = TRANSPOSE if rng.integers(2) == 0 else EXCHANGE
            seq = apply_move(seq, random_move(kind, self.n, rng))
        return seq


def _result(run: _Run, perm, fitness, lengths, certified, completed) -> SearchResult:
    return SearchResult(
        best_perm=np.asarray(perm),
        best_fitness=int(fitness),
        evaluations_used=run.counter.used,
        descent_lengths=lengths,
        is_local_optimum=certified,
        completed=completed,
        trajectory=run.trajectory,
    )


def steepest_descent(
    instance: Instance,
    start,
    rng: np.random.Generator | None = None,
    *,
    max_evaluations: int | None = None,
    collect_trajectory: bool = False,
) -> SearchResult:
    """Descend to the best strictly improving neighbor until none exists."""
    seq = check_permutation(start, instance.n_jobs)
    run = _Run(instance, max_evaluations, collect_trajectory)
    fit = run.evaluate(seq)
    run.log(fit, "init")
    seq, fit, steps, certified = run.descend_steepest(seq, fit)
    return _result(run, seq, fit, [steps], certified, certified)


def first_improvement_descent(
    instance: Instance,
    start,
    rng: np.random.Generator,
    *,
    max_evaluations: int | None = None,
    collect_trajectory: bool = False,
) -> SearchResult:
    """Take the first strict improvement per randomized pass until stuck."""
    seq = check_permutation(start, instance.n_jobs)
    run = _Run(instance, max_evaluations, collect_trajectory)
    fit = run.evaluate(seq)
    run.log(fit, "init")
    seq, fit, steps, certified = run.descend_first(seq, fit, rng)
    return _result(run, seq, fit, [steps], certified, certified)


def neh_construct(instance: Instance, counter: EvalCounter | None = None) -> np.ndarray:
    """Insert jobs in decreasing total-time order at the best partial slot."""
    p = instance.processing_times
    totals = p.astype(np.int64).sum(axis=1)
    order = np.argsort(-totals, kind="stable").astype(np.int64)
    seq = order[:1].copy()
    for job in order[1:]:
        scan = _kernels.insert_scan(p, seq, int(job))
        if counter is not None:
            counter.charge(len(scan))
        t = int(scan.argmin())
        seq = np.insert(seq, t, job)
    return seq


def ils_stutzle(instance: Instance, config: SearchConfig) -> SearchResult:
    """Iterated local search: NEH start, first-improvement descent,
    transpose/exchange perturbation, configurable acceptance."""
    rng = np.random.default_rng(config.seed)
    run = _Run(instance, config.max_evaluations, config.collect_trajectory)
    temperature = (
        default_temperature(instance)
        if config.metropolis_temperature is None
        else config.metropolis_temperature
    )

    cur = neh_construct(instance, run.counter)
    cur_fit = run.evaluate(cur)
    run.log(cur_fit, "neh")
    cur, cur_fit, steps, certified = run.descend_first(cur, cur_fit, rng)
    lengths = [steps]
    best, best_fit, best_cert = cur, cur_fit, certified
    first_descent_done = certified

    while not run.counter.exhausted():
        cand = run.perturb(cur, config.perturbation_strength, rng)
        cand_fit = run.evaluate(cand)
        cand, cand_fit, steps, certified = run.descend_first(cand, cand_fit, rng)
        lengths.append(steps)
        if cand_fit < best_fit:
            best, best_fit, best_cert = cand, cand_fit, certified
        if _accepts(config.acceptance, cand_fit - cur_fit, temperature, rng):
            cur, cur_fit = cand, cand_fit
            run.log(cur_fit, "accept")
        else:
            run.log(cand_fit, "reject")
    return _result(run, best, best_fit, lengths, best_cert, first_descent_done)


def _accepts(mode: str, delta: int, temperature: float, rng: np.random.Generator) -> bool:
    if delta < 0:
        return True
    if mode == "better":
        return False
    if mode == "better_or_equal" or delta == 0:
        return delta == 0
    if temperature <= 0.0:
        return False
    return rng.random() < math.exp(-delta / temperature)


def _sample_canonical_pairs(n: int, k: int, rng: np.random.Generator):
    """k uniform draws (with replacement) from the canonical insertion moves."""
    ks = rng.integers(insertion_move_count(n), size=k)
    inner = (n - 1) * (n - 2)
    a = np.where(ks < inner, ks // max(n - 2, 1), n - 1)
    j = ks % max(n - 2, 1)
    b_inner = np.where(j < a, j, j + 2)
    b = np.where(ks < inner, b_inner, ks - inner)
    return a.astype(np.int64), b.astype(np.int64)


def neutral_guided_search(instance: Instance, config: SearchConfig) -> SearchResult:
    """Descend, then drift along the neutral network toward low mean-neighbor
    fitness; take any portal found; perturb when a portal stays out of reach.
    """
    rng = np.random.default_rng(config.seed)
    run = _Run(instance, config.max_evaluations, config.collect_trajectory)
    n = instance.n_jobs

    cur = rng.permutation(n).astype(np.int64)
    cur_fit = run.evaluate(cur)
    run.log(cur_fit, "init")
    cur, cur_fit, steps, certified = run.descend_first(cur, cur_fit, rng)
    lengths = [steps]
    best, best_fit, best_cert = cur, cur_fit, certified
    first_descent_done = certified

    scan = run.full_scan(cur) if not run.counter.exhausted() else None
    neutral_steps = 0
    while scan is not None and not run.counter.exhausted():
        improving = np.argwhere(run.mask & (scan < cur_fit))
        if improving.size:
            a, b = improving[0]
            cur = apply_move(cur, Move("insertion", int(a), int(b)))
            cur_fit = int(scan[a, b])
            run.log(cur_fit, "portal")
            cur, cur_fit, steps, certified = run.descend_first(cur, cur_fit, rng)
            lengths.append(steps)
            if cur_fit < best_fit:
                best, best_fit, best_cert = cur, cur_fit, certified
            scan = run.full_scan(cur) if not run.counter.exhausted() else None
            neutral_steps = 0
            continue

        neutral = np.argwhere(run.mask & (scan == cur_fit))
        if not neutral.size or neutral_steps >= config.max_neutral_steps:
            cand = run.perturb(cur, config.perturbation_strength, rng)
            cand_fit = run.evaluate(cand)
            cur, cur_fit, steps, certified = run.descend_first(cand, cand_fit, rng)
            run.log(cur_fit, "perturb")
            lengths.append(steps)
            if cur_fit < best_fit:
                best, best_fit, best_cert = cur, cur_fit, certified
            scan = run.full_scan(cur) if not run.counter.exhausted() else None
            neutral_steps = 0
            continue

        cur, scan = _lowest_evolvability_step(run, config, cur, cur_fit, neutral, rng)
        neutral_steps += 1
        run.log(cur_fit, "neutral")

    return _result(run, best, best_fit, lengths, best_cert, first_descent_done)


def _lowest_evolvability_step(run, config, cur, cur_fit, neutral, rng):
    """Move to the neutral neighbor with the lowest mean neighbor fitness.

    Exact mode scores candidates by the integer sum of their full scans and
    returns the winner's scan for reuse; sampled mode estimates each score
    from config.sampled_evolvability random moves and leaves the next scan
    to the caller (returned as None-scan marker recomputed here).
    """
    k = config.sampled_evolvability
    scores = np.empty(len(neutral), dtype=np.int64)
    scans = [None] * len(neutral)
    for i, (a, b) in enumerate(neutral):
        cand = apply_move(cur, Move("insertion", int(a), int(b)))
        if run.counter.exhausted():
            scores[i:] = _BIG
            break
        if k is None:
            cand_scan = run.full_scan(cand)
            if int(cand_scan[run.mask].min()) < cur_fit:
                # portal spotted while scoring: step onto this neighbor now,
                # the caller takes the improving move from the same scan
                return cand, cand_scan
            scores[i] = int(cand_scan[run.mask].sum())
            scans[i] = cand_scan
        else:
            sa, sb = _sample_canonical_pairs(run.n, k, rng)
            run.counter.charge(k)
            vals = _kernels.eval_insertion_moves(run.p, cand, sa, sb)
            if int(vals.min()) < cur_fit:
                nxt_scan = run.full_scan(cand) if not run.counter.exhausted() else None
                return cand, nxt_scan
            scores[i] = int(vals.sum())
    minima = np.flatnonzero(scores == scores.min())
    pick = int(minima[int(rng.integers(len(minima)))])
    a, b = neutral[pick]
    nxt = apply_move(cur, Move("insertion", int(a), int(b)))
    nxt_scan = scans[pick]
    if nxt_scan is None:
        nxt_scan = run.full_scan(nxt) if not run.counter.exhausted() else None
    return nxt, nxt_scan


def restart_descent(instance: Instance, config: SearchConfig) -> SearchResult:
    """Independent first-improvement descents from random starts."""
    rng = np.random.default_rng(config.seed)
    run = _Run(instance, config.max_evaluations, config.collect_trajectory)
    n = instance.n_jobs
    best = None
    best_fit = None
    best_cert = False
    lengths = []
    completed = False
    while not run.counter.exhausted():
        start = rng.permutation(n).astype(np.int64)
        fit = run.evaluate(start)
        run.log(fit, "restart")
        seq, fit, steps, certified = run.descend_first(start, fit, rng)
        lengths.append(steps)
        if best_fit is None or fit < best_fit:
            best, best_fit, best_cert = seq, fit, certified
        completed = completed or certified
    return _result(run, best, best_fit, lengths, best_cert, completed)
