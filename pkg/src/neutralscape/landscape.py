"""Neutral-network probes: neutral degree, walks, portals, typology.

A solution's neighborhood summary counts its equal-fitness (neutral) and
strictly better (improving) insertion neighbors and averages all neighbor
fitnesses (evolvability). A neutral walk starts from a local optimum and
repeatedly hops to a uniformly random neutral neighbor, recording a summary
per visited solution; walks classify as T1 (the start has no neutral
neighbor at all), T3 (some visited solution is a portal, i.e. has an
improving neighbor), or T2 (neither).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ContractError
from .instance import Instance
from .neighborhood import (
    INSERTION,
    Move,
    apply_move,
    canonical_insertion_mask,
    check_permutation,
)
from .evaluation import scan_all_insertions

TYPOLOGIES = ("T1", "T2", "T3")

STEPS_CSV_HEADER = (
    "instance_id",
    "walk_id",
    "step",
    "fitness",
    "neutral_degree",
    "evolvability",
    "is_portal",
    "revisited",
)
WALKS_CSV_HEADER = (
    "instance_id",
    "walk_id",
    "typology",
    "walk_length",
    "first_portal_step",
    "start_descent_length",
    "revisited_distinct",
)

_MASK_CACHE: dict[int, np.ndarray] = {}


def _mask(n: int) -> np.ndarray:
    mask = _MASK_CACHE.get(n)
    if mask is None:
        mask = canonical_insertion_mask(n)
        mask.setflags(write=False)
        _MASK_CACHE[n] = mask
    return mask


@dataclass
class NeighborhoodSummary:
    """Exact census of one solution's (N-1)^2 insertion neighbors."""

    fitness: int
    neutral_degree: int
    improving_degree: int
    neighbor_fitness_sum: int
    neighbor_count: int
    neutral_pairs: np.ndarray
    improving_move: Move | None

    @property
    def mean_neighbor_fitness(self) -> Fraction | None:
        if self.neighbor_count == 0:
            return None
        return Fraction(self.neighbor_fitness_sum, self.neighbor_count)

    @property
    def neutral_moves(self) -> list[Move]:
        return [Move(INSERTION, int(a), int(b)) for a, b in self.neutral_pairs]

    @property
    def is_portal(self) -> bool:
        return self.improving_degree > 0


def summarize_from_scan(scan: np.ndarray, fitness: int) -> NeighborhoodSummary:
    """Build a summary from a precomputed (N, N) insertion-scan matrix."""
    n = scan.shape[0]
    mask = _mask(n)
    vals = scan[mask]
    neutral_degree = int((vals == fitness).sum())
    improving_degree = int((vals < fitness).sum())
    neutral_pairs = np.argwhere(mask & (scan == fitness))
    improving_move = None
    if improving_degree:
        a, b = np.argwhere(mask & (scan < fitness))[0]
        improving_move = Move(INSERTION, int(a), int(b))
    return NeighborhoodSummary(
        fitness=int(fitness),
        neutral_degree=neutral_degree,
        improving_degree=improving_degree,
        neighbor_fitness_sum=int(vals.sum()),
        neighbor_count=int(vals.size),
        neutral_pairs=neutral_pairs,
        improving_move=improving_move,
    )


def summarize_neighborhood(instance: Instance, perm) -> NeighborhoodSummary:
    seq = check_permutation(perm, instance.n_jobs)
    scan = scan_all_insertions(instance, seq)
    return summarize_from_scan(scan, int(scan[0, 0]))


@dataclass
class WalkStep:
    """One visited solution on a neutral walk."""

    step: int
    fitness: int
    neutral_degree: int
    evolvability: Fraction | None
    is_portal: bool
    revisited: bool
    improving_move: Move | None = None
    perm: np.ndarray | None = None


@dataclass
class WalkRecord:
    """Full trace of one neutral walk plus its classification."""

    instance_id: str
    walk_id: int
    steps: list[WalkStep] = field(default_factory=list)
    start_descent_length: int = 0
    typology: str = "T2"
    first_portal_step: int | None = None
    revisited_distinct: int = 0

    @property
    def walk_length(self) -> int:
        return len(self.steps)

    @property
    def fitness(self) -> int:
        return self.steps[0].fitness

    def degree_series(self) -> np.ndarray:
        return np.array([s.neutral_degree for s in self.steps], dtype=np.float64)

    def evolvability_series(self) -> np.ndarray:
        return np.array([float(s.evolvability) for s in self.steps], dtype=np.float64)

    def revisit_fraction(self) -> float:
        """Share of walk entries whose solution was visited more than once."""
        return self.revisited_distinct / len(self.steps)


def neutral_walk(
    instance: Instance,
    start,
    max_steps: int,
    rng: np.random.Generator,
    *,
    instance_id: str | None = None,
    walk_id: int = 0,
    start_descent_length: int = 0,
    keep_perms: bool = False,
) -> WalkRecord:
    """Random neutral walk of at most max_steps moves from a local optimum.

    Raises ContractError when the start has a strictly improving neighbor.
    Revisits are allowed and flagged (exact permutation identity within this
    walk). Terminates early only when the start has no neutral neighbor.
    """
    if max_steps < 1:
        raise ContractError("max_steps must be >= 1")
    cur = check_permutation(start, instance.n_jobs)
    summ = summarize_neighborhood(instance, cur)
    if summ.improving_degree > 0:
        raise ContractError("neutral walk must start from a local optimum")

    record = WalkRecord(
        instance_id=instance.id if instance_id is None else instance_id,
        walk_id=walk_id,
        start_descent_length=start_descent_length,
    )
    base_fitness = summ.fitness
    visits = {cur.tobytes(): 1}

    def log(step: int, summary: NeighborhoodSummary, revisited: bool) -> None:
        if summary.fitness != base_fitness:
            raise AssertionError("neutral move changed fitness")
        record.steps.append(
            WalkStep(
                step=step,
                fitness=summary.fitness,
                neutral_degree=summary.neutral_degree,
                evolvability=summary.mean_neighbor_fitness,
                is_portal=summary.is_portal,
                revisited=revisited,
                improving_move=summary.improving_move,
                perm=cur.copy() if keep_perms else None,
            )
        )

    log(0, summ, False)
    for step in range(1, max_steps + 1):
        if summ.neutral_degree == 0:
            break
        a, b = summ.neutral_pairs[int(rng.integers(summ.neutral_degree))]
        cur = apply_move(cur, Move(INSERTION, int(a), int(b)))
        summ = summarize_neighborhood(instance, cur)
        key = cur.tobytes()
        log(step, summ, key in visits)
        visits[key] = visits.get(key, 0) + 1

    record.typology = classify_typology(record)
    record.first_portal_step = steps_to_first_portal(record)
    record.revisited_distinct = sum(1 for c in visits.values() if c > 1)
    return record


def classify_typology(record: WalkRecord) -> str:
    """T1: isolated start; T3: some portal seen; T2: otherwise."""
    if len(record.steps) == 1 and record.steps[0].neutral_degree == 0:
        return "T1"
    if any(s.is_portal for s in record.steps):
        return "T3"
    return "T2"


def steps_to_first_portal(record: WalkRecord) -> int | None:
    for s in record.steps:
        if s.is_portal:
            return s.step
    return None


def portal_distance_series(record: WalkRecord) -> list[tuple[float, int]]:
    """(evolvability, forward distance to nearest portal) per step.

    Distances look forward only; steps after the last portal are dropped.
    Empty for walks that saw no portal.
    """
    portal_idx = [i for i, s in enumerate(record.steps) if s.is_portal]
    if not portal_idx:
        return []
    pairs = []
    nxt = 0
    for i, s in enumerate(record.steps):
        if i > portal_idx[-1]:
            break
        while portal_idx[nxt] < i:
            nxt += 1
        pairs.append((float(s.evolvability), portal_idx[nxt] - i))
    return pairs


def _format_evolvability(value: Fraction | None) -> str:
    if value is None:
        return ""
    return f"{value.numerator / value.denominator:.6f}"


def write_steps_csv(records, path_or_file) -> None:
    _write_csv(path_or_file, STEPS_CSV_HEADER, _step_rows(records))


def write_walks_csv(records, path_or_file) -> None:
    _write_csv(path_or_file, WALKS_CSV_HEADER, _walk_rows(records))


def _step_rows(records):
    for rec in records:
        for s in rec.steps:
            yield (
                rec.instance_id,
                rec.walk_id,
                s.step,
                s.fitness,
                s.neutral_degree,
                _format_evolvability(s.evolvability),
                int(s.is_portal),
                int(s.revisited),
            )


def _walk_rows(records):
    for rec in records:
        yield (
            rec.instance_id,
            rec.walk_id,
            rec.typology,
            rec.walk_length,
            "" if rec.first_portal_step is None else rec.first_portal_step,
            rec.start_descent_length,
            rec.revisited_distinct,
        )


def _write_csv(path_or_file, header, rows) -> None:
    if hasattr(path_or_file, "write"):
        w = csv.writer(path_or_file, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    with open(Path(path_or_file), "w", newline="", encoding="utf-8") as fh:
        _write_csv(fh, header, rows)


def read_walk_records(steps_path, walks_path) -> list[WalkRecord]:
    """Rebuild WalkRecords from the two CSV artifacts (no permutations)."""
    records: dict[tuple[str, int], WalkRecord] = {}
    with open(walks_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["instance_id"], int(row["walk_id"]))
            records[key] = WalkRecord(
                instance_id=key[0],
                walk_id=key[1],
                typology=row["typology"],
                first_portal_step=(
                    int(row["first_portal_step"]) if row["first_portal_step"] else None
                ),
                start_descent_length=int(row["start_descent_length"]),
                revisited_distinct=int(row["revisited_distinct"]),
            )
    with open(steps_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["instance_id"], int(row["walk_id"]))
            rec = records.get(key)
            if rec is None:
                raise ContractError(f"step row for unknown walk {key}")
            rec.steps.append(
                WalkStep(
                    step=int(row["step"]),
                    fitness=int(row["fitness"]),
                    neutral_degree=int(row["neutral_degree"]),
                    evolvability=Fraction(row["evolvability"]) if row["evolvability"] else None,
                    is_portal=row["is_portal"] == "1",
                    revisited=row["revisited"] == "1",
                )
            )
    out = list(records.values())
    for rec in out:
        if not rec.steps:
            raise ContractError(f"walk {rec.instance_id}/{rec.walk_id} has no steps")
        rec.steps.sort(key=lambda s: s.step)
    return out
