"""Flowshop instances: generation, parsing, and serialization.

An instance is an N x M matrix of integer processing times (job rows,
machine columns) plus a text id and, for generated instances, the seed that
produced it. Two generators are provided:

* :func:`generate_instance` draws i.i.d. uniform times on [0, 99] from a
  counter-based Philox stream, so an (n_jobs, n_machines, seed) triple always
  yields the same matrix regardless of platform or call history.
* :func:`generate_instance_taillard` reproduces the classic benchmark
  generator: the portable Lehmer/Park-Miller congruential generator
  (a=16807, m=2^31-1, Schrage decomposition) drawing times on [1, 99] in
  machine-major order, so published time seeds recreate the canonical files.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .errors import ContractError, ParseError
from ._kernels import as_ptimes

GENERATED_TIME_RANGE = (0, 99)


@dataclass
class Instance:
    """One permutation-flowshop instance.

    Equality compares dimensions and processing times only; ``id`` and
    ``seed`` are provenance metadata and do not survive a file round-trip.
    """

    n_jobs: int
    n_machines: int
    processing_times: np.ndarray
    id: str = ""
    seed: int | None = None

    def __post_init__(self):
        self.processing_times = as_ptimes(self.processing_times)
        if self.n_jobs < 1 or self.n_machines < 1:
            raise ContractError("instance must have at least one job and one machine")
        if self.processing_times.shape != (self.n_jobs, self.n_machines):
            raise ContractError(
                f"processing_times shape {self.processing_times.shape} does not match "
                f"{self.n_jobs} jobs x {self.n_machines} machines"
            )
        if (self.processing_times < 0).any():
            raise ContractError("processing times must be non-negative")
        self.processing_times.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.n_jobs == other.n_jobs
            and self.n_machines == other.n_machines
            and np.array_equal(self.processing_times, other.processing_times)
        )

    @property
    def total_processing_time(self) -> int:
        return int(self.processing_times.sum())


def generate_instance(n_jobs: int, n_machines: int, seed: int) -> Instance:
    """Generate a uniform-[0,99] instance from a deterministic Philox stream."""
    if n_jobs < 1 or n_machines < 1:
        raise ContractError("n_jobs and n_machines must be positive")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    times = rng.integers(0, 100, size=(n_jobs, n_machines), dtype=np.int32)
    return Instance(
        n_jobs=n_jobs,
        n_machines=n_machines,
        processing_times=times,
        id=f"{n_jobs}x{n_machines}-s{seed}",
        seed=int(seed),
    )


class TaillardRNG:
    """Portable Lehmer generator used by the classic benchmark suite.

    Implements z' = 16807 * z mod (2^31 - 1) via Schrage's decomposition so
    every intermediate fits in 32-bit arithmetic; seeds must lie in
    [1, 2^31 - 2]. Starting from z=1, the 10000th value is 1043618065
    (the published validation value for this generator).
    """

    A = 16807
    B = 127773
    C = 2836
    M = 2**31 - 1

    def __init__(self, seed: int):
        if not 1 <= seed <= self.M - 1:
            raise ContractError(f"taillard seed must be in [1, {self.M - 1}]")
        self.state = int(seed)

    def next_state(self) -> int:
        k = self.state // self.B
        self.state = self.A * (self.state % self.B) - k * self.C
        if self.state < 0:
            self.state += self.M
        return self.state

    def unif(self, low: int, high: int) -> int:
        u = self.next_state() / self.M
        return low + int(u * (high - low + 1))


def generate_instance_taillard(n_jobs: int, n_machines: int, time_seed: int) -> Instance:
    """Regenerate a benchmark instance from its published time seed.

    Times are unif[1, 99], drawn machine-major (all jobs on machine 1 first),
    matching the original generator's loop order.
    """
    if n_jobs < 1 or n_machines < 1:
        raise ContractError("n_jobs and n_machines must be positive")
    rng = TaillardRNG(time_seed)
    times = np.empty((n_jobs, n_machines), dtype=np.int32)
    for j in range(n_machines):
        for i in range(n_jobs):
            times[i, j] = rng.unif(1, 99)
    return Instance(
        n_jobs=n_jobs,
        n_machines=n_machines,
        processing_times=times,
        id=f"{n_jobs}x{n_machines}-t{time_seed}",
        seed=int(time_seed),
    )


def _tokenize(text: str) -> list[tuple[int, list[str]]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if tokens:
            lines.append((lineno, tokens))
    return lines


def _ints(tokens: list[str], lineno: int) -> list[int]:
    values = []
    for tok in tokens:
        try:
            values.append(int(tok))
        except ValueError:
            raise ParseError(f"non-integer token {tok!r}", lineno) from None
    return values


def parse_instance(text: str | IO[str], fmt: str = "native", id: str = "") -> Instance:
    """Parse an instance from text.

    ``fmt='native'``: header "N M" followed by N rows of M integers (job
    rows). ``fmt='taillard'``: header "N M [seed ub lb]" followed by M rows
    of N integers (machine rows, transposed on read).
    """
    if fmt not in ("native", "taillard"):
        raise ContractError(f"unknown instance format {fmt!r}")
    if hasattr(text, "read"):
        text = text.read()
    lines = _tokenize(text)
    if not lines:
        raise ParseError("empty instance", 1)

    lineno, header = lines[0]
    if fmt == "native" and len(header) != 2:
        raise ParseError(f"expected header 'N M', got {len(header)} tokens", lineno)
    if fmt == "taillard" and len(header) not in (2, 5):
        raise ParseError("expected header 'N M' or 'N M seed ub lb'", lineno)
    fields = _ints(header, lineno)
    n_jobs, n_machines = fields[0], fields[1]
    seed = fields[2] if len(fields) == 5 else None
    if n_jobs < 1 or n_machines < 1:
        raise ParseError("N and M must be positive", lineno)

    n_rows, row_len = (n_jobs, n_machines) if fmt == "native" else (n_machines, n_jobs)
    body = lines[1:]
    if len(body) != n_rows:
        raise ParseError(f"expected {n_rows} rows, got {len(body)}", lineno)
    matrix = np.empty((n_rows, row_len), dtype=np.int64)
    for r, (row_lineno, tokens) in enumerate(body):
        if len(tokens) != row_len:
            raise ParseError(f"expected {row_len} values, got {len(tokens)}", row_lineno)
        row = _ints(tokens, row_lineno)
        if any(v < 0 for v in row):
            raise ParseError("negative processing time", row_lineno)
        matrix[r] = row
    if fmt == "taillard":
        matrix = matrix.T
    return Instance(n_jobs=n_jobs, n_machines=n_machines, processing_times=matrix, id=id, seed=seed)


def write_instance(instance: Instance) -> str:
    """Serialize to the native format; inverse of :func:`parse_instance`."""
    rows = [f"{instance.n_jobs} {instance.n_machines}"]
    for row in instance.processing_times:
        rows.append(" ".join(str(int(v)) for v in row))
    return "\n".join(rows) + "\n"


def load_instance(path, fmt: str = "native") -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(encoding="utf-8"), fmt=fmt, id=path.stem)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(write_instance(instance), encoding="utf-8")
