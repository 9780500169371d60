"""Reproducible experiment campaigns: instances, descents, walks, reports.

Every random stream is derived from the master seed and the task's own
coordinates (size, instance index, walk index), so results are independent
of execution order and worker count. The aggregation step always reads the
walk CSVs back from disk, which makes `analyze` and a later `report` over
the same directory produce identical report files.
"""
from __future__ import annotations

import hashlib
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractError, ParseError
from .instance import Instance, generate_instance, generate_instance_taillard, save_instance
from .landscape import WalkRecord, neutral_walk, read_walk_records, write_steps_csv, write_walks_csv
from .search import first_improvement_descent, steepest_descent
from .stats import (
    DEFAULT_NULL_REPEATS,
    LandscapeReport,
    aggregate_report,
    report_to_json,
    report_to_text,
    write_fig_csvs,
)

RNG_MODES = ("native", "taillard")
DESCENT_KINDS = ("steepest", "first")

# stream-domain tags for seed derivation
_TAG_INSTANCE = 1
_TAG_DESCENT = 2
_TAG_WALK = 3
_TAG_NULL = 4

_TAILLARD_SEED_MAX = 2**31 - 2

_ID_RE = re.compile(r"^(\d+)x(\d+)/i(\d+)$")


@dataclass
class CampaignConfig:
    sizes: list[tuple[int, int]]
    instances_per_size: int = 10
    walks_per_instance: int = 30
    descents_for_length_calibration: int = 30
    walk_length_multiplier: int = 10
    master_seed: int = 0
    output_dir: Path = Path("campaign")
    rng_mode: str = "native"
    jobs: int = 1
    shared_start: bool = False
    descent: str = "steepest"
    null_repeats: int = DEFAULT_NULL_REPEATS

    def __post_init__(self):
        self.sizes = [(int(n), int(m)) for n, m in self.sizes]
        self.output_dir = Path(self.output_dir)
        if not self.sizes:
            raise ContractError("at least one size is required")
        for n, m in self.sizes:
            if n < 2 or m < 1:
                raise ContractError(f"infeasible size {n}x{m}: need N >= 2, M >= 1")
        for name in (
            "instances_per_size",
            "walks_per_instance",
            "descents_for_length_calibration",
            "walk_length_multiplier",
            "jobs",
            "null_repeats",
        ):
            if getattr(self, name) < 1:
                raise ContractError(f"{name} must be >= 1")
        if self.rng_mode not in RNG_MODES:
            raise ContractError(f"rng_mode must be one of {RNG_MODES}")
        if self.descent not in DESCENT_KINDS:
            raise ContractError(f"descent must be one of {DESCENT_KINDS}")


def _derived_rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


def _derived_uint(*key: int) -> int:
    ss = np.random.SeedSequence([int(k) for k in key])
    return int(ss.generate_state(1, np.uint64)[0])


def instance_id(n: int, m: int, idx: int) -> str:
    return f"{n}x{m}/i{idx:02d}"


def size_from_instance_id(iid: str) -> tuple[int, int]:
    match = _ID_RE.match(iid)
    if not match:
        raise ParseError(f"instance id {iid!r} does not encode a size")
    return int(match.group(1)), int(match.group(2))


def make_campaign_instance(
    n: int, m: int, idx: int, master_seed: int, rng_mode: str
) -> Instance:
    raw = _derived_uint(master_seed, n, m, idx, _TAG_INSTANCE)
    if rng_mode == "taillard":
        seed = raw % _TAILLARD_SEED_MAX + 1
        inst = generate_instance_taillard(n, m, seed)
    else:
        inst = generate_instance(n, m, raw)
    inst.id = instance_id(n, m, idx)
    return inst


@dataclass
class InstanceResult:
    key: tuple[int, int, int]
    walk_budget: int
    calibration_lengths: list[int]
    records: list[WalkRecord] = field(default_factory=list)


def _descend(config: CampaignConfig, instance: Instance, d: int):
    """Calibration/start descent number d for this instance; returns (perm, length)."""
    n, m = instance.n_jobs, instance.n_machines
    rng = _derived_rng(config.master_seed, n, m, _TAG_DESCENT, _instance_idx(instance), d)
    start = rng.permutation(n).astype(np.int64)
    if config.descent == "steepest":
        res = steepest_descent(instance, start)
    else:
        res = first_improvement_descent(instance, start, rng)
    return res.best_perm, res.descent_lengths[0]


def _instance_idx(instance: Instance) -> int:
    return int(instance.id.rsplit("i", 1)[1])


def run_instance_task(config: CampaignConfig, n: int, m: int, idx: int) -> InstanceResult:
    """Generate one instance, calibrate the walk budget, run its walks."""
    instance = make_campaign_instance(n, m, idx, config.master_seed, config.rng_mode)
    iid = instance.id

    n_cal = config.descents_for_length_calibration
    n_walks = config.walks_per_instance
    n_descents = n_cal if config.shared_start else max(n_cal, n_walks)
    descents = [_descend(config, instance, d) for d in range(n_descents)]
    calibration_lengths = [length for _, length in descents[:n_cal]]
    budget = max(1, config.walk_length_multiplier * max(calibration_lengths))

    result = InstanceResult(
        key=(n, m, idx), walk_budget=budget, calibration_lengths=calibration_lengths
    )
    for w in range(n_walks):
        start_perm, descent_len = descents[0] if config.shared_start else descents[w]
        rng = _derived_rng(config.master_seed, n, m, _TAG_WALK, idx, w)
        result.records.append(
            neutral_walk(
                instance,
                start_perm,
                budget,
                rng,
                instance_id=iid,
                walk_id=w,
                start_descent_length=descent_len,
            )
        )
    return result


def _run_task_tuple(args) -> InstanceResult:
    return run_instance_task(*args)


def run_analysis_campaign(config: CampaignConfig) -> tuple[LandscapeReport, dict]:
    """Full campaign: walks to CSVs, aggregation to report and fig files.

    Returns the report plus the manifest (also written to manifest.json). On
    write failure a partial manifest with status "aborted" is left behind.
    """
    outdir = config.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "status": "aborted",
        "config": _config_dict(config),
        "files": {},
    }

    tasks = [
        (config, n, m, idx)
        for n, m in sorted(set(config.sizes))
        for idx in range(config.instances_per_size)
    ]
    try:
        if config.jobs > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                results = list(pool.map(_run_task_tuple, tasks))
        else:
            results = [run_instance_task(*t) for t in tasks]
        results.sort(key=lambda r: r.key)

        records = [rec for res in results for rec in res.records]
        _write_and_digest(manifest, outdir, "steps.csv", write_steps_csv, records)
        _write_and_digest(manifest, outdir, "walks.csv", write_walks_csv, records)
        manifest["walk_budgets"] = {
            instance_id(*res.key): res.walk_budget for res in results
        }

        report = build_report(
            outdir, null_repeats=config.null_repeats, master_seed=config.master_seed
        )
        for name, text in (
            ("report.json", report_to_json(report)),
            ("report.txt", report_to_text(report)),
        ):
            (outdir / name).write_text(text, encoding="utf-8")
            manifest["files"][name] = _sha256(outdir / name)
        for path in write_fig_csvs(report, outdir):
            manifest["files"][path.name] = _sha256(path)
        manifest["status"] = "complete"
    except BaseException:
        try:
            _write_manifest(outdir, manifest)
        except OSError:
            pass
        raise
    _write_manifest(outdir, manifest)
    return report, manifest


def _write_manifest(outdir: Path, manifest: dict) -> None:
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def build_report(
    campaign_dir, *, null_repeats: int = DEFAULT_NULL_REPEATS, master_seed: int = 0
) -> LandscapeReport:
    """Aggregate the walk CSVs in campaign_dir into a LandscapeReport."""
    campaign_dir = Path(campaign_dir)
    records = read_walk_records(campaign_dir / "steps.csv", campaign_dir / "walks.csv")
    return aggregate_report(
        records,
        size_from_instance_id,
        null_repeats=null_repeats,
        null_seed=_derived_uint(master_seed, _TAG_NULL),
    )


def write_report_files(report: LandscapeReport, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in (
        ("report.json", report_to_json(report)),
        ("report.txt", report_to_text(report)),
    ):
        path = outdir / name
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    paths.extend(write_fig_csvs(report, outdir))
    return paths


def run_generate(
    n_jobs: int,
    n_machines: int,
    count: int,
    seed: int,
    rng_mode: str = "native",
    output_dir="instances",
) -> list[Path]:
    """Write `count` generated instance files named <N>x<M>_<k>.txt."""
    if rng_mode not in RNG_MODES:
        raise ContractError(f"rng_mode must be one of {RNG_MODES}")
    if count < 1:
        raise ContractError("count must be >= 1")
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(count):
        inst = make_campaign_instance(n_jobs, n_machines, k, seed, rng_mode)
        path = outdir / f"{n_jobs}x{n_machines}_{k}.txt"
        save_instance(inst, path)
        paths.append(path)
    return paths


def _write_and_digest(manifest, outdir: Path, name: str, writer, records) -> None:
    path = outdir / name
    writer(records, path)
    manifest["files"][name] = _sha256(path)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _config_dict(config: CampaignConfig) -> dict:
    return {
        "sizes": [f"{n}x{m}" for n, m in config.sizes],
        "instances_per_size": config.instances_per_size,
        "walks_per_instance": config.walks_per_instance,
        "descents_for_length_calibration": config.descents_for_length_calibration,
        "walk_length_multiplier": config.walk_length_multiplier,
        "master_seed": config.master_seed,
        "rng_mode": config.rng_mode,
        "shared_start": config.shared_start,
        "descent": config.descent,
        "null_repeats": config.null_repeats,
    }
