"""Statistics over walk traces: autocorrelation, null model, aggregation.

Aggregation is two-level throughout: each quantity is averaged per walk,
walk values are averaged per instance, and the reported mean/stddev of a
size class is taken across its instance means. Walks shorter than 10 steps
carry too few lags and are left out of autocorrelation aggregates.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractError
from .landscape import WalkRecord, portal_distance_series

MIN_WALK_LEN_FOR_RHO = 10
DEFAULT_NULL_REPEATS = 100


@dataclass
class Series:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ContractError("series must be one-dimensional")

    def __len__(self) -> int:
        return len(self.values)


def _as_values(series) -> np.ndarray:
    if isinstance(series, Series):
        return series.values
    return Series(np.asarray(series)).values


@dataclass
class AutocorrResult:
    values: np.ndarray
    degenerate: bool

    @property
    def rho1(self) -> float:
        return float(self.values[0])


def autocorrelation(series, max_lag: int = 1) -> AutocorrResult:
    """Sample autocorrelation rho(1..max_lag) with global mean and variance.

    A constant series has undefined rho; by convention it yields zeros with
    the degenerate flag set.
    """
    x = _as_values(series)
    if max_lag < 1:
        raise ContractError("max_lag must be >= 1")
    if len(x) <= max_lag + 1:
        raise ContractError(f"series of length {len(x)} too short for max_lag={max_lag}")
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        return AutocorrResult(np.zeros(max_lag), degenerate=True)
    rho = np.array([float(d[:-k] @ d[k:]) / denom for k in range(1, max_lag + 1)])
    return AutocorrResult(rho, degenerate=False)


@dataclass
class NullModelResult:
    mean_abs_rho1: float
    max_abs_rho1: float
    degenerate: bool


def shuffle_null_model(series, repeats: int, rng: np.random.Generator) -> NullModelResult:
    """rho(1) magnitude after destroying the series' ordering by shuffling."""
    x = _as_values(series)
    if len(x) < 3:
        raise ContractError("null model needs a series of length >= 3")
    if repeats < 1:
        raise ContractError("repeats must be >= 1")
    d = x - x.mean()
    if float(d @ d) == 0.0:
        return NullModelResult(0.0, 0.0, degenerate=True)
    vals = np.empty(repeats)
    for r in range(repeats):
        vals[r] = abs(autocorrelation(rng.permutation(x), 1).rho1)
    return NullModelResult(float(vals.mean()), float(vals.max()), degenerate=False)


def pearson(x, y) -> float:
    xv, yv = _as_values(x), _as_values(y)
    if len(xv) != len(yv):
        raise ContractError(f"length mismatch: {len(xv)} vs {len(yv)}")
    if len(xv) < 2:
        raise ContractError("pearson needs at least 2 points")
    dx, dy = xv - xv.mean(), yv - yv.mean()
    sx, sy = float(dx @ dx), float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise ContractError("pearson undefined for zero-variance series")
    return float((dx @ dy) / np.sqrt(sx * sy))


@dataclass
class MeanStd:
    mean: float
    stddev: float
    count: int

    @staticmethod
    def of(values) -> "MeanStd | None":
        vals = [v for v in values if v is not None]
        if not vals:
            return None
        arr = np.asarray(vals, dtype=np.float64)
        std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        return MeanStd(float(arr.mean()), std, len(arr))


@dataclass
class SizeAggregate:
    n_jobs: int
    n_machines: int
    n_instances: int
    n_walks: int
    mean_neutral_degree: MeanStd | None
    neutral_degree_ratio: MeanStd | None
    rho1_neutral_degree: MeanStd | None
    rho1_evolvability: MeanStd | None
    null_rho1_neutral_degree: MeanStd | None
    null_rho1_evolvability: MeanStd | None
    typology_freq: dict[str, MeanStd | None]
    revisit_rate: MeanStd | None
    steps_to_portal: MeanStd | None
    portal_correlation: MeanStd | None


@dataclass
class LandscapeReport:
    sizes: dict[tuple[int, int], SizeAggregate] = field(default_factory=dict)

    def ordered(self) -> list[SizeAggregate]:
        return [self.sizes[k] for k in sorted(self.sizes)]


def _instance_mean(per_walk: list[float | None]) -> float | None:
    vals = [v for v in per_walk if v is not None]
    return float(np.mean(vals)) if vals else None


def aggregate_report(
    records,
    size_of,
    *,
    null_repeats: int = DEFAULT_NULL_REPEATS,
    null_seed: int = 0,
) -> LandscapeReport:
    """Two-level aggregation of walk records into per-size statistics.

    size_of maps an instance_id to its (n_jobs, n_machines) pair; it may be
    a mapping or a callable. Null-model shuffles are driven by null_seed and
    consumed in sorted record order, so results do not depend on input order.
    """
    lookup = size_of if callable(size_of) else lambda iid: size_of[iid]
    records = sorted(records, key=lambda r: (r.instance_id, r.walk_id))
    if not records:
        raise ContractError("no walk records to aggregate")
    rng = np.random.default_rng(null_seed)

    by_size: dict[tuple[int, int], dict[str, list]] = {}
    for rec in records:
        size = tuple(lookup(rec.instance_id))
        group = by_size.setdefault(size, {})
        inst = group.setdefault(rec.instance_id, _new_bucket())
        _accumulate(inst, rec, size, rng, null_repeats)

    report = LandscapeReport()
    for (n, m), group in by_size.items():
        buckets = [group[iid] for iid in sorted(group)]
        inst_means = lambda key: [_instance_mean(b[key]) for b in buckets]
        typology = {
            t: MeanStd.of(
                [float(np.mean([tt == t for tt in b["typology"]])) for b in buckets]
            )
            for t in ("T1", "T2", "T3")
        }
        portal_corr = [b["portal_corr"] for b in buckets]
        report.sizes[(n, m)] = SizeAggregate(
            n_jobs=n,
            n_machines=m,
            n_instances=len(buckets),
            n_walks=sum(len(b["typology"]) for b in buckets),
            mean_neutral_degree=MeanStd.of(inst_means("degree")),
            neutral_degree_ratio=MeanStd.of(inst_means("ratio")),
            rho1_neutral_degree=MeanStd.of(inst_means("rho_deg")),
            rho1_evolvability=MeanStd.of(inst_means("rho_evo")),
            null_rho1_neutral_degree=MeanStd.of(inst_means("null_deg")),
            null_rho1_evolvability=MeanStd.of(inst_means("null_evo")),
            typology_freq=typology,
            revisit_rate=MeanStd.of(inst_means("revisit")),
            steps_to_portal=MeanStd.of(inst_means("portal_steps")),
            portal_correlation=MeanStd.of(portal_corr),
        )
    return report


def _new_bucket() -> dict[str, list]:
    return {
        "degree": [],
        "ratio": [],
        "rho_deg": [],
        "rho_evo": [],
        "null_deg": [],
        "null_evo": [],
        "typology": [],
        "revisit": [],
        "portal_steps": [],
        "portal_pairs": [],
        "portal_corr": None,
    }


def _accumulate(bucket, rec: WalkRecord, size, rng, null_repeats) -> None:
    n = size[0]
    nbhd = (n - 1) ** 2
    degrees = rec.degree_series()
    bucket["degree"].append(float(degrees.mean()))
    bucket["ratio"].append(float(degrees.mean()) / nbhd)
    bucket["typology"].append(rec.typology)

    if len(rec.steps) >= MIN_WALK_LEN_FOR_RHO:
        evol = rec.evolvability_series()
        ac_deg = autocorrelation(degrees, 1)
        ac_evo = autocorrelation(evol, 1)
        bucket["rho_deg"].append(ac_deg.rho1)
        bucket["rho_evo"].append(ac_evo.rho1)
        null_deg = shuffle_null_model(degrees, null_repeats, rng)
        null_evo = shuffle_null_model(evol, null_repeats, rng)
        if not null_deg.degenerate:
            bucket["null_deg"].append(null_deg.mean_abs_rho1)
        if not null_evo.degenerate:
            bucket["null_evo"].append(null_evo.mean_abs_rho1)
    else:
        for key in ("rho_deg", "rho_evo", "null_deg", "null_evo"):
            bucket[key].append(None)

    if rec.typology != "T1":
        bucket["revisit"].append(rec.revisit_fraction())
    if rec.first_portal_step is not None:
        bucket["portal_steps"].append(float(rec.first_portal_step))

    pairs = portal_distance_series(rec)
    bucket["portal_pairs"].extend(pairs)
    if bucket["portal_pairs"]:
        xs = [p[0] for p in bucket["portal_pairs"]]
        ys = [float(p[1]) for p in bucket["portal_pairs"]]
        try:
            bucket["portal_corr"] = pearson(xs, ys)
        except ContractError:
            bucket["portal_corr"] = None


def _ms_dict(ms: MeanStd | None):
    if ms is None:
        return None
    return {"mean": ms.mean, "stddev": ms.stddev, "count": ms.count}


def report_to_dict(report: LandscapeReport) -> dict:
    out = {"sizes": []}
    for agg in report.ordered():
        out["sizes"].append(
            {
                "n_jobs": agg.n_jobs,
                "n_machines": agg.n_machines,
                "n_instances": agg.n_instances,
                "n_walks": agg.n_walks,
                "mean_neutral_degree": _ms_dict(agg.mean_neutral_degree),
                "neutral_degree_ratio": _ms_dict(agg.neutral_degree_ratio),
                "rho1_neutral_degree": _ms_dict(agg.rho1_neutral_degree),
                "rho1_evolvability": _ms_dict(agg.rho1_evolvability),
                "null_rho1_neutral_degree": _ms_dict(agg.null_rho1_neutral_degree),
                "null_rho1_evolvability": _ms_dict(agg.null_rho1_evolvability),
                "typology_freq": {t: _ms_dict(v) for t, v in agg.typology_freq.items()},
                "revisit_rate": _ms_dict(agg.revisit_rate),
                "steps_to_portal": _ms_dict(agg.steps_to_portal),
                "portal_correlation": _ms_dict(agg.portal_correlation),
            }
        )
    return out


def report_to_json(report: LandscapeReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


_TEXT_COLUMNS = (
    ("degree", "mean_neutral_degree"),
    ("ratio", "neutral_degree_ratio"),
    ("rho1(deg)", "rho1_neutral_degree"),
    ("rho1(evo)", "rho1_evolvability"),
    ("revisit", "revisit_rate"),
    ("portal@", "steps_to_portal"),
    ("corr", "portal_correlation"),
)


def report_to_text(report: LandscapeReport) -> str:
    """Aligned-column rendering for terminals."""
    headers = ["size", "walks"] + [h for h, _ in _TEXT_COLUMNS] + ["T1", "T2", "T3"]
    rows = []
    for agg in report.ordered():
        row = [f"{agg.n_jobs}x{agg.n_machines}", str(agg.n_walks)]
        for _, attr in _TEXT_COLUMNS:
            ms = getattr(agg, attr)
            row.append("-" if ms is None else f"{ms.mean:.4f}")
        for t in ("T1", "T2", "T3"):
            ms = agg.typology_freq[t]
            row.append("-" if ms is None else f"{ms.mean:.3f}")
        rows.append(row)
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.rjust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


FIG_FILES = {
    "fig2_ratio.csv": "neutral_degree_ratio",
    "fig_rho_degree.csv": "rho1_neutral_degree",
    "fig_revisit.csv": "revisit_rate",
    "fig_portal_steps.csv": "steps_to_portal",
    "fig_rho_evolvability.csv": "rho1_evolvability",
    "fig_portal_correlation.csv": "portal_correlation",
}


def write_fig_csvs(report: LandscapeReport, outdir) -> list[Path]:
    """Per-figure plot data: one row per size with mean and stddev.

    The typology file carries an extra class column since it holds three
    series per size.
    """
    outdir = Path(outdir)
    written = []
    for name, attr in FIG_FILES.items():
        path = outdir / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("n_jobs", "n_machines", "mean", "stddev"))
            for agg in report.ordered():
                ms = getattr(agg, attr)
                if ms is not None:
                    w.writerow((agg.n_jobs, agg.n_machines, f"{ms.mean:.6f}", f"{ms.stddev:.6f}"))
        written.append(path)
    path = outdir / "fig_typology.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("n_jobs", "n_machines", "typology", "mean", "stddev"))
        for agg in report.ordered():
            for t in ("T1", "T2", "T3"):
                ms = agg.typology_freq[t]
                if ms is not None:
                    w.writerow((agg.n_jobs, agg.n_machines, t, f"{ms.mean:.6f}", f"{ms.stddev:.6f}"))
    written.append(path)
    return written
