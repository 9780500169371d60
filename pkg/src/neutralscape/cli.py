"""Command-line driver: generate, analyze, solve, report.

Exit codes: 0 success, 1 usage error, 2 runtime failure. The environment
variable NEUTRALSCAPE_OUT, when set, overrides every --out flag.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .campaign import (
    CampaignConfig,
    DESCENT_KINDS,
    RNG_MODES,
    build_report,
    run_analysis_campaign,
    run_generate,
    write_report_files,
)
from .errors import ContractError, ParseError
from .instance import load_instance
from .search import (
    ACCEPTANCE_MODES,
    SearchConfig,
    ils_stutzle,
    neh_construct,
    neutral_guided_search,
    restart_descent,
)
from .evaluation import EvalCounter, makespan
from .stats import report_to_text

OUT_ENV_VAR = "NEUTRALSCAPE_OUT"

ALGORITHMS = ("ils", "neutral_guided", "descent", "neh")


class _UsageError(Exception):
    pass


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise _UsageError(f"size {text!r} is not of the form NxM")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise _UsageError(f"size {text!r} is not of the form NxM") from None
    if n < 1 or m < 1:
        raise _UsageError(f"size {text!r} must be positive")
    return n, m


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = [_parse_size(tok) for tok in text.split(",") if tok]
    if not sizes:
        raise _UsageError("--sizes must name at least one NxM size")
    return sizes


def _resolve_out(args) -> Path:
    return Path(os.environ.get(OUT_ENV_VAR) or args.out)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neutralscape",
        description="Flowshop scheduling toolkit: instances, solvers, neutrality analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write random instance files")
    gen.add_argument("--size", required=True, help="instance size as NxM, e.g. 20x5")
    gen.add_argument("--count", type=int, default=10, help="number of instances")
    gen.add_argument("--seed", type=int, default=0, help="master seed")
    gen.add_argument("--rng", choices=RNG_MODES, default="native")
    gen.add_argument("--out", default="instances", help="output directory")

    ana = sub.add_parser("analyze", help="run a neutral-walk analysis campaign")
    ana.add_argument("--sizes", required=True, help="comma-separated NxM sizes")
    ana.add_argument("--instances", type=int, default=10, help="instances per size")
    ana.add_argument("--walks", type=int, default=30, help="walks per instance")
    ana.add_argument("--descents", type=int, default=30, help="calibration descents")
    ana.add_argument("--multiplier", type=int, default=10, help="walk budget multiplier")
    ana.add_argument("--seed", type=int, default=0, help="master seed")
    ana.add_argument("--jobs", type=int, default=1, help="worker processes")
    ana.add_argument("--rng", choices=RNG_MODES, default="native")
    ana.add_argument("--out", default="campaign", help="output directory")
    ana.add_argument("--shared-start", action="store_true",
                     help="start all walks of an instance from one shared local optimum")
    ana.add_argument("--descent", choices=DESCENT_KINDS, default="steepest")
    ana.add_argument("--null-repeats", type=int, default=100)

    sol = sub.add_parser("solve", help="run a solver on an instance file")
    sol.add_argument("instance", help="instance file path")
    sol.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    sol.add_argument("--seed", type=int, default=0)
    sol.add_argument("--budget", type=int, default=100_000, help="evaluation budget")
    sol.add_argument("--perturbation-strength", type=int, default=3)
    sol.add_argument("--temperature", type=float, default=None)
    sol.add_argument("--acceptance", choices=ACCEPTANCE_MODES, default="metropolis")
    sol.add_argument("--max-neutral-steps", type=int, default=100)
    sol.add_argument("--sampled-evolvability", type=int, default=None, metavar="K")
    sol.add_argument("--format", choices=("native", "taillard"), default="native")
    sol.add_argument("--trajectory", default=None, help="write JSON trajectory here")

    rep = sub.add_parser("report", help="rebuild report files from campaign CSVs")
    rep.add_argument("--out", default="campaign", help="campaign directory")
    rep.add_argument("--seed", type=int, default=0, help="campaign master seed")
    rep.add_argument("--null-repeats", type=int, default=100)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _dispatch(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ContractError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "generate":
        n, m = _parse_size(args.size)
        paths = run_generate(n, m, args.count, args.seed, args.rng, _resolve_out(args))
        print(f"wrote {len(paths)} instance files to {paths[0].parent}")
        return 0
    if args.command == "analyze":
        sizes = _parse_sizes(args.sizes)
        for n, m in sizes:
            if n < 2:
                raise _UsageError(f"size {n}x{m} infeasible: analysis needs N >= 2")
        config = CampaignConfig(
            sizes=sizes,
            instances_per_size=args.instances,
            walks_per_instance=args.walks,
            descents_for_length_calibration=args.descents,
            walk_length_multiplier=args.multiplier,
            master_seed=args.seed,
            output_dir=_resolve_out(args),
            rng_mode=args.rng,
            jobs=args.jobs,
            shared_start=args.shared_start,
            descent=args.descent,
            null_repeats=args.null_repeats,
        )
        report, manifest = run_analysis_campaign(config)
        print(report_to_text(report), end="")
        print(f"campaign written to {config.output_dir} ({len(manifest['files'])} files)")
        return 0
    if args.command == "solve":
        return _solve(args)
    if args.command == "report":
        outdir = _resolve_out(args)
        report = build_report(outdir, null_repeats=args.null_repeats, master_seed=args.seed)
        write_report_files(report, outdir)
        print(report_to_text(report), end="")
        return 0
    raise _UsageError(f"unknown command {args.command!r}")


def _solve(args) -> int:
    instance = load_instance(args.instance, fmt=args.format)
    started = time.perf_counter()
    if args.algorithm == "neh":
        counter = EvalCounter()
        perm = neh_construct(instance, counter)
        counter.charge(1)
        result_dict = {
            "best_fitness": makespan(instance, perm),
            "evaluations_used": counter.used,
            "is_local_optimum": False,
            "completed": True,
            "descents": 0,
        }
        trajectory = None
    else:
        config = SearchConfig(
            seed=args.seed,
            max_evaluations=args.budget,
            perturbation_strength=args.perturbation_strength,
            metropolis_temperature=args.temperature,
            max_neutral_steps=args.max_neutral_steps,
            acceptance=args.acceptance,
            sampled_evolvability=args.sampled_evolvability,
            collect_trajectory=args.trajectory is not None,
        )
        algo = {
            "ils": ils_stutzle,
            "neutral_guided": neutral_guided_search,
            "descent": restart_descent,
        }[args.algorithm]
        res = algo(instance, config)
        result_dict = {
            "best_fitness": res.best_fitness,
            "evaluations_used": res.evaluations_used,
            "is_local_optimum": res.is_local_optimum,
            "completed": res.completed,
            "descents": len(res.descent_lengths),
        }
        trajectory = res.trajectory
    elapsed = time.perf_counter() - started
    summary = {
        "algorithm": args.algorithm,
        "instance": str(args.instance),
        "n_jobs": instance.n_jobs,
        "n_machines": instance.n_machines,
        "seed": args.seed,
        **result_dict,
        "wall_time_s": round(elapsed, 3),
    }
    print(json.dumps(summary, sort_keys=True))
    if args.trajectory is not None:
        Path(args.trajectory).write_text(
            json.dumps({"trajectory": trajectory or []}) + "\n", encoding="utf-8"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
