"""Flowshop scheduling toolkit: instances, search, and neutrality analysis."""

from .errors import ContractError, ParseError
from .instance import (
    Instance,
    TaillardRNG,
    generate_instance,
    generate_instance_taillard,
    load_instance,
    parse_instance,
    save_instance,
    write_instance,
)
from .neighborhood import (
    EXCHANGE,
    INSERTION,
    TRANSPOSE,
    Move,
    apply_move,
    canonical_insertion_mask,
    check_permutation,
    enumerate_insertion_moves,
    insertion_move_count,
    random_move,
)
from .evaluation import (
    EvalCounter,
    EvalState,
    build_eval_state,
    makespan,
    makespan_lower_bound,
    scan_all_insertions,
    scan_insertions,
    scan_partial_insertions,
)
from .search import (
    SearchConfig,
    SearchResult,
    default_temperature,
    first_improvement_descent,
    ils_stutzle,
    neh_construct,
    neutral_guided_search,
    restart_descent,
    steepest_descent,
)
from .landscape import (
    NeighborhoodSummary,
    WalkRecord,
    WalkStep,
    classify_typology,
    neutral_walk,
    portal_distance_series,
    read_walk_records,
    steps_to_first_portal,
    summarize_neighborhood,
    write_steps_csv,
    write_walks_csv,
)
from .stats import (
    LandscapeReport,
    MeanStd,
    Series,
    SizeAggregate,
    aggregate_report,
    autocorrelation,
    pearson,
    report_to_dict,
    report_to_json,
    report_to_text,
    shuffle_null_model,
    write_fig_csvs,
)
from .campaign import (
    CampaignConfig,
    build_report,
    run_analysis_campaign,
    run_generate,
    run_instance_task,
)

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "ParseError",
    "Instance",
    "TaillardRNG",
    "generate_instance",
    "generate_instance_taillard",
    "load_instance",
    "parse_instance",
    "save_instance",
    "write_instance",
    "EXCHANGE",
    "INSERTION",
    "TRANSPOSE",
    "Move",
    "apply_move",
    "canonical_insertion_mask",
    "check_permutation",
    "enumerate_insertion_moves",
    "insertion_move_count",
    "random_move",
    "EvalCounter",
    "EvalState",
    "build_eval_state",
    "makespan",
    "makespan_lower_bound",
    "scan_all_insertions",
    "scan_insertions",
    "scan_partial_insertions",
    "SearchConfig",
    "SearchResult",
    "default_temperature",
    "first_improvement_descent",
    "ils_stutzle",
    "neh_construct",
    "neutral_guided_search",
    "restart_descent",
    "steepest_descent",
    "NeighborhoodSummary",
    "WalkRecord",
    "WalkStep",
    "classify_typology",
    "neutral_walk",
    "portal_distance_series",
    "read_walk_records",
    "steps_to_first_portal",
    "summarize_neighborhood",
    "write_steps_csv",
    "write_walks_csv",
    "LandscapeReport",
    "MeanStd",
    "Series",
    "SizeAggregate",
    "aggregate_report",
    "autocorrelation",
    "pearson",
    "report_to_dict",
    "report_to_json",
    "report_to_text",
    "shuffle_null_model",
    "write_fig_csvs",
    "CampaignConfig",
    "build_report",
    "run_analysis_campaign",
    "run_generate",
    "run_instance_task",
    "__version__",
]
