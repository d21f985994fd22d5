"""envylab: envy statistics in random one-to-one matching markets.

Simulates deferred acceptance (round-based and one-proposal-at-a-time with
lazily revealed preferences), random serial dictatorship, and top trading
cycles on uniformly random markets; builds envy graphs; and checks the
closed-form expectations (H_n unenvied students, about n/H_n students who
envy nobody under deferred acceptance, (n+1)/2 top choices under serial
dictatorship) by Monte Carlo and exact enumeration.
"""

from .coupon import CollectorRun, run_collector, singleton_count_from_da
from .envy import (
    EnvyGraph,
    RankHistogram,
    build_envy_graph,
    envy_nobody_count,
    match_ranks,
    rank_histogram,
    under_demanded_schools,
    unenvied_count,
)
from .experiments import (
    DEFAULT_SIZE_SWEEP,
    AggregateRecord,
    ExperimentConfig,
    ReplicationRecord,
    aggregate_series,
    figure1_table,
    read_csv,
    read_per_replication_csv,
    run_experiment,
    write_csv,
    write_per_replication_csv,
)
from .market import (
    LazyPreferenceStream,
    MarketInstance,
    Seed,
    StreamExhaustedError,
    complete_profile,
    generate_market,
    make_streams,
    realized_profile,
)
from .mechanisms import (
    Endowment,
    Matching,
    ProposalLog,
    SerialOrder,
    blocking_pairs,
    completed_market,
    deferred_acceptance,
    rsd,
    sequential_da,
    sequential_da_on_market,
    ttc,
)
from .oracle import (
    EnumerationSizeError,
    ExactExpectation,
    all_stable_matchings,
    enumerate_expected_rsd,
    enumerate_expected_unenvied_da,
    harmonic_exact,
    student_optimal_stable_matching,
)
from .theory import (
    Prediction,
    geometric_rank_pmf,
    harmonic,
    harmonic_asymptotic,
    predict,
    rsd_position_unenvied_prob,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateRecord",
    "CollectorRun",
    "DEFAULT_SIZE_SWEEP",
    "Endowment",
    "EnumerationSizeError",
    "EnvyGraph",
    "ExactExpectation",
    "ExperimentConfig",
    "LazyPreferenceStream",
    "MarketInstance",
    "Matching",
    "Prediction",
    "ProposalLog",
    "RankHistogram",
    "ReplicationRecord",
    "Seed",
    "SerialOrder",
    "StreamExhaustedError",
    "aggregate_series",
    "all_stable_matchings",
    "blocking_pairs",
    "build_envy_graph",
    "complete_profile",
    "completed_market",
    "deferred_acceptance",
    "enumerate_expected_rsd",
    "enumerate_expected_unenvied_da",
    "envy_nobody_count",
    "figure1_table",
    "generate_market",
    "geometric_rank_pmf",
    "harmonic",
    "harmonic_asymptotic",
    "harmonic_exact",
    "make_streams",
    "match_ranks",
    "predict",
    "rank_histogram",
    "read_csv",
    "read_per_replication_csv",
    "realized_profile",
    "rsd",
    "rsd_position_unenvied_prob",
    "run_collector",
    "run_experiment",
    "sequential_da",
    "sequential_da_on_market",
    "singleton_count_from_da",
    "student_optimal_stable_matching",
    "ttc",
    "under_demanded_schools",
    "unenvied_count",
    "write_csv",
    "write_per_replication_csv",
]
