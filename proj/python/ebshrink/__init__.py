"""Empirical-Bayes shrinkage toolkit for A/B experiment collections.

Thin re-export of the compiled core: closed-form shrinkage estimators, prior
fitting, the simulation laboratory, and posterior-predictive diagnostics.
"""

from ._core import (  # noqa: F401
    AbsentMetricsError,
    AggregateEstimate,
    CheckReport,
    CheckStatistic,
    ConfigError,
    Convention,
    CuratedObservation,
    Estimator,
    EstimateTriple,
    ExperimentSummary,
    Family,
    GapMode,
    GibbsSummary,
    HyperParameters,
    IntervalEstimate,
    InvalidInputError,
    InverseGammaParams,
    MetricsReport,
    NotFoundError,
    ParseError,
    PosteriorSummary,
    ReplicationMae,
    ReplicationPair,
    ScenarioConfig,
    SimRecord,
    SweepAxis,
    SweepRow,
    UnitData,
    aggregate,
    apply_selection,
    compute_metrics,
    curated_log_likelihood,
    evaluate_replication_pairs,
    face_value_estimate,
    fit_tau,
    generate_scenario,
    gibbs_lambda_oracle,
    global_posterior,
    hybrid_posterior,
    interval_hit_fraction,
    lambda_conditional,
    lambda_mode,
    load_hyperparams,
    parse_curated,
    parse_experiments,
    parse_pairs,
    posterior_predictive_replicate,
    run_estimators,
    run_sweep,
    shrinkage_gap,
    shrinkage_posterior,
    store_hyperparams,
    tail_area_probability,
    write_experiments,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
