"""Sparse variational Bayes for high-dimensional proportional hazards models.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (  # noqa: F401
    BfdrSelection,
    CredibleSet,
    CredibleSetKind,
    DataError,
    DesignKind,
    FitOptions,
    FitResult,
    GofReport,
    GridCell,
    GridSearchResult,
    GroundTruth,
    InitStrategy,
    McmcConfig,
    McmcSamples,
    McmcSummary,
    MetricsReport,
    NumericError,
    PriorConfig,
    RiskComparison,
    RiskMatrix,
    SimConfig,
    SimResult,
    SurvivalDataset,
    TraceEntry,
    VariationalParams,
    __version__,
    bfdr_threshold,
    c_index,
    credible_sets,
    estimate_elbo,
    evaluate,
    expected_log_likelihood,
    fit,
    folded_normal_mean,
    grid_search,
    initialize,
    kl_q_prior,
    log_predictive_density,
    mcmc_summaries,
    median_risk_split,
    partial_log_likelihood,
    posterior_mean,
    prognostic_index,
    read_survival_csv,
    risk_comparison,
    risk_matrix,
    run_chain,
    sample_from_q,
    simulate,
    write_survival_csv,
)
