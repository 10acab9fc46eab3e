"""Wisdom-of-crowds diagnostics for forecast panels.

Thin Python layer over the C++ core: panel summaries, rank correlation
with permutation p-values, crowd-bias tests, and the two null-model
generators (unbiased Gaussian, augmented quincunx).
"""

from crowdcheck._core import (
    BiasTestResult,
    CorrelationResult,
    CrowdcheckError,
    Dataset,
    Decomposition,
    Estimate,
    Experiment,
    SummaryStats,
    average_ranks,
    bias_p_value,
    correlation_p,
    crowd_mean,
    diversity_decomposition,
    erf,
    erfc,
    fraction_beating_crowd,
    load_dataset,
    load_guessing_file,
    pearson_r,
    quincunx_ensemble,
    replicate_unbiased,
    sample_quincunx_panel,
    sample_unbiased_panel,
    skewness,
    spearman_rho,
    summarize,
    summarize_experiment,
    unbiased_ensemble,
)

__all__ = [
    "BiasTestResult",
    "CorrelationResult",
    "CrowdcheckError",
    "Dataset",
    "Decomposition",
    "Estimate",
    "Experiment",
    "SummaryStats",
    "average_ranks",
    "bias_p_value",
    "correlation_p",
    "crowd_mean",
    "diversity_decomposition",
    "erf",
    "erfc",
    "fraction_beating_crowd",
    "load_dataset",
    "load_guessing_file",
    "pearson_r",
    "quincunx_ensemble",
    "replicate_unbiased",
    "sample_quincunx_panel",
    "sample_unbiased_panel",
    "skewness",
    "spearman_rho",
    "summarize",
    "summarize_experiment",
    "unbiased_ensemble",
]
