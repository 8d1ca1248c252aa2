"""Matrix factorization with a Zipf popularity penalty.

Thin re-export of the compiled extension. The package trains
cosine-normalized factor models by SGD, optionally with a penalty that
rewards a flatter popularity distribution over each user's top-K lists,
and ships the measurement helpers used to compare both variants.
"""

from zipfmf._core import (
    AlphaCoefficients,
    DataSplit,
    EpochStats,
    Error,
    FactorModel,
    OccurrenceProfile,
    Rating,
    RatingScale,
    RatingsDataset,
    SweepOptions,
    SweepReport,
    SweepRow,
    TrainConfig,
    TrainResult,
    cosine_score,
    default_beta_grid,
    default_lr_grid,
    estimate_alpha,
    evaluate_mae,
    evaluate_precision_at_k,
    init_model,
    load_model,
    load_movielens,
    matthew_degree,
    matthew_degree_from_counts,
    occurrence_profile,
    pareto_pdf,
    predict_rating,
    run_beta_sweep,
    run_lr_sweep,
    run_matthew_comparison,
    sample_gradient,
    sample_loss,
    save_model,
    split,
    train_vanilla,
    train_zipf,
    zipf_exponent_estimate,
    zipf_pmf,
)

__all__ = [
    "AlphaCoefficients",
    "DataSplit",
    "EpochStats",
    "Error",
    "FactorModel",
    "OccurrenceProfile",
    "Rating",
    "RatingScale",
    "RatingsDataset",
    "SweepOptions",
    "SweepReport",
    "SweepRow",
    "TrainConfig",
    "TrainResult",
    "cosine_score",
    "default_beta_grid",
    "default_lr_grid",
    "estimate_alpha",
    "evaluate_mae",
    "evaluate_precision_at_k",
    "init_model",
    "load_model",
    "load_movielens",
    "matthew_degree",
    "matthew_degree_from_counts",
    "occurrence_profile",
    "pareto_pdf",
    "predict_rating",
    "run_beta_sweep",
    "run_lr_sweep",
    "run_matthew_comparison",
    "sample_gradient",
    "sample_loss",
    "save_model",
    "split",
    "train_vanilla",
    "train_zipf",
    "zipf_exponent_estimate",
    "zipf_pmf",
]
