"""Pre-processing, validation protocols, scans, tuning and diagnostics."""

from .diagnostics import ResidualReport, durbin_watson, regression_diagnostics
from .experiments import (
    ErrorScalingFit,
    MseGeRecord,
    ScanRecord,
    StabilityRecord,
    error_scaling_fit,
    error_scaling_study,
    mse_ge_curve,
    scan_anchor_points,
    stability_study,
)
from .preprocess import SCALING_MODES, ScalingSpec, apply_scaling, drop_missing, fit_scaling
from .tuning import TuneResult, recursive_tune
from .validation import (
    CVReport,
    FoldResult,
    ModelConfig,
    cross_validate,
    derive_seed,
    evaluate_split,
    fit_model,
    kfold_split,
    repeated_cv,
)
