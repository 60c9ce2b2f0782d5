"""Stochastic replica voting machines: random-anchor kernel replicas combined by voting."""

__version__ = "0.1.0"

from .consensus import PredictionTable, agreement, agreement_accuracy_bins, agreements, overlap_pairwise, overlap_vote
from .errors import SRVMError
from .evaluation import ConfusionTable, MetricsReport, confusion, cop, hypothesis_test, metrics_report, roc_auc, roc_sweep
from .kernels import AnchorSet, KernelSpec, design_matrix, eval_kernel, sample_anchors
from .replica import (
    Ensemble,
    ReplicaModel,
    VotingRule,
    fit_ensemble,
    fit_layered,
    fit_multiclass,
    fit_replica,
    predict_multiclass,
    predict_raw,
    predict_regression,
    threshold,
    vote,
    vote_layered,
)
