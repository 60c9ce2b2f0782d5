"""Anchor scans, replica-count stability, the 1/R error-scaling fit and MSE/GE curves."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..consensus import agreements, overlap_vote
from ..data.dataset import Dataset
from ..errors import InvalidInputError
from ..kernels import data_bounds
from ..numeric import fit_line
from .validation import ModelConfig, cross_validate, derive_seed, kfold_split, targets_for
from .preprocess import fit_scaling
from ..replica import fit_ensemble, VotingRule


@dataclass(frozen=True)
class ScanRecord:
    v: int
    R: int
    mean_accuracy: float
    normalized_overlap: float
    mean_energy: float
    mean_agreement: float
    runtime_seconds: float


def scan_anchor_points(
    dataset: Dataset, v_grid: Sequence[int], config: ModelConfig, seeds: Sequence[int] = (0,), k: int = 5
) -> list[ScanRecord]:
    """Cross-validated accuracy and overlap for each ``v`` in ``v_grid``.

    Every grid point reuses the same seeds, so folds are shared and anchor
    sets are nested across ``v``.
    """
    if len(v_grid) == 0:
        raise InvalidInputError("empty v grid")
    if len(seeds) == 0:
        raise InvalidInputError("need at least one seed")
    out = []
    for v in v_grid:
        cfg = config.with_(v=int(v))
        acc, ov, en, ag = [], [], [], []
        t0 = time.perf_counter()
        for s in seeds:
            rep = cross_validate(dataset, cfg, k, s)
            table = rep.table
            acc.append(rep.mean_accuracy)
            ov.append(overlap_vote(table)[1])
            ag.append(float(agreements(table).mean()))
            en.append(rep.mean_train_energy)
        out.append(
            ScanRecord(
                int(v), cfg.R, float(np.mean(acc)), float(np.mean(ov)), float(np.mean(en)),
                float(np.mean(ag)), time.perf_counter() - t0,
            )
        )
    return out


@dataclass(frozen=True)
class StabilityRecord:
    R: int
    mean_accuracy: float
    std_accuracy: float  # sample std (ddof=1) over repeats
    accuracies: tuple


def stability_study(
    dataset: Dataset, config: ModelConfig, R_grid: Sequence[int], repeats: int, k: int = 5, master_seed: int = 0
) -> list[StabilityRecord]:
    """Spread of the CV accuracy over independent master seeds, per replica count."""
    if repeats < 2:
        raise InvalidInputError("stability needs at least 2 repeats")
    seeds = [derive_seed(master_seed, 7, r) for r in range(repeats)]
    out = []
    for R in R_grid:
        cfg = config.with_(R=int(R))
        accs = [cross_validate(dataset, cfg, k, s).mean_accuracy for s in seeds]
        out.append(StabilityRecord(int(R), float(np.mean(accs)), float(np.std(accs, ddof=1)), tuple(accs)))
    return out


@dataclass(frozen=True)
class ErrorScalingFit:
    intercept: float
    slope: float
    negative_intercept: bool


def error_scaling_fit(points) -> ErrorScalingFit:
    """OLS of squared error rate against 1/R; ``points`` holds (R, error_rate) pairs."""
    pts = [(1.0 / float(R), float(e) ** 2) for R, e in points]
    if len(pts) < 2:
        raise InvalidInputError("need at least two (R, error) points")
    slope, intercept = fit_line(pts)
    return ErrorScalingFit(float(intercept), float(slope), bool(intercept < 0))


def error_scaling_study(
    dataset: Dataset, config: ModelConfig, R_grid: Sequence[int], seeds: Sequence[int] = (0,), k: int = 5
):
    """Mean CV error rate per R and the resulting 1/R fit."""
    points = []
    for R in R_grid:
        cfg = config.with_(R=int(R))
        err = np.mean([1.0 - cross_validate(dataset, cfg, k, s).mean_accuracy for s in seeds])
        points.append((int(R), float(err)))
    return points, error_scaling_fit(points)


@dataclass(frozen=True)
class MseGeRecord:
    v: int
    training_mse: float
    generalization_error: float


def mse_ge_curve(
    dataset: Dataset, v_grid: Sequence[int], config: ModelConfig, k: int = 5, seed: int = 0
) -> list[MseGeRecord]:
    """Training MSE (mean replica E/N) and held-out MSE of the replica average, per v.

    Targets are the +/-1 labels for classification and ``y`` for regression.
    Folds and replica seeds are shared across the grid so anchor sets nest.
    """
    if len(v_grid) == 0:
        raise InvalidInputError("empty v grid")
    task = "regression" if config.task == "regression" else "binary"
    targets = targets_for(dataset, task)
    folds = kfold_split(dataset.n, k, derive_seed(seed, 0))
    prepared = []
    for f, test_idx in enumerate(folds):
        mask = np.ones(dataset.n, dtype=bool)
        mask[test_idx] = False
        sc = fit_scaling(dataset.X if config.scale_on_all else dataset.X[mask], config.scale)
        Xtr, Xte = sc.apply(dataset.X[mask]), sc.apply(dataset.X[test_idx])
        prepared.append((Xtr, Xte, targets[mask], targets[test_idx], derive_seed(seed, 1, f)))
    out = []
    for v in v_grid:
        tr, ge = [], []
        for Xtr, Xte, ttr, tte, s in prepared:
            ens = fit_ensemble(config.kernel, Xtr, ttr, int(v), config.R, s, VotingRule("identity"),
                               data_bounds(Xtr), config.workers)
            tr.append(np.mean([m.training_energy for m in ens.replicas]) / Xtr.shape[0])
            ge.append(np.mean((ens.raw_outputs(Xte).mean(axis=0) - tte) ** 2))
        out.append(MseGeRecord(int(v), float(np.mean(tr)), float(np.mean(ge))))
    return out
