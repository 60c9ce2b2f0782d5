"""K-fold cross-validation and fixed train/test evaluation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..consensus import PredictionTable
from ..data.dataset import Dataset
from ..errors import ConfigurationError, InvalidInputError
from ..evaluation import ConfusionTable, MetricsReport, confusion, metrics_report
from ..kernels import KernelSpec, data_bounds
from ..replica import (
    Ensemble,
    VotingRule,
    class_scores,
    fit_ensemble,
    fit_layered,
    fit_multiclass,
    layered_scores,
    threshold,
)
from .preprocess import ScalingSpec, fit_scaling

TASKS = ("binary", "multiclass", "regression")


def derive_seed(master: int, *keys: int) -> int:
    """Independent 64-bit seed for a (master, key...) path."""
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def kfold_split(n: int, k: int, seed: int = 0) -> list[np.ndarray]:
    """Shuffle ``0..n-1`` and cut it into ``k`` folds whose sizes differ by at most one."""
    if k < 2:
        raise InvalidInputError(f"need at least 2 folds, got {k}")
    if k > n:
        raise InvalidInputError(f"cannot split {n} points into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


@dataclass(frozen=True)
class ModelConfig:
    kernel: KernelSpec = field(default_factory=KernelSpec.gaussian)
    v: int = 50
    R: int = 31
    voting: VotingRule = field(default_factory=VotingRule)
    scale: str = "sym11"
    scale_on_all: bool = False
    layers: Optional[tuple] = None  # ((KernelSpec, weight), ...)
    task: str = "binary"
    workers: int = 1

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigurationError(f"unknown task {self.task!r}")
        if self.v < 1 or self.R < 1:
            raise ConfigurationError("v and R must be positive")
        if self.task == "binary" and not self.layers and self.voting.transform == "sign" and self.R % 2 == 0:
            raise ConfigurationError(f"sign voting needs an odd number of replicas, got R = {self.R}")

    def with_(self, **changes) -> ModelConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "v": self.v,
            "R": self.R,
            "voting": str(self.voting),
            "scale": self.scale,
            "scale_on_all": self.scale_on_all,
            "layers": None if not self.layers else [[s.to_dict(), w] for s, w in self.layers],
            "task": self.task,
        }


@dataclass
class FoldResult:
    index: int
    test_index: np.ndarray
    targets: np.ndarray
    scores: np.ndarray  # vote sum, layered score, or regression prediction
    predictions: np.ndarray
    accuracy: Optional[float]
    confusion: Optional[ConfusionTable]
    metrics: Optional[MetricsReport]
    table: Optional[PredictionTable]
    train_energy: float  # mean over replicas of E / N_train
    test_mse: float


@dataclass
class CVReport:
    folds: list[FoldResult]
    runtime_seconds: float
    config: ModelConfig
    seed: int

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([f.accuracy for f in self.folds]))

    @property
    def table(self) -> Optional[PredictionTable]:
        tables = [f.table for f in self.folds]
        if any(t is None for t in tables):
            return None
        out = tables[0]
        for t in tables[1:]:
            out = out.concat(t)
        return out

    @property
    def mean_train_energy(self) -> float:
        return float(np.mean([f.train_energy for f in self.folds]))

    @property
    def mean_test_mse(self) -> float:
        return float(np.mean([f.test_mse for f in self.folds]))

    def pooled_confusion(self) -> Optional[ConfusionTable]:
        tabs = [f.confusion for f in self.folds]
        if any(t is None for t in tabs):
            return None
        total = tabs[0]
        for t in tabs[1:]:
            total = total + t
        return total


def targets_for(dataset: Dataset, task: str) -> np.ndarray:
    if task == "binary":
        return dataset.binary_targets()
    return dataset.y.copy()


def _fit(config: ModelConfig, Xtr, ttr, seed: int, bounds, classes=None):
    if config.task == "multiclass":
        return fit_multiclass(config.kernel, Xtr, ttr, classes, config.v, config.R, seed, bounds, config.workers)
    if config.layers:
        return fit_layered(config.layers, Xtr, ttr, config.v, config.R, seed, bounds, config.workers)
    voting = config.voting if config.task == "binary" else VotingRule("identity")
    return fit_ensemble(config.kernel, Xtr, ttr, config.v, config.R, seed, voting, bounds, config.workers)


def _energy(model, Xtr, ttr, classes=None) -> float:
    if isinstance(model, list):
        return float(np.mean([_energy(e, Xtr, np.where(ttr == c, 1.0, -1.0)) for e, c in zip(model, classes)]))
    return float(np.mean([m.training_energy for m in model.replicas])) / Xtr.shape[0]


def _evaluate(config: ModelConfig, model, Xte, tte, index, test_index, train_energy, classes=None) -> FoldResult:
    table = None
    cm = None
    report = None
    if config.task == "multiclass":
        scores = class_scores(model, Xte)
        pred = np.asarray(classes)[np.argmax(scores, axis=1)]
        acc = float(np.mean(pred == tte))
        # squared error of the one-vs-rest score vectors
        onehot = np.where(np.asarray(classes)[None, :] == tte[:, None], 1.0, -1.0)
        mse = float(np.mean(np.sum((scores - onehot) ** 2, axis=1)))
        scores = scores.max(axis=1)
    elif config.task == "regression":
        raw = model.raw_outputs(Xte)
        scores = raw.mean(axis=0)
        pred = scores
        acc = None
        mse = float(np.mean((scores - tte) ** 2))
    else:
        raw = model.raw_outputs(Xte)
        scores = layered_scores(model, Xte) if model.groups else model.voting.apply(raw).sum(axis=0)
        pred = np.asarray(threshold(scores))
        table = PredictionTable.from_raw(raw)
        cm = confusion(tte, pred)
        report = metrics_report(cm)
        acc = report.accuracy
        mse = float(np.mean((raw.mean(axis=0) - tte) ** 2))
    return FoldResult(index, test_index, tte, scores, pred, acc, cm, report, table, train_energy, mse)


def _scaling(config: ModelConfig, X_ref) -> ScalingSpec:
    return fit_scaling(X_ref, config.scale)


def cross_validate(dataset: Dataset, config: ModelConfig, k: int = 5, seed: int = 0, folds=None) -> CVReport:
    """Fit on k-1 folds, test on the remaining one, for each fold in turn.

    Scaling parameters come from the training folds unless
    ``config.scale_on_all`` is set. Anchors are drawn in the bounding box of
    the scaled training data. Fold ``f`` uses master seed
    ``derive_seed(seed, 1, f)`` for its replicas.
    """
    start = time.perf_counter()
    targets = targets_for(dataset, config.task)
    classes = np.unique(targets) if config.task == "multiclass" else None
    if folds is None:
        folds = kfold_split(dataset.n, k, derive_seed(seed, 0))
    global_scaling = _scaling(config, dataset.X) if config.scale_on_all else None
    results = []
    for f, test_idx in enumerate(folds):
        train_mask = np.ones(dataset.n, dtype=bool)
        train_mask[test_idx] = False
        Xtr_raw, Xte_raw = dataset.X[train_mask], dataset.X[test_idx]
        sc = global_scaling or _scaling(config, Xtr_raw)
        Xtr, Xte = sc.apply(Xtr_raw), sc.apply(Xte_raw)
        ttr, tte = targets[train_mask], targets[test_idx]
        model = _fit(config, Xtr, ttr, derive_seed(seed, 1, f), data_bounds(Xtr), classes)
        energy = _energy(model, Xtr, ttr, classes)
        results.append(_evaluate(config, model, Xte, tte, f, np.asarray(test_idx), energy, classes))
    return CVReport(results, time.perf_counter() - start, config, seed)


def fit_model(dataset: Dataset, config: ModelConfig, seed: int = 0):
    """Fit scaling and an ensemble on the whole of ``dataset``."""
    if config.task == "multiclass":
        raise ConfigurationError("whole-dataset fitting supports binary and regression tasks")
    sc = _scaling(config, dataset.X)
    X = sc.apply(dataset.X)
    model = _fit(config, X, targets_for(dataset, config.task), derive_seed(seed, 1, 0), data_bounds(X))
    return model, sc


def evaluate_split(train: Dataset, test: Dataset, config: ModelConfig, seed: int = 0) -> CVReport:
    """Train on ``train``, score on ``test``; reported as a one-fold CVReport."""
    start = time.perf_counter()
    if config.scale_on_all:
        sc = _scaling(config, np.vstack([train.X, test.X]))
    else:
        sc = _scaling(config, train.X)
    Xtr, Xte = sc.apply(train.X), sc.apply(test.X)
    if config.task == "binary":
        # map both files with the training file's class order
        classes = train.class_values
        if classes.size != 2:
            raise InvalidInputError("binary task needs exactly two training classes")
        ttr = np.where(train.y == classes[1], 1.0, -1.0)
        tte = np.where(test.y == classes[1], 1.0, -1.0)
        cls = None
    else:
        ttr, tte = train.y.copy(), test.y.copy()
        cls = np.unique(ttr) if config.task == "multiclass" else None
    model = _fit(config, Xtr, ttr, derive_seed(seed, 1, 0), data_bounds(Xtr), cls)
    energy = _energy(model, Xtr, ttr, cls)
    fold = _evaluate(config, model, Xte, tte, 0, np.arange(test.n), energy, cls)
    return CVReport([fold], time.perf_counter() - start, config, seed)


def repeated_cv(dataset: Dataset, config: ModelConfig, seeds: Sequence[int], k: int = 5) -> list[CVReport]:
    """One full CV per seed; each seed reshuffles the folds and redraws anchors."""
    return [cross_validate(dataset, config, k, s) for s in seeds]
