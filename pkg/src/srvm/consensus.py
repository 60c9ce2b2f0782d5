"""Inter-replica overlap statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class PredictionTable:
    """Thresholded replica predictions ``labels`` (R x g) and their vote."""

    labels: np.ndarray
    vote: np.ndarray

    @classmethod
    def from_labels(cls, labels) -> PredictionTable:
        labels = np.asarray(labels)
        if labels.ndim != 2 or labels.size == 0:
            raise InvalidInputError("prediction table must be a nonempty R x g array")
        if not np.all(np.isin(labels, (-1, 1))):
            raise InvalidInputError("replica labels must be +1 or -1")
        labels = labels.astype(np.int64)
        vote = np.where(labels.sum(axis=0) < 0, -1, 1)
        return cls(labels, vote)

    @classmethod
    def from_raw(cls, raw) -> PredictionTable:
        return cls.from_labels(np.where(np.asarray(raw) < 0, -1, 1))

    @property
    def R(self) -> int:
        return self.labels.shape[0]

    @property
    def g(self) -> int:
        return self.labels.shape[1]

    def concat(self, other: PredictionTable) -> PredictionTable:
        return PredictionTable(np.hstack([self.labels, other.labels]), np.concatenate([self.vote, other.vote]))


def overlap_pairwise(table: PredictionTable):
    """Sum of label dot products over replica pairs, raw and per pair and point."""
    R, g = table.labels.shape
    if R < 2:
        raise InvalidInputError("pairwise overlap needs at least two replicas")
    col = table.labels.sum(axis=0)
    # sum_{a>b} y_a.y_b = (|sum_a y_a|^2 - sum_a |y_a|^2) / 2 with |y_a|^2 = g
    raw = float((np.dot(col, col) - R * g) // 2)
    return raw, raw * 2.0 / (g * R * (R - 1))


def overlap_vote(table: PredictionTable):
    R, g = table.labels.shape
    raw = float(np.sum(table.labels @ table.vote))
    return raw, raw / (g * R)


def vote_counts(table: PredictionTable) -> np.ndarray:
    """Un-normalised agreement |sum_a y_i^a| per point."""
    return np.abs(table.labels.sum(axis=0))


def agreements(table: PredictionTable) -> np.ndarray:
    return vote_counts(table) / table.R


def agreement(table: PredictionTable, i: int) -> float:
    if not 0 <= i < table.g:
        raise InvalidInputError(f"point index {i} out of range [0, {table.g})")
    return float(abs(table.labels[:, i].sum()) / table.R)


@dataclass(frozen=True)
class AgreementBin:
    lower: float
    upper: float
    count: int
    accuracy: float  # nan for an empty bin


def agreement_accuracy_bins(table: PredictionTable, true_labels, bin_count: int | None = None):
    """Group points by agreement and report the vote accuracy in each group.

    Without ``bin_count`` each attainable agreement level k/R is its own bin;
    otherwise [0, 1] is cut into ``bin_count`` equal bins (last one closed).
    """
    truth = np.asarray(true_labels)
    if truth.shape != (table.g,):
        raise InvalidInputError("true labels must have one entry per point")
    agree = agreements(table)
    correct = table.vote == truth
    bins = []
    if bin_count is None:
        R = table.R
        for k in range(R % 2, R + 1, 2):
            level = k / R
            mask = vote_counts(table) == k
            bins.append(_bin(level, level, mask, correct))
        return bins
    if bin_count < 1:
        raise InvalidInputError("bin_count must be at least 1")
    idx = np.minimum((agree * bin_count).astype(int), bin_count - 1)
    for b in range(bin_count):
        bins.append(_bin(b / bin_count, (b + 1) / bin_count, idx == b, correct))
    return bins


def _bin(lo, hi, mask, correct):
    n = int(mask.sum())
    acc = float(correct[mask].mean()) if n else float("nan")
    return AgreementBin(lo, hi, n, acc)
