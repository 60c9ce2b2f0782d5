from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDatasetError, InvalidInputError


@dataclass
class Dataset:
    """Dense feature matrix with labels.

    ``y`` holds the raw numeric labels; :meth:`binary_targets` maps the two
    class values onto -1/+1 (smaller value -> -1).
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] | None = None
    provenance: str = ""
    class_names: list[str] | None = None
    removed_rows: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2:
            raise InvalidInputError("X must be 2-D")
        if self.X.shape[0] == 0:
            raise EmptyDatasetError("dataset has no rows")
        if self.y.shape != (self.X.shape[0],):
            raise InvalidInputError("need exactly one label per row")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise InvalidInputError("dataset contains non-finite values")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def feature_count(self) -> int:
        return self.X.shape[1]

    @property
    def class_values(self) -> np.ndarray:
        return np.unique(self.y)

    def binary_targets(self) -> np.ndarray:
        classes = self.class_values
        if classes.size != 2:
            raise InvalidInputError(f"binary task needs exactly two classes, found {classes.size}")
        return np.where(self.y == classes[1], 1.0, -1.0)

    def subset(self, idx) -> Dataset:
        return Dataset(
            self.X[idx], self.y[idx], self.feature_names, self.provenance, self.class_names, 0, dict(self.meta)
        )
