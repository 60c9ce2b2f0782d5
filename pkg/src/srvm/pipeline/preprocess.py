"""Missing-row removal and per-feature scaling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.parsers import drop_missing
from ..errors import ConfigurationError, EmptyDatasetError

SCALING_MODES = ("unit01", "sym11", "znorm")

__all__ = ["SCALING_MODES", "ScalingSpec", "apply_scaling", "drop_missing", "fit_scaling"]


@dataclass(frozen=True)
class ScalingSpec:
    mode: str
    offset: np.ndarray
    span: np.ndarray
    constant: np.ndarray

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        safe = np.where(self.constant, 1.0, self.span)
        Z = (X - self.offset) / safe
        if self.mode == "unit01":
            pass
        elif self.mode == "sym11":
            Z = 2.0 * Z - 1.0
        Z[:, self.constant] = 0.0
        return Z

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "offset": self.offset.tolist(),
            "span": self.span.tolist(),
            "constant": self.constant.tolist(),
        }

    @classmethod
    def from_dict(cls, data) -> ScalingSpec:
        return cls(
            data["mode"],
            np.array(data["offset"], dtype=float),
            np.array(data["span"], dtype=float),
            np.array(data["constant"], dtype=bool),
        )


def fit_scaling(X, mode: str = "sym11") -> ScalingSpec:
    """Learn per-feature scaling parameters from ``X``.

    ``unit01`` and ``sym11`` map the observed min/max onto [0, 1] or
    [-1, 1]; ``znorm`` subtracts the mean and divides by the population
    standard deviation. Constant features always map to 0.
    """
    if mode not in SCALING_MODES:
        raise ConfigurationError(f"unknown scaling mode {mode!r}")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise EmptyDatasetError("cannot fit scaling on an empty matrix")
    if mode == "znorm":
        offset = X.mean(axis=0)
        span = X.std(axis=0)
    else:
        offset = X.min(axis=0)
        span = X.max(axis=0) - offset
    constant = X.max(axis=0) == X.min(axis=0)
    return ScalingSpec(mode, offset, span, constant)


def apply_scaling(spec: ScalingSpec, X) -> np.ndarray:
    return spec.apply(X)
