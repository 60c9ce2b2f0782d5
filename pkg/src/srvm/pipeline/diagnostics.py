from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ..errors import DegenerateInputError, InvalidInputError


@dataclass(frozen=True)
class ResidualReport:
    n: int
    mean: float
    std: float  # population
    skewness: float
    excess_kurtosis: float
    durbin_watson: float
    within_1sd: int
    within_2sd: int
    sorted_residuals: np.ndarray
    normal_quantiles: np.ndarray

    def summary(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "std": self.std,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "durbin_watson": self.durbin_watson,
            "within_1sd": self.within_1sd,
            "within_2sd": self.within_2sd,
        }


def durbin_watson(r) -> float:
    """Durbin-Watson on mean-centred residuals, so a constant offset leaves it unchanged."""
    r = np.asarray(r, dtype=float)
    r = r - r.mean()
    den = float(r @ r)
    if den == 0:
        raise DegenerateInputError("Durbin-Watson is undefined for constant residuals")
    d = np.diff(r)
    return float(d @ d) / den


def regression_diagnostics(residuals) -> ResidualReport:
    """Moments, Durbin-Watson and probability-plot pairs for a residual series.

    The residual order matters for Durbin-Watson only.
    """
    r = np.asarray(residuals, dtype=float)
    if r.ndim != 1 or r.size < 3:
        raise InvalidInputError("need at least 3 residuals")
    if not np.all(np.isfinite(r)):
        raise InvalidInputError("residuals must be finite")
    n = r.size
    mean = float(r.mean())
    dev = r - mean
    std = float(np.sqrt(np.mean(dev ** 2)))
    if std == 0:
        raise DegenerateInputError("residuals have zero variance")
    z = dev / std
    q = ndtri((np.arange(1, n + 1) - 0.5) / n)
    return ResidualReport(
        n=n,
        mean=mean,
        std=std,
        skewness=float(np.mean(z ** 3)),
        excess_kurtosis=float(np.mean(z ** 4) - 3.0),
        durbin_watson=durbin_watson(r),
        within_1sd=int(np.sum(np.abs(dev) <= std)),
        within_2sd=int(np.sum(np.abs(dev) <= 2 * std)),
        sorted_residuals=np.sort(r),
        normal_quantiles=q,
    )
