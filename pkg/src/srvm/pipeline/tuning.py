"""Pick v by regressing a scan signal (overlap or accuracy) and maximizing the fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from ..errors import InvalidInputError
from ..kernels import KernelSpec, design_matrix, sample_anchors
from ..numeric import NaturalCubicSpline, solve_least_squares
from ..replica import replica_seed

METHODS = ("spline", "srvm_regression")


@dataclass(frozen=True)
class TuneResult:
    v: int
    grid: np.ndarray
    curve: np.ndarray
    method: str


def _constrained_lstsq(A, y, C, d):
    """min |A c - y| subject to C c = d, via the nullspace of C."""
    c0 = solve_least_squares(C, d).coefficients
    N = null_space(C)
    if N.shape[1] == 0:
        return c0
    z = solve_least_squares(A @ N, y - A @ c0).coefficients
    c = c0 + N @ z
    # one refinement step restores C c = d lost to cancellation in a large N z
    return c + solve_least_squares(C, d - C @ c).coefficients


def _srvm_curve(v, s, grid, n_anchors, R, seed, width):
    lo, hi = v[0], v[-1]
    to_unit = lambda t: (2.0 * (np.asarray(t, dtype=float) - lo) / (hi - lo) - 1.0)[:, None]
    X, G = to_unit(v), to_unit(grid)
    spec = KernelSpec.gaussian(width)
    bounds = np.array([[-1.0, 1.0]])
    ends = [0, len(v) - 1]
    curve = np.zeros(len(grid))
    for alpha in range(R):
        anchors = sample_anchors(replica_seed(seed, alpha), n_anchors, bounds)
        K = design_matrix(spec, X, anchors)
        c = _constrained_lstsq(K, s, K[ends], s[ends])
        curve += design_matrix(spec, G, anchors) @ c
    return curve / R


def recursive_tune(
    scan, method: str = "spline", n_anchors: int = 10, R: int = 31, seed: int = 0, width: float = 0.4
) -> TuneResult:
    """Suggest the v that maximizes a smooth fit of ``scan`` = [(v, signal), ...].

    The fit is evaluated on every integer v between the smallest and largest
    scanned values. Both end points are always matched: the spline
    interpolates all points, and the SRVM regressor is fitted under equality
    constraints at the two ends (met up to round-off, ~1e-6 for this
    ill-conditioned basis). The regressor works on v mapped to [-1, 1]
    with a gaussian of the given ``width``.
    """
    if method not in METHODS:
        raise InvalidInputError(f"unknown tuning method {method!r}")
    pts = sorted((float(a), float(b)) for a, b in scan)
    if len(pts) < 4:
        raise InvalidInputError(f"tuning needs at least 4 scan points, got {len(pts)}")
    v = np.array([p[0] for p in pts])
    s = np.array([p[1] for p in pts])
    if np.any(np.diff(v) <= 0):
        raise InvalidInputError("scan v values must be distinct")
    grid = np.arange(int(np.ceil(v[0])), int(np.floor(v[-1])) + 1, dtype=float)
    if method == "spline":
        curve = NaturalCubicSpline(v, s)(grid)
    else:
        curve = _srvm_curve(v, s, grid, n_anchors, R, seed, width)
    best = int(grid[int(np.argmax(curve))])
    return TuneResult(best, grid, np.asarray(curve), method)
