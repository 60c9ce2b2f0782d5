"""Numerical primitives: least squares, special functions, splines, PCA, line fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp
from scipy.linalg import solve_banded

from .errors import DegenerateInputError, DomainError, InvalidInputError

__all__ = [
    "LeastSquaresSolution",
    "solve_least_squares",
    "special_function",
    "airy_ai",
    "NaturalCubicSpline",
    "fit_natural_cubic_spline",
    "eval_spline",
    "pca_project",
    "fit_line",
]


@dataclass(frozen=True)
class LeastSquaresSolution:
    coefficients: np.ndarray
    residual_norm_sq: float
    effective_rank: int


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise InvalidInputError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix contains non-finite entries")
    return A


def solve_least_squares(A, y) -> LeastSquaresSolution:
    """Minimal-norm least-squares solution of ``A c = y``.

    Singular values below ``eps * max(rows, cols) * s_max`` are discarded, so
    rank-deficient and underdetermined systems return the pseudo-inverse
    solution.
    """
    A = _as_matrix(A)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != A.shape[0]:
        raise InvalidInputError(f"right-hand side has shape {y.shape}, expected ({A.shape[0]},)")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("right-hand side contains non-finite entries")

    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cutoff = np.finfo(float).eps * max(A.shape) * (s[0] if s.size else 0.0)
    keep = s > cutoff
    rank = int(np.count_nonzero(keep))
    proj = U[:, keep].T @ y
    coef = Vt[keep].T @ (proj / s[keep])
    resid = A @ coef - y
    return LeastSquaresSolution(coef, float(resid @ resid), rank)


# --- special functions -------------------------------------------------------

_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
_AIP0 = 1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))
_SERIES_LIMIT = 8.0


def _airy_series(x: np.ndarray) -> np.ndarray:
    x3 = x ** 3
    f_term = np.ones_like(x)
    g_term = x.copy()
    f_sum = f_term.copy()
    g_sum = g_term.copy()
    for k in range(1, 200):
        f_term = f_term * x3 / ((3 * k - 1) * (3 * k))
        g_term = g_term * x3 / ((3 * k) * (3 * k + 1))
        f_sum += f_term
        g_sum += g_term
        if np.all(np.abs(f_term) <= 1e-17 * np.abs(f_sum)) and np.all(
            np.abs(g_term) <= 1e-17 * np.maximum(np.abs(g_sum), 1e-300)
        ):
            break
    return _AI0 * f_sum - _AIP0 * g_sum


def _airy_asymptotic(x: np.ndarray) -> np.ndarray:
    zeta = (2.0 / 3.0) * x ** 1.5
    total = np.ones_like(x)
    u = 1.0
    power = np.ones_like(x)
    for k in range(1, 12):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        power = power * (-1.0 / zeta)
        total += u * power
    return np.exp(-zeta) / (2.0 * math.sqrt(math.pi) * x ** 0.25) * total


def airy_ai(x):
    """Airy function Ai on the non-negative axis (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("airy_ai is only defined here for finite x >= 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_LIMIT
    if np.any(small):
        out[small] = _airy_series(flat[small])
    if np.any(~small):
        out[~small] = _airy_asymptotic(flat[~small])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def special_function(kind: str, x):
    if kind == "erfc":
        val = _sp.erfc(np.asarray(x, dtype=float))
        return float(val) if np.ndim(val) == 0 else val
    if kind == "airy_ai":
        return airy_ai(x)
    raise InvalidInputError(f"unknown special function {kind!r}")


# --- natural cubic spline ----------------------------------------------------


class NaturalCubicSpline:
    """Interpolating cubic spline with zero second derivative at both ends.

    Outside the knot range the polynomial of the boundary segment is
    continued.
    """

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise InvalidInputError("knot abscissae and ordinates must be 1-D and equal length")
        if x.size < 3:
            raise InvalidInputError("a natural cubic spline needs at least 3 knots")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidInputError("knots must be finite")
        h = np.diff(x)
        if np.any(h <= 0):
            raise InvalidInputError("knot abscissae must be strictly increasing")
        self.x = x
        self.y = y
        self.second = self._second_derivatives(x, y, h)

    @staticmethod
    def _second_derivatives(x, y, h):
        n = x.size
        m = np.zeros(n)
        if n == 3:
            rhs = 6.0 * ((y[2] - y[1]) / h[1] - (y[1] - y[0]) / h[0])
            m[1] = rhs / (2.0 * (h[0] + h[1]))
            return m
        ab = np.zeros((3, n - 2))
        ab[0, 1:] = h[1:-1]
        ab[1, :] = 2.0 * (h[:-1] + h[1:])
        ab[2, :-1] = h[1:-1]
        slopes = np.diff(y) / h
        rhs = 6.0 * np.diff(slopes)
        m[1:-1] = solve_banded((1, 1), ab, rhs)
        return m

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        tt = np.atleast_1d(t_arr)
        x, y, m = self.x, self.y, self.second
        i = np.clip(np.searchsorted(x, tt, side="right") - 1, 0, x.size - 2)
        h = x[i + 1] - x[i]
        a = (x[i + 1] - tt) / h
        b = (tt - x[i]) / h
        val = (
            a * y[i]
            + b * y[i + 1]
            + ((a ** 3 - a) * m[i] + (b ** 3 - b) * m[i + 1]) * h ** 2 / 6.0
        )
        return float(val[0]) if t_arr.ndim == 0 else val

    def derivative2(self, t):
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        x, m = self.x, self.second
        i = np.clip(np.searchsorted(x, tt, side="right") - 1, 0, x.size - 2)
        h = x[i + 1] - x[i]
        return ((x[i + 1] - tt) * m[i] + (tt - x[i]) * m[i + 1]) / h


def fit_natural_cubic_spline(knots) -> NaturalCubicSpline:
    pts = np.asarray(knots, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidInputError("knots must be a sequence of (x, y) pairs")
    return NaturalCubicSpline(pts[:, 0], pts[:, 1])


def eval_spline(spline: NaturalCubicSpline, x):
    return spline(x)


# --- PCA and line fit --------------------------------------------------------


def pca_project(X, k: int):
    """Project centered data onto the top-``k`` covariance eigenvectors.

    Returns ``(scores, explained_variance, components)``; component columns
    have their largest-magnitude entry made positive.
    """
    X = _as_matrix(X)
    n, d = X.shape
    if n < 2:
        raise InvalidInputError("PCA needs at least two rows")
    if not 1 <= k <= d:
        raise InvalidInputError(f"k must lie in [1, {d}], got {k}")
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / (n - 1)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    vecs = vecs[:, order]
    lead = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(d)]
    vecs = vecs * np.where(lead < 0, -1.0, 1.0)
    comps = vecs[:, :k]
    return Xc @ comps, vals[:k], comps


def fit_line(points):
    """Ordinary least-squares ``(slope, intercept)`` through ``(x, y)`` pairs."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise DegenerateInputError("need at least two (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0.0:
        raise DegenerateInputError("all x values are identical")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    return slope, float(ym - slope * xm)
