"""Kernel families, multinomial expansion, anchor sampling and design matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import erfc, expit

from .errors import CapacityError, InvalidInputError
from .numeric import airy_ai

RADIAL_FAMILIES = ("gaussian", "exponential", "erfc", "airy", "fermi")
FAMILIES = RADIAL_FAMILIES + ("multinomial", "per_feature")
MULTINOMIAL_CAP = 20_000


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its shape parameter.

    ``width`` is sigma, xi, gamma, a or q depending on ``family``. A gaussian
    with ``width=None`` means sigma = sqrt(d), fixed by :meth:`resolved` once
    the feature count is known.
    """

    family: str
    width: float | None = 1.0
    degrees: tuple[int, ...] | None = None
    inner: KernelSpec | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown kernel family {self.family!r}")
        if self.family in RADIAL_FAMILIES:
            if self.width is not None and not (math.isfinite(self.width) and self.width > 0):
                raise InvalidInputError(f"{self.family} parameter must be positive, got {self.width}")
        elif self.family == "multinomial":
            if self.degrees is None or any(int(n) != n or n < 0 for n in self.degrees):
                raise InvalidInputError("multinomial degrees must be non-negative integers")
            object.__setattr__(self, "degrees", tuple(int(n) for n in self.degrees))
        else:
            if self.inner is None or self.inner.family not in RADIAL_FAMILIES:
                raise InvalidInputError("per_feature wraps a radial kernel only")

    # convenience constructors
    @classmethod
    def gaussian(cls, sigma=None):
        return cls("gaussian", sigma)

    @classmethod
    def exponential(cls, xi=1.0):
        return cls("exponential", xi)

    @classmethod
    def erfc(cls, gamma=1.0):
        return cls("erfc", gamma)

    @classmethod
    def airy(cls, a=1.0):
        return cls("airy", a)

    @classmethod
    def fermi(cls, q=1.0):
        return cls("fermi", q)

    @classmethod
    def multinomial(cls, degrees):
        return cls("multinomial", None, tuple(degrees))

    @classmethod
    def per_feature(cls, inner):
        return cls("per_feature", None, inner=inner)

    @property
    def is_radial(self) -> bool:
        return self.family in RADIAL_FAMILIES

    @property
    def uses_anchors(self) -> bool:
        return self.family != "multinomial"

    def resolved(self, d: int) -> KernelSpec:
        """Fill in data-dependent defaults for a ``d``-feature problem."""
        if self.family in RADIAL_FAMILIES and self.width is None:
            return KernelSpec(self.family, math.sqrt(d) if self.family == "gaussian" else 1.0)
        if self.family == "per_feature" and self.inner.width is None:
            # each block sees a single feature
            return KernelSpec.per_feature(self.inner.resolved(1))
        if self.family == "multinomial" and len(self.degrees) == 1 and d > 1:
            return KernelSpec.multinomial(self.degrees * d)
        return self

    def n_columns(self, d: int, v: int) -> int:
        if self.family == "multinomial":
            return int(np.prod([n + 1 for n in self.resolved(d).degrees]))
        if self.family == "per_feature":
            return d * v
        return v

    def profile(self, dist, dist_sq=None):
        """Kernel value as a function of the Euclidean distance."""
        w = self.width
        if self.family == "gaussian":
            if dist_sq is None:
                dist_sq = np.square(dist)
            return np.exp(-dist_sq / (2.0 * w * w))
        if self.family == "exponential":
            return np.exp(-dist / w)
        if self.family == "erfc":
            return erfc(dist / w)
        if self.family == "airy":
            return airy_ai(w * dist)
        if self.family == "fermi":
            return expit(-w * dist)
        raise InvalidInputError(f"{self.family} is not a radial kernel")

    def to_dict(self) -> dict:
        out = {"family": self.family}
        if self.family in RADIAL_FAMILIES:
            out["width"] = self.width
        elif self.family == "multinomial":
            out["degrees"] = list(self.degrees)
        else:
            out["inner"] = self.inner.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> KernelSpec:
        family = data["family"]
        if family == "multinomial":
            return cls.multinomial(data["degrees"])
        if family == "per_feature":
            return cls.per_feature(cls.from_dict(data["inner"]))
        return cls(family, data.get("width"))

    def label(self) -> str:
        if self.family == "multinomial":
            return "multinomial(" + ",".join(map(str, self.degrees)) + ")"
        if self.family == "per_feature":
            return f"per_feature({self.inner.label()})"
        return f"{self.family}({self.width})"


@dataclass(frozen=True)
class AnchorSet:
    anchors: np.ndarray
    seed: int
    bounds: np.ndarray = field(repr=False)

    def __len__(self):
        return self.anchors.shape[0]

    @property
    def dim(self) -> int:
        return self.anchors.shape[1]


def _vector(x, name="x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D vector")
    return x


def eval_kernel(spec: KernelSpec, x, chi) -> float:
    x = _vector(x)
    chi = _vector(chi, "chi")
    if x.shape != chi.shape:
        raise InvalidInputError(f"dimension mismatch: {x.shape[0]} vs {chi.shape[0]}")
    if not spec.is_radial:
        raise InvalidInputError("eval_kernel handles radial families only")
    spec = spec.resolved(x.shape[0])
    sq = float(np.sum((x - chi) ** 2))
    return float(spec.profile(math.sqrt(sq), sq))


def expand_multinomial(degrees, x, cap: int = MULTINOMIAL_CAP) -> np.ndarray:
    """All monomials prod_k x_k**m_k with 0 <= m_k <= n_k, last feature fastest."""
    x = _vector(x)
    return multinomial_features(degrees, x[None, :], cap)[0]


def multinomial_features(degrees, X, cap: int = MULTINOMIAL_CAP) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    degrees = [int(n) for n in degrees]
    if X.ndim != 2 or X.shape[1] != len(degrees):
        raise InvalidInputError(f"expected {len(degrees)} features, got shape {X.shape}")
    required = int(np.prod([n + 1 for n in degrees]))
    if required > cap:
        raise CapacityError(required, cap)
    n = X.shape[0]
    out = np.ones((n, 1))
    for k, deg in enumerate(degrees):
        powers = X[:, k : k + 1] ** np.arange(deg + 1)
        out = (out[:, :, None] * powers[:, None, :]).reshape(n, -1)
    return out


def data_bounds(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.column_stack([X.min(axis=0), X.max(axis=0)])


def sample_anchors(rng_seed: int, v: int, bounds) -> AnchorSet:
    """Draw ``v`` anchors uniformly from the per-feature box ``bounds``.

    Anchors for a larger ``v`` with the same seed extend those for a smaller
    one, which keeps anchor sets nested across a scan.
    """
    if v < 1:
        raise InvalidInputError("need at least one anchor")
    bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
    if np.any(bounds[:, 0] > bounds[:, 1]):
        raise InvalidInputError("every bound must satisfy min <= max")
    rng = np.random.default_rng(rng_seed)
    u = rng.random((v, bounds.shape[0]))
    anchors = bounds[:, 0] + u * (bounds[:, 1] - bounds[:, 0])
    return AnchorSet(anchors, int(rng_seed), bounds)


def design_matrix(spec: KernelSpec, X, anchors: AnchorSet | None = None, cap: int = MULTINOMIAL_CAP):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidInputError("data must be a 2-D array")
    spec = spec.resolved(X.shape[1])
    if spec.family == "multinomial":
        return multinomial_features(spec.degrees, X, cap)
    if anchors is None:
        raise InvalidInputError(f"{spec.family} kernel needs anchors")
    chi = anchors.anchors
    if chi.shape[1] != X.shape[1]:
        raise InvalidInputError(f"dimension mismatch: data {X.shape[1]}, anchors {chi.shape[1]}")
    if spec.family == "per_feature":
        blocks = []
        for l in range(X.shape[1]):
            dist = np.abs(X[:, l : l + 1] - chi[None, :, l])
            blocks.append(spec.inner.profile(dist, dist * dist))
        return np.hstack(blocks)
    sq = cdist(X, chi, "sqeuclidean")
    return spec.profile(np.sqrt(sq), sq)
