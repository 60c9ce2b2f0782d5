"""Single replicas, voting rules and replica ensembles."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, InvalidInputError
from .kernels import AnchorSet, KernelSpec, data_bounds, design_matrix, sample_anchors
from .numeric import solve_least_squares

TRANSFORMS = ("identity", "sign", "logistic", "tanh", "gaussian_pair")


def replica_seed(master_seed: int, index: int) -> int:
    """Derive the 64-bit seed of replica ``index`` from a master seed."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def threshold(f):
    """-1 where f < 0, +1 where f >= 0 (zero maps to +1)."""
    out = np.where(np.asarray(f) < 0, -1, 1)
    return int(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ReplicaModel:
    spec: KernelSpec
    anchors: AnchorSet | None
    coefficients: np.ndarray
    training_energy: float
    seed: int
    dim: int

    def raw(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise InvalidInputError(f"model expects {self.dim} features, got shape {X.shape}")
        return design_matrix(self.spec, X, self.anchors) @ self.coefficients


def fit_replica(spec: KernelSpec, anchors: AnchorSet | None, X, y, seed: int | None = None) -> ReplicaModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise InvalidInputError("training data must be a nonempty 2-D array")
    if y.shape != (X.shape[0],) or not np.all(np.isfinite(y)):
        raise InvalidInputError("labels must be a finite vector with one entry per row")
    spec = spec.resolved(X.shape[1])
    K = design_matrix(spec, X, anchors)
    sol = solve_least_squares(K, y)
    if seed is None:
        seed = anchors.seed if anchors is not None else 0
    return ReplicaModel(spec, anchors, sol.coefficients, sol.residual_norm_sq, int(seed), X.shape[1])


def predict_raw(model: ReplicaModel, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return float(model.raw(x[None, :])[0])
    return model.raw(x)


def learning_energy(model: ReplicaModel, X, y) -> float:
    resid = model.raw(X) - np.asarray(y, dtype=float)
    return float(resid @ resid)


def rms_energy(model: ReplicaModel, X, y) -> float:
    return learning_energy(model, X, y) / np.asarray(X).shape[0]


@dataclass(frozen=True)
class VotingRule:
    """Per-replica transform applied before the signed vote sum."""

    transform: str = "sign"
    scale: float = 1.0

    def __post_init__(self):
        if self.transform not in TRANSFORMS:
            raise ConfigurationError(f"unknown voting transform {self.transform!r}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ConfigurationError("voting scale must be positive")

    @classmethod
    def parse(cls, text: str) -> VotingRule:
        """Parse ``sign``, ``identity``, ``logistic``, ``tanh:10`` or ``gaussian_pair:100``."""
        name, _, arg = text.partition(":")
        name = name.strip().lower().replace("-", "_")
        if arg:
            return cls(name, float(arg))
        return cls(name)

    def apply(self, f):
        f = np.asarray(f, dtype=float)
        if self.transform == "identity":
            return f
        if self.transform == "sign":
            return np.where(f < 0, -1.0, 1.0)
        if self.transform == "logistic":
            # centred so that F(0) = 0
            return expit(f) - 0.5
        if self.transform == "tanh":
            return np.tanh(self.scale * f)
        s2 = 2.0 * self.scale ** 2
        return np.exp(-((f - 1.0) ** 2) / s2) - np.exp(-((f + 1.0) ** 2) / s2)

    def __str__(self):
        if self.transform in ("tanh", "gaussian_pair"):
            return f"{self.transform}:{self.scale:g}"
        return self.transform


@dataclass(frozen=True)
class KernelGroup:
    name: str
    weight: float
    indices: tuple[int, ...]


@dataclass
class Ensemble:
    replicas: list[ReplicaModel]
    voting: VotingRule = field(default_factory=VotingRule)
    groups: list[KernelGroup] | None = None

    def __post_init__(self):
        if len(self.replicas) < 1:
            raise ConfigurationError("an ensemble needs at least one replica")
        if self.groups:
            validate_weights([g.weight for g in self.groups])
            covered = sorted(i for g in self.groups for i in g.indices)
            if covered != list(range(len(self.replicas))):
                raise ConfigurationError("kernel groups must partition the replicas")
        elif self.voting.transform == "sign" and len(self.replicas) % 2 == 0:
            raise ConfigurationError(
                f"sign voting needs an odd number of replicas, got {len(self.replicas)}"
            )

    def __len__(self):
        return len(self.replicas)

    @property
    def dim(self) -> int:
        return self.replicas[0].dim

    def raw_outputs(self, X) -> np.ndarray:
        """Raw replica outputs, shape (R, n)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.vstack([m.raw(X) for m in self.replicas])

    def vote_scores(self, X) -> np.ndarray:
        return self.voting.apply(self.raw_outputs(X)).sum(axis=0)


def validate_weights(weights) -> None:
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ConfigurationError("layer weights must be non-negative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ConfigurationError(f"layer weights must sum to 1, got {w.sum():.12g}")


def _single_or_batch(x, fn):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return fn(x[None, :])[0].item()
    return fn(x)


def vote(ensemble: Ensemble, x):
    """Binary label of ``x`` (or labels of the rows of ``x``)."""
    return _single_or_batch(x, lambda X: threshold(ensemble.vote_scores(X)))


def layered_scores(ensemble: Ensemble, X) -> np.ndarray:
    if not ensemble.groups:
        raise ConfigurationError("ensemble has no kernel groups")
    raw = ensemble.raw_outputs(X)
    total = np.zeros(raw.shape[1])
    for g in ensemble.groups:
        total += g.weight * raw[list(g.indices)].mean(axis=0)
    return total


def vote_layered(ensemble: Ensemble, x):
    return _single_or_batch(x, lambda X: threshold(layered_scores(ensemble, X)))


def predict_regression(ensemble: Ensemble, x):
    return _single_or_batch(x, lambda X: ensemble.raw_outputs(X).mean(axis=0))


def class_scores(per_class: Sequence[Ensemble], X) -> np.ndarray:
    """Replica-averaged raw scores, shape (n, n_classes)."""
    if len(per_class) < 2:
        raise InvalidInputError("multi-class prediction needs at least two classes")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.column_stack([e.raw_outputs(X).mean(axis=0) for e in per_class])


def predict_multiclass(per_class: Sequence[Ensemble], x):
    # argmax returns the first maximum, i.e. the lowest class index on ties
    return _single_or_batch(x, lambda X: np.argmax(class_scores(per_class, X), axis=1))


def fit_ensemble(
    spec: KernelSpec,
    X,
    y,
    v: int,
    R: int,
    master_seed: int = 0,
    voting: VotingRule | None = None,
    bounds=None,
    workers: int = 1,
    first_index: int = 0,
) -> Ensemble:
    """Fit ``R`` replicas, each with its own anchor draw.

    Replica ``a`` uses the seed ``replica_seed(master_seed, first_index + a)``
    so the result does not depend on ``workers``.
    """
    return Ensemble(
        _fit_replicas(spec, X, y, v, R, master_seed, bounds, workers, first_index),
        voting or VotingRule(),
    )


def _fit_replicas(spec, X, y, v, R, master_seed, bounds, workers, first_index):
    X = np.asarray(X, dtype=float)
    if R < 1:
        raise ConfigurationError("need at least one replica")
    spec = spec.resolved(X.shape[1])
    if bounds is None:
        bounds = data_bounds(X)

    def one(alpha):
        seed = replica_seed(master_seed, first_index + alpha)
        anchors = sample_anchors(seed, v, bounds) if spec.uses_anchors else None
        return fit_replica(spec, anchors, X, y, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(R)))
    return [one(a) for a in range(R)]


def fit_layered(
    layers: Sequence[tuple[KernelSpec, float]],
    X,
    y,
    v: int,
    R: int,
    master_seed: int = 0,
    bounds=None,
    workers: int = 1,
) -> Ensemble:
    """Fit ``R`` replicas per kernel family and combine them with fixed weights."""
    validate_weights([w for _, w in layers])
    replicas: list[ReplicaModel] = []
    groups = []
    for spec, weight in layers:
        start = len(replicas)
        replicas += _fit_replicas(spec, X, y, v, R, master_seed, bounds, workers, start)
        groups.append(KernelGroup(spec.family, float(weight), tuple(range(start, len(replicas)))))
    return Ensemble(replicas, VotingRule("identity"), groups)


def fit_multiclass(spec, X, labels, classes, v, R, master_seed=0, bounds=None, workers=1):
    """One-vs-rest ensembles, one per entry of ``classes``."""
    labels = np.asarray(labels)
    out = []
    for c in classes:
        target = np.where(labels == c, 1.0, -1.0)
        out.append(fit_ensemble(spec, X, target, v, R, master_seed, VotingRule("identity"), bounds, workers))
    return out
