"""Confusion-table metrics, coefficient of performance, ROC sweep, hypothesis tests."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import betainc, gammaincc
from scipy.stats import rankdata

from .errors import DegenerateInputError, InvalidInputError


@dataclass(frozen=True)
class ConfusionTable:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise InvalidInputError("confusion counts must be non-negative")
        if self.total < 1:
            raise InvalidInputError("confusion table is empty")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return ConfusionTable(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class MetricsReport:
    """Derived metrics; ``None`` marks a metric whose denominator vanished."""

    accuracy: float
    sensitivity: Optional[float]
    specificity: Optional[float]
    precision: Optional[float]
    kappa: Optional[float]
    f1: Optional[float]
    matthews: Optional[float]

    def as_dict(self):
        return asdict(self)


def confusion(y_true, y_pred) -> ConfusionTable:
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape or t.ndim != 1 or t.size == 0:
        raise InvalidInputError(f"label vectors must be 1-D and equal length, got {t.shape} and {p.shape}")
    tpos, ppos = t > 0, p > 0
    return ConfusionTable(
        tp=int(np.sum(tpos & ppos)),
        fp=int(np.sum(~tpos & ppos)),
        fn=int(np.sum(tpos & ~ppos)),
        tn=int(np.sum(~tpos & ~ppos)),
    )


def _ratio(num, den):
    return num / den if den else None


def metrics_report(c: ConfusionTable) -> MetricsReport:
    n = c.total
    sens = _ratio(c.tp, c.tp + c.fn)
    spec = _ratio(c.tn, c.tn + c.fp)
    prec = _ratio(c.tp, c.tp + c.fp)
    f1 = None
    if sens is not None and prec is not None and prec + sens > 0:
        f1 = 2 * prec * sens / (prec + sens)
    p_o = (c.tp + c.tn) / n
    p_e = ((c.tp + c.fp) * (c.tp + c.fn) + (c.fn + c.tn) * (c.fp + c.tn)) / n ** 2
    kappa = _ratio(p_o - p_e, 1 - p_e)
    den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    mcc = (c.tp * c.tn - c.fp * c.fn) / math.sqrt(den) if den else None
    return MetricsReport(p_o, sens, spec, prec, kappa, f1, mcc)


def cop(mean_accuracy: float, runtime_seconds: float) -> float:
    """Coefficient of performance: accuracy per second of runtime."""
    if not runtime_seconds > 0:
        raise InvalidInputError("runtime must be positive")
    return mean_accuracy / runtime_seconds


def roc_sweep(scores, y_true):
    """(threshold, FPR, TPR) triples for every distinct cut of ``scores``.

    A point is predicted positive when its score exceeds the threshold.
    Thresholds run from +inf through the midpoints of consecutive distinct
    scores down to -inf.
    """
    s = np.asarray(scores, dtype=float)
    t = np.asarray(y_true)
    if s.shape != t.shape or s.ndim != 1:
        raise InvalidInputError("scores and labels must be 1-D and equal length")
    pos = t > 0
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise InvalidInputError("ROC needs both classes present")
    distinct = np.unique(s)[::-1]
    cuts = [math.inf] + list((distinct[:-1] + distinct[1:]) / 2.0) + [-math.inf]
    out = []
    for c in cuts:
        pred = s > c
        out.append((c, float(np.sum(pred & ~pos)) / n_neg, float(np.sum(pred & pos)) / n_pos))
    return out


def roc_auc(points) -> float:
    fpr = np.array([p[1] for p in points])
    tpr = np.array([p[2] for p in points])
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


# --- hypothesis tests ---------------------------------------------------------


def _f_sf(f, d1, d2):
    if f <= 0:
        return 1.0
    return float(betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)))


def _chi2_sf(x, k):
    if x <= 0:
        return 1.0
    return float(gammaincc(k / 2.0, x / 2.0))


def _t_two_sided(t, df):
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def _groups(groups, minimum):
    gs = [np.asarray(g, dtype=float) for g in groups]
    if len(gs) < 2:
        raise InvalidInputError("need at least two groups")
    if any(g.ndim != 1 or g.size < minimum for g in gs):
        raise InvalidInputError(f"every group needs at least {minimum} values")
    return gs


def _anova(gs):
    allv = np.concatenate(gs)
    grand = allv.mean()
    k, n = len(gs), allv.size
    between = sum(g.size * (g.mean() - grand) ** 2 for g in gs)
    within = sum(np.sum((g - g.mean()) ** 2) for g in gs)
    if within == 0:
        raise DegenerateInputError("zero within-group variance")
    f = (between / (k - 1)) / (within / (n - k))
    return float(f), _f_sf(f, k - 1, n - k)


def _kruskal(gs):
    allv = np.concatenate(gs)
    n = allv.size
    ranks = rankdata(allv)
    h = 0.0
    start = 0
    for g in gs:
        r = ranks[start : start + g.size]
        h += g.size * (r.mean() - (n + 1) / 2.0) ** 2
        start += g.size
    h *= 12.0 / (n * (n + 1))
    _, counts = np.unique(allv, return_counts=True)
    correction = 1.0 - np.sum(counts ** 3 - counts) / (n ** 3 - n)
    if correction == 0:
        raise DegenerateInputError("all observations are tied")
    h /= correction
    return float(h), _chi2_sf(h, len(gs) - 1)


def _ttest(a, b, equal_var):
    na, nb = a.size, b.size
    va, vb = a.var(ddof=1), b.var(ddof=1)
    diff = a.mean() - b.mean()
    if equal_var:
        df = na + nb - 2
        pooled = ((na - 1) * va + (nb - 1) * vb) / df
        se2 = pooled * (1.0 / na + 1.0 / nb)
    else:
        se2 = va / na + vb / nb
        df = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1)) if se2 else 0.0
    if se2 == 0:
        raise DegenerateInputError("zero pooled variance")
    t = diff / math.sqrt(se2)
    return float(t), _t_two_sided(t, df)


def hypothesis_test(kind: str, groups: Sequence[Sequence[float]], equal_var: bool = True):
    """Return ``(statistic, p_value)`` for one of the supported tests.

    ``kind`` is ``anova_f``, ``kruskal_wallis_h``, ``levene_w`` (absolute
    deviations from group means) or ``t_two_sample`` (pooled variance unless
    ``equal_var=False``, which selects Welch's test).
    """
    if kind == "anova_f":
        return _anova(_groups(groups, 2))
    if kind == "kruskal_wallis_h":
        return _kruskal(_groups(groups, 2))
    if kind == "levene_w":
        gs = _groups(groups, 2)
        return _anova([np.abs(g - g.mean()) for g in gs])
    if kind == "t_two_sample":
        gs = _groups(groups, 2)
        if len(gs) != 2:
            raise InvalidInputError("the t-test takes exactly two groups")
        return _ttest(gs[0], gs[1], equal_var)
    raise InvalidInputError(f"unknown test {kind!r}")
