"""Detection metrics."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass
class MetricSet:
    roc_auc: float
    precision: float
    f1: float
    sensitivity: float
    specificity: float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        keys = list(asdict(self))
        return ",".join(keys) + "\n" + ",".join(repr(float(getattr(self, k))) for k in keys) + "\n"


def roc_auc(scores, labels) -> float:
    """Probability a positive outscores a negative, ties counted as 1/2."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs both positive and negative labels")
    ranks = rankdata(s)
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _ratio(num, den):
    return num / den if den > 0 else 0.0


def confusion(flags, labels):
    p = np.asarray(flags).astype(bool)
    y = np.asarray(labels).astype(bool)
    if p.shape != y.shape:
        raise ValueError("flags and labels differ in length")
    tp = int((p & y).sum())
    fp = int((p & ~y).sum())
    fn = int((~p & y).sum())
    tn = int((~p & ~y).sum())
    return tp, fp, fn, tn


def classification_metrics(flags, labels, scores=None) -> MetricSet:
    """Precision, F1, sensitivity and specificity of binary flags.

    Undefined ratios are reported as 0. ``roc_auc`` is filled from
    ``scores`` when given and both classes are present, else NaN.
    """
    tp, fp, fn, tn = confusion(flags, labels)
    precision = _ratio(tp, tp + fp)
    sens = _ratio(tp, tp + fn)
    spec = _ratio(tn, tn + fp)
    f1 = _ratio(2 * precision * sens, precision + sens)
    auc = float("nan")
    if scores is not None:
        y = np.asarray(labels).astype(bool)
        if 0 < y.sum() < y.size:
            auc = roc_auc(scores, labels)
    return MetricSet(auc, precision, f1, sens, spec)
