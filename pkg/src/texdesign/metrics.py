"""Confusion matrices and the macro-average F1-score."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[i, j] = number of samples with true class i predicted as class j."""

    classes: tuple
    counts: np.ndarray


def confusion(y_true: Sequence, y_pred: Sequence, classes: Sequence) -> ConfusionMatrix:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred differ in length")
    classes = tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true.tolist(), y_pred.tolist()):
        if t not in pos or p not in pos:
            raise ValueError(f"label outside the class list: {t!r} / {p!r}")
        counts[pos[t], pos[p]] += 1
    return ConfusionMatrix(classes=classes, counts=counts)


def macro_f1(y_true: Sequence, y_pred: Sequence, classes: Sequence) -> float:
    """Unweighted mean over classes of F1 = 2PR/(P+R); any 0/0 counts as 0."""
    cm = confusion(y_true, y_pred, classes)
    if cm.counts.sum() == 0:
        raise ValueError("empty input")
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    fp = counts.sum(axis=0) - tp
    fn = counts.sum(axis=1) - tp
    f1s = []
    for k in range(len(cm.classes)):
        precision = tp[k] / (tp[k] + fp[k]) if tp[k] + fp[k] > 0 else 0.0
        recall = tp[k] / (tp[k] + fn[k]) if tp[k] + fn[k] > 0 else 0.0
        f1s.append(2 * precision * recall / (precision + recall)
                   if precision + recall > 0 else 0.0)
    return float(np.mean(f1s))
