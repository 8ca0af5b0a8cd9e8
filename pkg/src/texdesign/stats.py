"""Per-feature class-difference testing.

Kruskal-Wallis H test per feature, Benjamini-Hochberg adjustment across
features, significance flag at a fixed level, and box-plot quartile data for
plotting the per-class distributions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.stats

from .texture import FEATURE_NAMES


def _midranks(pooled: np.ndarray) -> np.ndarray:
    """Ranks 1..N with tied values receiving their average rank."""
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(pooled.size, dtype=np.float64)
    s = pooled[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and s[j + 1] == s[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> tuple[float, float]:
    """(H, p) with midrank ties, tie correction, and chi-square p-value.

    All values identical across groups degenerates to (0, 1).
    """
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(arrays) < 2:
        raise ValueError("need at least two groups")
    if any(a.size == 0 for a in arrays):
        raise ValueError("empty group")
    pooled = np.concatenate(arrays)
    n_total = pooled.size
    if n_total < 5:
        raise ValueError("need at least five values overall")
    if np.all(pooled == pooled[0]):
        return 0.0, 1.0

    ranks = _midranks(pooled)
    h = 0.0
    start = 0
    for a in arrays:
        r_mean = ranks[start:start + a.size].mean()
        h += a.size * (r_mean - (n_total + 1) / 2.0) ** 2
        start += a.size
    h *= 12.0 / (n_total * (n_total + 1))

    _, tie_counts = np.unique(pooled, return_counts=True)
    correction = 1.0 - float((tie_counts**3 - tie_counts).sum()) / (n_total**3 - n_total)
    h /= correction
    p = float(scipy.stats.chi2.sf(h, df=len(arrays) - 1))
    return float(h), p


def benjamini_hochberg(pvals: Sequence[float]) -> np.ndarray:
    """Step-up adjusted p-values, returned in the input order."""
    p = np.asarray(pvals, dtype=np.float64)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted_sorted = np.minimum(np.minimum.accumulate(scaled[::-1])[::-1], 1.0)
    adjusted = np.empty(m)
    adjusted[order] = adjusted_sorted
    return adjusted


@dataclass(frozen=True)
class SignificanceRow:
    feature: str
    h_statistic: float
    p_raw: float
    p_adjusted: float
    significant: bool


@dataclass(frozen=True)
class BoxplotRow:
    feature: str
    label: object
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def significance_report(features: np.ndarray, labels: Sequence, alpha: float = 0.05
                        ) -> tuple[list[SignificanceRow], list[BoxplotRow]]:
    """Kruskal-Wallis per feature with BH adjustment across all features.

    Returns one row per feature in FEATURE_NAMES order plus per-class
    box-plot quartiles (whiskers are the min and max).
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    classes = np.unique(y)
    if classes.size != 3:
        raise ValueError(f"expected 3 classes, got {classes.size}")
    if x.shape[1] != len(FEATURE_NAMES):
        raise ValueError(f"expected {len(FEATURE_NAMES)} feature columns")

    results = [kruskal_wallis([x[y == c, f] for c in classes]) for f in range(x.shape[1])]
    raw = [p for _, p in results]
    adjusted = benjamini_hochberg(raw)
    rows = [
        SignificanceRow(
            feature=FEATURE_NAMES[f],
            h_statistic=results[f][0],
            p_raw=raw[f],
            p_adjusted=float(adjusted[f]),
            significant=bool(adjusted[f] < alpha),
        )
        for f in range(x.shape[1])
    ]

    boxes = []
    for f in range(x.shape[1]):
        for c in classes:
            vals = x[y == c, f]
            q1, med, q3 = np.quantile(vals, [0.25, 0.5, 0.75])
            boxes.append(BoxplotRow(
                feature=FEATURE_NAMES[f], label=c.item() if hasattr(c, "item") else c,
                minimum=float(vals.min()), q1=float(q1), median=float(med),
                q3=float(q3), maximum=float(vals.max()),
            ))
    return rows, boxes
