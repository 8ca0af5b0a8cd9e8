"""Feature standardization and class-separability feature selection.

Both transforms are fitted on training data only and replayed on held-out
data, so their fitted state is explicit and serializable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

# Score assigned when a class pair separates with zero within-class variance.
_INFINITE_SCORE = 1e12


@dataclass(frozen=True)
class RobustScaler:
    """Per-feature (x - median) / IQR standardization.

    Quantiles use linear interpolation; an IQR of zero falls back to a unit
    denominator so constant features pass through centered.
    """

    median: np.ndarray
    iqr: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "RobustScaler":
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] == 0:
            raise ValueError("expected a non-empty 2-d sample matrix")
        median = np.median(x, axis=0)
        q1, q3 = np.quantile(x, [0.25, 0.75], axis=0)
        iqr = q3 - q1
        iqr = np.where(iqr == 0.0, 1.0, iqr)
        return cls(median=median, iqr=iqr)

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (x - self.median) / self.iqr


def pairwise_separation_score(a: np.ndarray, b: np.ndarray) -> float:
    """Mean-separation to within-class-variance ratio for one feature.

    score = (|mu_a - mu| + |mu_b - mu|) / (var_a + var_b), with mu the mean
    of the pooled samples and population variances.  Perfect separation
    (zero variance in both groups, distinct means) maps to a large finite
    sentinel; two identical constant groups score 0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mu = np.concatenate([a, b]).mean()
    num = abs(a.mean() - mu) + abs(b.mean() - mu)
    den = a.var() + b.var()
    if den == 0.0:
        return _INFINITE_SCORE if num > 0.0 else 0.0
    return num / den


@dataclass(frozen=True)
class FeatureSelector:
    """Round-robin top features across the three class-pair rankings."""

    indices: tuple[int, ...]

    @classmethod
    def fit(cls, x: np.ndarray, y: np.ndarray, target_count: int) -> "FeatureSelector":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y)
        classes = np.unique(y)
        if classes.size != 3:
            raise ValueError(f"feature selection expects 3 classes, got {classes.size}")
        n_features = x.shape[1]
        if not 2 <= target_count <= n_features - 1:
            raise ValueError(f"target_count must be in [2, {n_features - 1}]")

        # Per class pair, features ordered by descending score (ties keep the
        # lower feature index first).
        rankings = []
        for ca, cb in combinations(classes, 2):
            xa, xb = x[y == ca], x[y == cb]
            scores = np.array(
                [pairwise_separation_score(xa[:, f], xb[:, f]) for f in range(n_features)]
            )
            rankings.append(list(np.argsort(-scores, kind="stable")))

        selected: list[int] = []
        chosen = np.zeros(n_features, dtype=bool)
        while len(selected) < target_count:
            for ranking in rankings:
                while ranking and chosen[ranking[0]]:
                    ranking.pop(0)
                if ranking and len(selected) < target_count:
                    f = ranking.pop(0)
                    chosen[f] = True
                    selected.append(int(f))
        return cls(indices=tuple(sorted(selected)))

    def transform(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[:, list(self.indices)]
