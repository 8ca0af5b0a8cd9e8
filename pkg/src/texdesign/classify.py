"""Support vector machines (linear / RBF kernels) and a CART decision tree.

The SVM solves the dual soft-margin problem with sequential minimal
optimization using maximal-violating-pair working-set selection, one machine
per unordered class pair, majority vote across machines.  The tree is plain
greedy CART with no pruning or feature subsampling; only the impurity
criterion and maximum depth are exposed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Union

import numpy as np

KERNELS = ("linear", "rbf")
DT_CRITERIA = ("gini", "entropy", "log loss")

_SMO_TOL = 1e-3
_SMO_MAX_ITER = 100_000


# ---------------------------------------------------------------------------
# kernels


def kernel_matrix(kernel: str, x: np.ndarray, z: np.ndarray,
                  gamma: Optional[float] = None) -> np.ndarray:
    """K[i, j] = k(x_i, z_j) for the linear or RBF kernel."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if kernel == "linear":
        return x @ z.T
    if kernel == "rbf":
        if gamma is None:
            raise ValueError("rbf kernel requires gamma")
        sq = (x * x).sum(axis=1)[:, None] + (z * z).sum(axis=1)[None, :] - 2.0 * (x @ z.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kernel!r}")


# ---------------------------------------------------------------------------
# binary SMO


def _smo_solve(k: np.ndarray, y: np.ndarray, c: float,
               tol: float = _SMO_TOL, max_iter: int = _SMO_MAX_ITER
               ) -> tuple[np.ndarray, float]:
    """Solve min 1/2 a'Qa - e'a s.t. 0 <= a <= C, y'a = 0, Q = yy' * K.

    Working pair per iteration: the most violating (i, j) by first-order
    criterion.  Returns (alpha, bias) where the decision function is
    f(x) = sum_s alpha_s y_s k(x_s, x) + bias.
    """
    n = y.size
    alpha = np.zeros(n)
    grad = -np.ones(n)  # d/da of the dual objective at alpha = 0
    minus_yg = np.empty(n)
    pos = y > 0

    for _ in range(max_iter):
        np.multiply(-y, grad, out=minus_yg)
        up = (pos & (alpha < c)) | (~pos & (alpha > 0.0))
        low = (pos & (alpha > 0.0)) | (~pos & (alpha < c))
        up_vals = np.where(up, minus_yg, -np.inf)
        low_vals = np.where(low, minus_yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m_up = up_vals[i]
        m_low = low_vals[j]
        if m_up - m_low <= tol:
            break
        a = k[i, i] + k[j, j] - 2.0 * k[i, j]
        step = (m_up - m_low) / max(a, 1e-12)
        # largest feasible step keeping both coefficients inside [0, C]
        step = min(step,
                   c - alpha[i] if y[i] > 0 else alpha[i],
                   alpha[j] if y[j] > 0 else c - alpha[j])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        grad += y * step * (k[:, i] - k[:, j])

    np.multiply(-y, grad, out=minus_yg)
    up = (pos & (alpha < c)) | (~pos & (alpha > 0.0))
    low = (pos & (alpha > 0.0)) | (~pos & (alpha < c))
    m_up = float(np.max(np.where(up, minus_yg, -np.inf)))
    m_low = float(np.min(np.where(low, minus_yg, np.inf)))
    bias = (m_up + m_low) / 2.0
    if not np.isfinite(bias):
        bias = 0.0
    return alpha, bias


@dataclass(frozen=True)
class PairwiseMachine:
    """One binary machine; +1 is class_a (the lower class position), -1 class_b."""

    class_a: int  # positions into SvmModel.classes
    class_b: int
    support_vectors: np.ndarray  # (n_sv, d)
    coef: np.ndarray  # alpha_s * y_s for each support vector
    bias: float


@dataclass(frozen=True)
class SvmModel:
    kernel: str
    c: float
    gamma: Optional[float]
    classes: np.ndarray
    n_features: int
    machines: tuple[PairwiseMachine, ...]


def train_svm(x: np.ndarray, y: np.ndarray, kernel: str, c: float,
              gamma: Optional[float] = None) -> SvmModel:
    """One-vs-one SVM trained by SMO (KKT tolerance 1e-3)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if kernel not in KERNELS:
        raise ValueError(f"kernel must be one of {KERNELS}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite feature values")
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("need at least two classes")

    machines = []
    for pos_a, pos_b in combinations(range(classes.size), 2):
        mask = (y == classes[pos_a]) | (y == classes[pos_b])
        xs = x[mask]
        ys = np.where(y[mask] == classes[pos_a], 1.0, -1.0)
        k = kernel_matrix(kernel, xs, xs, gamma)
        alpha, bias = _smo_solve(k, ys, c)
        sv = alpha > 0.0
        machines.append(PairwiseMachine(
            class_a=pos_a, class_b=pos_b,
            support_vectors=xs[sv].copy(),
            coef=(alpha[sv] * ys[sv]),
            bias=bias,
        ))
    return SvmModel(kernel=kernel, c=c, gamma=gamma, classes=classes,
                    n_features=x.shape[1], machines=tuple(machines))


def svm_decision_values(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """(n_samples, n_machines) decision values f(x) per pairwise machine."""
    x = np.asarray(x, dtype=np.float64)
    cols = []
    for machine in model.machines:
        if machine.support_vectors.shape[0] == 0:
            cols.append(np.full(x.shape[0], machine.bias))
            continue
        k = kernel_matrix(model.kernel, x, machine.support_vectors, model.gamma)
        cols.append(k @ machine.coef + machine.bias)
    return np.column_stack(cols)


def predict_svm(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """Majority vote over pairwise machines; ties go to the lowest class."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[1] != model.n_features:
        raise ValueError("feature dimension mismatch")
    decis = svm_decision_values(model, x)
    votes = np.zeros((x.shape[0], model.classes.size), dtype=np.int64)
    for col, machine in enumerate(model.machines):
        wins_a = decis[:, col] >= 0.0  # exact tie favors the lower class
        votes[wins_a, machine.class_a] += 1
        votes[~wins_a, machine.class_b] += 1
    return model.classes[np.argmax(votes, axis=1)]


# ---------------------------------------------------------------------------
# decision tree


@dataclass(frozen=True)
class TreeLeaf:
    class_pos: int  # position into DtModel.classes


@dataclass(frozen=True)
class TreeSplit:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[TreeLeaf, TreeSplit]


@dataclass(frozen=True)
class DtModel:
    criterion: str
    max_depth: int
    n_features: int
    classes: np.ndarray
    root: TreeNode


def _impurity_rows(counts: np.ndarray, criterion: str) -> np.ndarray:
    """Impurity of each row of class counts."""
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=-1, keepdims=True)
    p = counts / totals
    if criterion == "gini":
        return 1.0 - (p * p).sum(axis=-1)
    # entropy and log loss are the same Shannon-entropy impurity
    logp = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -(p * logp).sum(axis=-1)


def _best_split(x: np.ndarray, codes: np.ndarray, n_classes: int,
                criterion: str) -> Optional[tuple[int, float]]:
    """(feature, threshold) with maximal impurity decrease, or None.

    Ties keep the lower feature index, then the lower threshold.
    """
    n = codes.size
    parent_counts = np.bincount(codes, minlength=n_classes)
    parent_imp = float(_impurity_rows(parent_counts, criterion))
    best_gain = -np.inf
    best: Optional[tuple[int, float]] = None
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        sv = x[order, f]
        sc = codes[order]
        cuts = np.flatnonzero(sv[1:] > sv[:-1]) + 1  # sizes of the left group
        if cuts.size == 0:
            continue
        prefix = np.cumsum(sc[:, None] == np.arange(n_classes)[None, :], axis=0)
        left = prefix[cuts - 1]
        right = parent_counts[None, :] - left
        weighted = (cuts * _impurity_rows(left, criterion)
                    + (n - cuts) * _impurity_rows(right, criterion)) / n
        gains = parent_imp - weighted
        k = int(np.argmax(gains))  # first max = lowest threshold
        if gains[k] > best_gain:
            best_gain = float(gains[k])
            cut = cuts[k]
            best = (f, float((sv[cut - 1] + sv[cut]) / 2.0))
    return best


def _grow(x: np.ndarray, codes: np.ndarray, n_classes: int, depth: int,
          max_depth: int, criterion: str) -> TreeNode:
    counts = np.bincount(codes, minlength=n_classes)
    majority = int(np.argmax(counts))  # tie keeps the lowest class
    if depth >= max_depth or np.count_nonzero(counts) <= 1:
        return TreeLeaf(class_pos=majority)
    found = _best_split(x, codes, n_classes, criterion)
    if found is None:  # impure but indistinguishable rows
        return TreeLeaf(class_pos=majority)
    feature, threshold = found
    go_left = x[:, feature] <= threshold
    return TreeSplit(
        feature=feature,
        threshold=threshold,
        left=_grow(x[go_left], codes[go_left], n_classes, depth + 1, max_depth, criterion),
        right=_grow(x[~go_left], codes[~go_left], n_classes, depth + 1, max_depth, criterion),
    )


def train_dt(x: np.ndarray, y: np.ndarray, criterion: str, max_depth: int) -> DtModel:
    """Greedy CART; splits whenever a node is impure and depth allows."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if criterion not in DT_CRITERIA:
        raise ValueError(f"criterion must be one of {DT_CRITERIA}")
    if not 1 <= max_depth <= 5:
        raise ValueError("max_depth must be in [1, 5]")
    if x.size == 0:
        raise ValueError("empty training data")
    classes, codes = np.unique(y, return_inverse=True)
    root = _grow(x, codes, classes.size, 0, max_depth, criterion)
    return DtModel(criterion=criterion, max_depth=max_depth,
                   n_features=x.shape[1], classes=classes, root=root)


def predict_dt(model: DtModel, x: np.ndarray) -> np.ndarray:
    """Route rows down the tree; a value equal to the threshold goes left."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[1] != model.n_features:
        raise ValueError("feature dimension mismatch")
    out = np.empty(x.shape[0], dtype=np.int64)
    for r in range(x.shape[0]):
        node = model.root
        while isinstance(node, TreeSplit):
            node = node.left if x[r, node.feature] <= node.threshold else node.right
        out[r] = node.class_pos
    return model.classes[out]
