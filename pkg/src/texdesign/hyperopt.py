"""Sequential model-based hyperparameter search over a mixed space.

The sampler is a tree-structured Parzen estimator: after a uniform startup
phase the history is split at the top-25% objective quantile, one density is
fitted to the good trials and one to the rest, and the suggestion is the
best good-to-bad density ratio among 24 candidates drawn from the good
density.  Constants (10 startup trials, 25% split, 24 candidates) are fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .designs import ModelVector
from .classify import DT_CRITERIA
from .imageio import ALLOWED_LEVELS

_N_STARTUP = 10
_GOOD_FRACTION = 0.25
_N_CANDIDATES = 24


@dataclass(frozen=True)
class CategoricalDim:
    name: str
    choices: tuple

    def __post_init__(self) -> None:
        if len(self.choices) == 0:
            raise ValueError(f"{self.name}: empty choice set")


@dataclass(frozen=True)
class IntDim:
    name: str
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"{self.name}: empty range")


@dataclass(frozen=True)
class FloatDim:
    name: str
    lo: float
    hi: float
    log: bool = False

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"{self.name}: empty range")
        if self.log and self.lo <= 0:
            raise ValueError(f"{self.name}: log-uniform range needs positive bounds")


Dimension = Union[CategoricalDim, IntDim, FloatDim]


@dataclass(frozen=True)
class SearchSpace:
    dims: tuple[Dimension, ...]

    def __post_init__(self) -> None:
        if len(self.dims) == 0:
            raise ValueError("empty search space")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ValueError("duplicate dimension names")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def contains(self, params: dict) -> bool:
        for d in self.dims:
            v = params[d.name]
            if isinstance(d, CategoricalDim):
                if v not in d.choices:
                    return False
            elif isinstance(d, IntDim):
                if not (isinstance(v, (int, np.integer)) and d.lo <= v <= d.hi):
                    return False
            else:
                if not d.lo <= v <= d.hi:
                    return False
        return True


@dataclass(frozen=True)
class TrialRecord:
    index: int
    params: dict
    objective: float


def build_space(design: ModelVector) -> SearchSpace:
    """The active hyperparameter dimensions for one model design.

    Texture dimensions are always present; the selected-feature count
    appears only with FS (lower bound 3 under DC so the discriminant
    compression to two dimensions has room to act); classifier dimensions
    follow m3.
    """
    dims: list[Dimension] = [
        CategoricalDim("fos_levels", ALLOWED_LEVELS),
        CategoricalDim("glds_levels", ALLOWED_LEVELS),
        IntDim("glds_distance", 1, 4),
        CategoricalDim("glcm_levels", ALLOWED_LEVELS),
        IntDim("glcm_distance", 1, 4),
        CategoricalDim("glrlm_levels", ALLOWED_LEVELS),
        IntDim("adf_angle_step", 1, 4),
        IntDim("rdf_radius_step", 1, 4),
    ]
    if design.m1 == "FS":
        dims.append(IntDim("fs_count", 3 if design.m2 == "DC" else 2, 38))
    if design.m3 in ("SVM-LK", "SVM-RBF"):
        dims.append(FloatDim("svm_c", 1e-4, 1e4, log=True))
    if design.m3 == "SVM-RBF":
        dims.append(FloatDim("svm_gamma", 1e-4, 1e4, log=True))
    if design.m3 == "DT":
        dims.append(CategoricalDim("dt_criterion", DT_CRITERIA))
        dims.append(IntDim("dt_max_depth", 1, 5))
    return SearchSpace(dims=tuple(dims))


# ---------------------------------------------------------------------------
# sampling helpers


def _sample_uniform(dim: Dimension, rng: np.random.Generator):
    if isinstance(dim, CategoricalDim):
        return dim.choices[int(rng.integers(len(dim.choices)))]
    if isinstance(dim, IntDim):
        return int(rng.integers(dim.lo, dim.hi + 1))
    if dim.log:
        return float(np.clip(10.0 ** rng.uniform(math.log10(dim.lo), math.log10(dim.hi)),
                             dim.lo, dim.hi))
    return float(rng.uniform(dim.lo, dim.hi))


def _transform(dim: Union[IntDim, FloatDim], v: float) -> float:
    if isinstance(dim, FloatDim) and dim.log:
        return math.log10(v)
    return float(v)


def _bounds(dim: Union[IntDim, FloatDim]) -> tuple[float, float]:
    if isinstance(dim, FloatDim) and dim.log:
        return math.log10(dim.lo), math.log10(dim.hi)
    return float(dim.lo), float(dim.hi)


def _categorical_weights(dim: CategoricalDim, observed: list) -> np.ndarray:
    """Add-one smoothed category frequencies."""
    counts = np.array([1.0 + sum(1 for v in observed if v == c) for c in dim.choices])
    return counts / counts.sum()


def _kde_bandwidths(points: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Per-point kernel widths from neighbor spacing.

    Each point's width is its larger gap to the adjacent sorted point, with
    the bounds acting as neighbors for the extremes, clipped to
    [span / min(100, n + 1), span].  Wide where points are sparse (early
    exploration), narrow where they cluster (late refinement).
    """
    span = hi - lo
    n = points.size
    order = np.argsort(points, kind="stable")
    s = points[order]
    left = np.diff(np.concatenate([[lo], s]))
    right = np.diff(np.concatenate([s, [hi]]))
    clipped = np.clip(np.maximum(left, right), span / min(100.0, n + 1.0), span)
    bw = np.empty_like(clipped)
    bw[order] = clipped
    return bw


def _kde_logpdf(points: np.ndarray, lo: float, hi: float, at: np.ndarray) -> np.ndarray:
    """Mixture of a uniform prior over [lo, hi] and one Gaussian per point."""
    span = hi - lo
    n = points.size
    bw = _kde_bandwidths(points, lo, hi)
    comp = np.exp(-0.5 * ((at[:, None] - points[None, :]) / bw[None, :]) ** 2) \
        / (bw[None, :] * math.sqrt(2.0 * math.pi))
    dens = (1.0 / span + comp.sum(axis=1)) / (n + 1)
    return np.log(np.maximum(dens, 1e-300))


def _kde_sample(points: np.ndarray, lo: float, hi: float, n_draw: int,
                rng: np.random.Generator) -> np.ndarray:
    n = points.size
    bw = _kde_bandwidths(points, lo, hi)
    # component n is the uniform prior, components 0..n-1 the point kernels
    comp = rng.integers(0, n + 1, size=n_draw)
    out = np.empty(n_draw)
    for t in range(n_draw):
        if comp[t] == n:
            out[t] = rng.uniform(lo, hi)
        else:
            out[t] = rng.normal(points[comp[t]], bw[comp[t]])
    return np.clip(out, lo, hi)


def suggest(space: SearchSpace, history: Sequence[TrialRecord],
            rng: np.random.Generator) -> dict:
    """Propose the next parameter vector given the trials so far."""
    if len(history) < _N_STARTUP:
        return {d.name: _sample_uniform(d, rng) for d in space.dims}

    # split history at the top-25% quantile by objective, ties to earlier trials
    order = sorted(range(len(history)),
                   key=lambda t: (-history[t].objective, history[t].index))
    n_good = max(1, math.ceil(_GOOD_FRACTION * len(history)))
    good_ids = set(order[:n_good])
    good = [history[t].params for t in range(len(history)) if t in good_ids]
    bad = [history[t].params for t in range(len(history)) if t not in good_ids]

    candidates: list[dict] = [dict() for _ in range(_N_CANDIDATES)]
    scores = np.zeros(_N_CANDIDATES)
    for dim in space.dims:
        good_vals = [p[dim.name] for p in good]
        bad_vals = [p[dim.name] for p in bad]
        if isinstance(dim, CategoricalDim):
            w_good = _categorical_weights(dim, good_vals)
            w_bad = _categorical_weights(dim, bad_vals)
            draw = rng.choice(len(dim.choices), size=_N_CANDIDATES, p=w_good)
            for t in range(_N_CANDIDATES):
                candidates[t][dim.name] = dim.choices[int(draw[t])]
            scores += np.log(w_good[draw]) - np.log(w_bad[draw])
        else:
            lo, hi = _bounds(dim)
            g = np.array([_transform(dim, v) for v in good_vals])
            b = np.array([_transform(dim, v) for v in bad_vals])
            draw = _kde_sample(g, lo, hi, _N_CANDIDATES, rng)
            if isinstance(dim, IntDim):
                draw = np.clip(np.rint(draw), dim.lo, dim.hi)
            scores += _kde_logpdf(g, lo, hi, draw)
            if b.size:
                scores -= _kde_logpdf(b, lo, hi, draw)
            for t in range(_N_CANDIDATES):
                if isinstance(dim, IntDim):
                    candidates[t][dim.name] = int(draw[t])
                else:
                    v = 10.0 ** draw[t] if dim.log else draw[t]
                    candidates[t][dim.name] = float(np.clip(v, dim.lo, dim.hi))
    return candidates[int(np.argmax(scores))]


@dataclass
class OptimizeResult:
    best_value: float
    best_params: dict
    history: list[TrialRecord] = field(default_factory=list)


class TrialError(RuntimeError):
    """Objective failure, tagged with the trial index that raised it."""

    def __init__(self, trial_index: int, cause: BaseException):
        super().__init__(f"objective failed at trial {trial_index}: {cause}")
        self.trial_index = trial_index


def optimize(objective: Callable[[dict], float], space: SearchSpace, b: int,
             seed: int) -> OptimizeResult:
    """Run b sequential trials and return the best one with the full history."""
    if b < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    history: list[TrialRecord] = []
    for t in range(b):
        params = suggest(space, history, rng)
        try:
            value = float(objective(params))
        except Exception as exc:
            raise TrialError(t, exc) from exc
        history.append(TrialRecord(index=t, params=params, objective=value))
    best = max(history, key=lambda r: (r.objective, -r.index))
    return OptimizeResult(best_value=best.objective, best_params=best.params,
                          history=history)
