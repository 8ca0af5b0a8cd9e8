"""Nested stratified cross-validation over texture model designs.

Outer loop: K-fold split into training and test sets.  Per outer fold an
inner K-fold search tunes all hyperparameters (texture, selection count,
classifier) by Bayesian optimization, then the winning vector is refitted on
the whole training fold and scored on train and test.  Feature extraction is
memoized per (sample, method, params) so repeated trials stay cheap.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .classify import (DtModel, SvmModel, predict_dt, predict_svm, train_dt,
                       train_svm)
from .designs import ModelVector, all_designs
from .dimred import DiscriminantProjection
from .hyperopt import TrialRecord, build_space, optimize
from .imageio import GrayImage, quantize
from .metrics import macro_f1
from .preprocess import FeatureSelector, RobustScaler
from .texture import (N_FEATURES, TextureParams, adf_from_spectrum,
                      fos_features, glcm_features, glds_features,
                      glrlm_features, power_spectrum, rdf_from_spectrum)

logger = logging.getLogger(__name__)

_TEXTURE_KEYS = ("fos_levels", "glds_levels", "glds_distance", "glcm_levels",
                 "glcm_distance", "glrlm_levels", "adf_angle_step", "rdf_radius_step")
_DC_DIMS = 2  # discriminant compression target for the three-class problem


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class Sample:
    sample_id: str
    image: GrayImage
    label: str
    subject: Optional[str] = None


@dataclass(frozen=True)
class Dataset:
    samples: tuple[Sample, ...]

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("empty dataset")
        ids = [s.sample_id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sample ids")

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples])

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)


def stratified_kfold(labels: Sequence, k: int, seed: int,
                     strict: bool = True) -> list[np.ndarray]:
    """K disjoint index subsets with equal per-class counts per fold.

    Samples are shuffled within each class, then dealt round-robin starting
    at a per-class offset so remainders (strict=False) land on different
    folds.  strict=True rejects class counts not divisible by K.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("need at least two folds")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for ci, c in enumerate(np.unique(labels)):
        idx = np.flatnonzero(labels == c)
        if idx.size < k:
            raise ValueError(f"class {c!r} has fewer samples than folds")
        if strict and idx.size % k != 0:
            raise ValueError(
                f"class {c!r} count {idx.size} not divisible by {k} folds"
            )
        perm = rng.permutation(idx)
        for i, sample in enumerate(perm.tolist()):
            folds[(i + ci) % k].append(sample)
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


class CachedExtractor:
    """Texture features memoized per (sample, method, method params).

    Power spectra and quantized rasters are cached too, since they are shared
    across parameter combinations.  Results are the exact arrays the plain
    extraction functions produce.
    """

    def __init__(self, samples: Sequence[Sample]):
        self._images = {s.sample_id: s.image for s in samples}
        self._spectra: dict[str, np.ndarray] = {}
        self._quantized: dict[tuple[str, int], object] = {}
        self._cache: dict[tuple, np.ndarray] = {}

    def _spectrum(self, sid: str) -> np.ndarray:
        spec = self._spectra.get(sid)
        if spec is None:
            spec = power_spectrum(self._images[sid])
            self._spectra[sid] = spec
        return spec

    def _quantize(self, sid: str, levels: int):
        key = (sid, levels)
        q = self._quantized.get(key)
        if q is None:
            q = quantize(self._images[sid], levels)
            self._quantized[key] = q
        return q

    def _get(self, key: tuple, compute) -> np.ndarray:
        vec = self._cache.get(key)
        if vec is None:
            vec = compute()
            self._cache[key] = vec
        return vec

    def feature_vector(self, sid: str, p: TextureParams) -> np.ndarray:
        if sid not in self._images:
            raise KeyError(f"unknown sample id {sid!r}")
        parts = (
            self._get((sid, "fos", p.fos_levels),
                      lambda: fos_features(self._quantize(sid, p.fos_levels))),
            self._get((sid, "glds", p.glds_levels, p.glds_distance),
                      lambda: glds_features(self._quantize(sid, p.glds_levels),
                                            p.glds_distance)),
            self._get((sid, "glcm", p.glcm_levels, p.glcm_distance),
                      lambda: glcm_features(self._quantize(sid, p.glcm_levels),
                                            p.glcm_distance)),
            self._get((sid, "glrlm", p.glrlm_levels),
                      lambda: glrlm_features(self._quantize(sid, p.glrlm_levels))),
            self._get((sid, "adf", p.adf_angle_step),
                      lambda: adf_from_spectrum(self._spectrum(sid), p.adf_angle_step)),
            self._get((sid, "rdf", p.rdf_radius_step),
                      lambda: rdf_from_spectrum(self._spectrum(sid), p.rdf_radius_step)),
        )
        vec = np.concatenate(parts)
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"non-finite texture feature for sample {sid!r}")
        return vec

    def features(self, sids: Sequence[str], p: TextureParams) -> np.ndarray:
        return np.vstack([self.feature_vector(sid, p) for sid in sids])


def texture_params_from(params: dict) -> TextureParams:
    return TextureParams(**{key: int(params[key]) for key in _TEXTURE_KEYS})


@dataclass(frozen=True)
class ReductionArtifacts:
    selector: Optional[FeatureSelector]
    projection: Optional[DiscriminantProjection]


def dimensionality_reduction(f_a: np.ndarray, y_a: np.ndarray, f_b: np.ndarray,
                             design: ModelVector, params: dict
                             ) -> tuple[np.ndarray, np.ndarray, ReductionArtifacts]:
    """Selection and/or discriminant compression fitted on set a only."""
    selector = None
    projection = None
    if design.m1 == "FS":
        selector = FeatureSelector.fit(f_a, y_a, int(params["fs_count"]))
        f_a = selector.transform(f_a)
        f_b = selector.transform(f_b)
    if design.m2 == "DC":
        projection = DiscriminantProjection.fit(f_a, y_a, _DC_DIMS)
        f_a = projection.transform(f_a)
        f_b = projection.transform(f_b)
    return f_a, f_b, ReductionArtifacts(selector=selector, projection=projection)


ClassifierModel = Union[SvmModel, DtModel]


def fit_classifier(f: np.ndarray, y: np.ndarray, design: ModelVector,
                   params: dict) -> ClassifierModel:
    if design.m3 == "SVM-LK":
        return train_svm(f, y, "linear", float(params["svm_c"]))
    if design.m3 == "SVM-RBF":
        return train_svm(f, y, "rbf", float(params["svm_c"]),
                         gamma=float(params["svm_gamma"]))
    return train_dt(f, y, str(params["dt_criterion"]), int(params["dt_max_depth"]))


def predict(model: ClassifierModel, f: np.ndarray) -> np.ndarray:
    if isinstance(model, SvmModel):
        return predict_svm(model, f)
    return predict_dt(model, f)


def _fit_and_score(extractor: CachedExtractor, design: ModelVector, params: dict,
                   fit_ids: Sequence[str], fit_y: np.ndarray,
                   eval_ids: Sequence[str], eval_y: np.ndarray,
                   classes: Sequence) -> tuple[float, float, RobustScaler,
                                               ReductionArtifacts, ClassifierModel]:
    """Fit the full chain on (fit_*), score on both sets."""
    tex = texture_params_from(params)
    f_fit = extractor.features(fit_ids, tex)
    f_eval = extractor.features(eval_ids, tex)
    scaler = RobustScaler.fit(f_fit)
    f_fit = scaler.transform(f_fit)
    f_eval = scaler.transform(f_eval)
    f_fit, f_eval, artifacts = dimensionality_reduction(f_fit, fit_y, f_eval,
                                                        design, params)
    model = fit_classifier(f_fit, fit_y, design, params)
    s_fit = macro_f1(fit_y, predict(model, f_fit), classes)
    s_eval = macro_f1(eval_y, predict(model, f_eval), classes)
    return s_fit, s_eval, scaler, artifacts, model


@dataclass
class SearchResult:
    s_valid_max: float
    best_params: dict
    best_fold_scores: tuple[float, ...]
    history: list[TrialRecord]


def search_best_parameters(extractor: CachedExtractor, ids: Sequence[str],
                           labels: np.ndarray, design: ModelVector, k: int,
                           b: int, fold_seed: int, search_seed: int,
                           classes: Sequence) -> SearchResult:
    """Inner K-fold hyperparameter search; objective is mean validation macro-F1.

    A trial that raises anywhere in its folds is logged and scored 0.
    Returns the best trial (ties go to the earlier trial) with its per-fold
    validation scores.
    """
    ids = list(ids)
    inner_folds = stratified_kfold(labels, k, fold_seed, strict=False)
    space = build_space(design)
    trial_fold_scores: list[tuple[float, ...]] = []

    def objective(params: dict) -> float:
        try:
            scores = []
            for valid_idx in inner_folds:
                valid_mask = np.zeros(len(ids), dtype=bool)
                valid_mask[valid_idx] = True
                st_ids = [ids[i] for i in np.flatnonzero(~valid_mask)]
                va_ids = [ids[i] for i in valid_idx]
                _, s_valid, _, _, _ = _fit_and_score(
                    extractor, design, params,
                    st_ids, labels[~valid_mask], va_ids, labels[valid_mask],
                    classes,
                )
                scores.append(s_valid)
        except Exception as exc:
            logger.warning("design %s: trial failed, scored 0: %s", design.label, exc)
            trial_fold_scores.append(tuple(0.0 for _ in inner_folds))
            return 0.0
        trial_fold_scores.append(tuple(scores))
        return float(np.mean(scores))

    result = optimize(objective, space, b, search_seed)
    best_idx = max(range(len(result.history)),
                   key=lambda t: (result.history[t].objective, -t))
    return SearchResult(
        s_valid_max=result.best_value,
        best_params=result.best_params,
        best_fold_scores=trial_fold_scores[best_idx],
        history=result.history,
    )


@dataclass(frozen=True)
class FoldResult:
    fold: int
    best_params: dict
    s_valid_max: float
    valid_scores: tuple[float, ...]  # the best trial's inner-fold scores
    s_train: float
    s_test: float
    scaler: RobustScaler
    artifacts: ReductionArtifacts
    model: ClassifierModel
    history: tuple[TrialRecord, ...]


@dataclass(frozen=True)
class DesignReport:
    design: ModelVector
    train_mean: float
    train_std: float
    valid_mean: float
    valid_std: float
    test_mean: float
    test_std: float
    dims_input: float
    dims_post_fs: float
    dims_post_dc: float
    folds: tuple[FoldResult, ...]

    @property
    def dimension_trace(self) -> str:
        parts = [f"{self.dims_input:.1f}"]
        if self.design.m1 == "FS":
            parts.append(f"{self.dims_post_fs:.1f}")
        if self.design.m2 == "DC":
            parts.append(f"{self.dims_post_dc:.1f}")
        return " -> ".join(parts)


@dataclass(frozen=True)
class DesignFailure:
    design: ModelVector
    message: str


DesignOutcome = Union[DesignReport, DesignFailure]


def _fold_seeds(seed: int, design: ModelVector, fold: int) -> tuple[int, int]:
    """Independent (inner split, search) seeds per (run, design, fold)."""
    root = np.random.SeedSequence([seed, all_designs().index(design), fold])
    inner_seed, search_seed = (int(s) for s in root.generate_state(2))
    return inner_seed, search_seed


def evaluate_model_design(dataset: Dataset, design: ModelVector, k: int, b: int,
                          seed: int, extractor: Optional[CachedExtractor] = None
                          ) -> DesignReport:
    """Nested cross-validation of one design; see the module docstring."""
    if extractor is None:
        extractor = CachedExtractor(dataset.samples)
    labels = dataset.labels
    classes = dataset.classes
    all_ids = [s.sample_id for s in dataset.samples]
    outer_folds = stratified_kfold(labels, k, seed, strict=True)

    folds: list[FoldResult] = []
    for fold_no, test_idx in enumerate(outer_folds):
        try:
            test_mask = np.zeros(len(all_ids), dtype=bool)
            test_mask[test_idx] = True
            train_ids = [all_ids[i] for i in np.flatnonzero(~test_mask)]
            test_ids = [all_ids[i] for i in test_idx]
            y_train = labels[~test_mask]
            y_test = labels[test_mask]

            inner_seed, search_seed = _fold_seeds(seed, design, fold_no)
            search = search_best_parameters(extractor, train_ids, y_train, design,
                                            k, b, inner_seed, search_seed, classes)
            s_train, s_test, scaler, artifacts, model = _fit_and_score(
                extractor, design, search.best_params,
                train_ids, y_train, test_ids, y_test, classes,
            )
        except Exception as exc:
            raise PipelineError(
                f"design {design.label} fold {fold_no}: {exc}"
            ) from exc
        folds.append(FoldResult(
            fold=fold_no,
            best_params=search.best_params,
            s_valid_max=search.s_valid_max,
            valid_scores=search.best_fold_scores,
            s_train=s_train,
            s_test=s_test,
            scaler=scaler,
            artifacts=artifacts,
            model=model,
            history=tuple(search.history),
        ))

    train_scores = np.array([f.s_train for f in folds])
    test_scores = np.array([f.s_test for f in folds])
    valid_scores = np.array([s for f in folds for s in f.valid_scores])
    if design.m1 == "FS":
        dims_post_fs = float(np.mean(
            [len(f.artifacts.selector.indices) for f in folds]
        ))
    else:
        dims_post_fs = float(N_FEATURES)
    dims_post_dc = float(_DC_DIMS) if design.m2 == "DC" else dims_post_fs
    return DesignReport(
        design=design,
        train_mean=float(train_scores.mean()), train_std=float(train_scores.std()),
        valid_mean=float(valid_scores.mean()), valid_std=float(valid_scores.std()),
        test_mean=float(test_scores.mean()), test_std=float(test_scores.std()),
        dims_input=float(N_FEATURES),
        dims_post_fs=dims_post_fs,
        dims_post_dc=dims_post_dc,
        folds=tuple(folds),
    )


def selection_rates(report: DesignReport) -> np.ndarray:
    """Fraction of outer folds in which each of the 39 features was selected."""
    counts = np.zeros(N_FEATURES)
    for fold in report.folds:
        selector = fold.artifacts.selector
        if selector is not None:
            counts[list(selector.indices)] += 1.0
    return counts / len(report.folds)


def _evaluate_design_job(args: tuple) -> DesignOutcome:
    dataset, design, k, b, seed = args
    try:
        return evaluate_model_design(dataset, design, k, b, seed)
    except Exception as exc:
        logger.error("design %s failed: %s", design.label, exc)
        return DesignFailure(design=design, message=str(exc))


def sweep_designs(dataset: Dataset, k: int, b: int, seed: int,
                  designs: Optional[Sequence[ModelVector]] = None,
                  workers: int = 1) -> list[DesignOutcome]:
    """Evaluate each design; failures are recorded and the sweep continues.

    Results are identical for any worker count: every design's randomness is
    derived from (seed, design, fold) alone.
    """
    chosen = list(designs) if designs is not None else list(all_designs())
    if workers <= 1:
        extractor = CachedExtractor(dataset.samples)  # shared across designs
        out = []
        for design in chosen:
            try:
                out.append(evaluate_model_design(dataset, design, k, b, seed,
                                                 extractor=extractor))
            except Exception as exc:
                logger.error("design %s failed: %s", design.label, exc)
                out.append(DesignFailure(design=design, message=str(exc)))
        return out
    jobs = [(dataset, design, k, b, seed) for design in chosen]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_design_job, jobs))
