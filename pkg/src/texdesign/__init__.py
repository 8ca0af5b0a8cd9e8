"""Texture-feature pipeline for small-sample three-class image studies.

Feature extraction (six texture analyses, 39 features), robust scaling,
separability-based feature selection, discriminant compression, from-scratch
SVM/decision-tree classifiers, nested cross-validated hyperparameter search,
and per-feature significance testing, with a CLI front end.
"""

from .designs import ModelVector, all_designs
from .imageio import GrayImage, QuantizedImage, load_image, quantize, resize
from .metrics import confusion, macro_f1
from .pipeline import (CachedExtractor, Dataset, DesignReport, Sample,
                       evaluate_model_design, stratified_kfold, sweep_designs)
from .preprocess import FeatureSelector, RobustScaler
from .stats import benjamini_hochberg, kruskal_wallis, significance_report
from .texture import FEATURE_NAMES, TextureParams, extract_features

__all__ = [
    "CachedExtractor",
    "Dataset",
    "DesignReport",
    "FEATURE_NAMES",
    "FeatureSelector",
    "GrayImage",
    "ModelVector",
    "QuantizedImage",
    "RobustScaler",
    "Sample",
    "TextureParams",
    "all_designs",
    "benjamini_hochberg",
    "confusion",
    "evaluate_model_design",
    "extract_features",
    "kruskal_wallis",
    "load_image",
    "macro_f1",
    "quantize",
    "resize",
    "significance_report",
    "stratified_kfold",
    "sweep_designs",
]

__version__ = "0.1.0"
