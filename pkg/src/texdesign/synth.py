"""Synthetic three-class texture images for end-to-end runs and benchmarks.

Each class mixes an oriented grating, correlated Gaussian noise, and a smooth
blob field; the recipes differ in grating frequency, noise correlation
length, and blob scale, so the classes separate on spectral and co-occurrence
statistics while sharing the same intensity range.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter

from .imageio import GrayImage
from .pipeline import Dataset, Sample

_GRATING_WEIGHT = 0.40
_NOISE_WEIGHT = 0.45
_BLOB_WEIGHT = 0.15


@dataclass(frozen=True)
class ClassRecipe:
    label: str
    grating_frequency: float  # cycles across the image width
    noise_sigma: float  # Gaussian blur radius of the white-noise layer
    blob_sigma: float  # blur radius of the blob layer

    def __post_init__(self) -> None:
        if self.grating_frequency <= 0 or self.noise_sigma <= 0 or self.blob_sigma <= 0:
            raise ValueError("recipe parameters must be positive")


DEFAULT_RECIPES = (
    ClassRecipe(label="disease", grating_frequency=24.0, noise_sigma=0.8, blob_sigma=4.0),
    ClassRecipe(label="borderline", grating_frequency=10.0, noise_sigma=2.0, blob_sigma=8.0),
    ClassRecipe(label="normal", grating_frequency=4.0, noise_sigma=4.0, blob_sigma=16.0),
)


def _unit(a: np.ndarray) -> np.ndarray:
    span = a.max() - a.min()
    if span == 0:
        return np.zeros_like(a)
    return (a - a.min()) / span


def synth_image(recipe: ClassRecipe, width: int, height: int,
                rng: np.random.Generator) -> GrayImage:
    """One image: grating + correlated noise + blobs, min-max scaled to 8 bit."""
    if width < 8 or height < 8:
        raise ValueError("images must be at least 8x8")
    theta = rng.uniform(0.0, np.pi)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    coord = (xx * np.cos(theta) + yy * np.sin(theta)) / width
    grating = np.sin(2.0 * np.pi * recipe.grating_frequency * coord + phase)
    noise = gaussian_filter(rng.standard_normal((height, width)), recipe.noise_sigma)
    blobs = gaussian_filter(rng.standard_normal((height, width)), recipe.blob_sigma)
    field = (_GRATING_WEIGHT * _unit(grating)
             + _NOISE_WEIGHT * _unit(noise)
             + _BLOB_WEIGHT * _unit(blobs))
    pixels = np.floor(_unit(field) * 255.0 + 0.5).astype(np.uint8)
    return GrayImage.from_array(pixels)


def _image_rng(seed: int, class_index: int, image_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, class_index, image_index]))


def generate_dataset(per_class: int, width: int, height: int, seed: int,
                     recipes: tuple[ClassRecipe, ...] = DEFAULT_RECIPES) -> Dataset:
    """In-memory dataset of per_class images for each recipe."""
    if per_class < 1:
        raise ValueError("per_class must be positive")
    samples = []
    for ci, recipe in enumerate(recipes):
        for i in range(per_class):
            img = synth_image(recipe, width, height, _image_rng(seed, ci, i))
            samples.append(Sample(sample_id=f"{recipe.label}_{i:03d}",
                                  image=img, label=recipe.label))
    return Dataset(samples=tuple(samples))


def write_dataset(out_dir: Path, per_class: int, width: int, height: int,
                  seed: int, recipes: tuple[ClassRecipe, ...] = DEFAULT_RECIPES
                  ) -> Path:
    """Write PNGs plus a manifest CSV; returns the manifest path."""
    out_dir = Path(out_dir)
    image_dir = out_dir / "images"
    image_dir.mkdir(parents=True, exist_ok=True)
    dataset = generate_dataset(per_class, width, height, seed, recipes)
    lines = ["path,label"]
    for sample in dataset.samples:
        name = f"{sample.sample_id}.png"
        Image.fromarray(sample.image.data, mode="L").save(image_dir / name,
                                                          format="PNG")
        lines.append(f"images/{name},{sample.label}")
    manifest = out_dir / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="ascii")
    return manifest
