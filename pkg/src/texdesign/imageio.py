"""Grayscale image loading, box-filter downsampling, and gray-level quantization.

All functions are pure: they never mutate their inputs, and returned images
carry read-only pixel buffers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

ALLOWED_LEVELS = (4, 16, 64, 256)

# integer luminance weights, per mille (BT.601)
_LUMA_R, _LUMA_G, _LUMA_B = 299, 587, 114


class ImageFormatError(ValueError):
    """File exists but is not an 8-bit grayscale or 8-bit RGB PNG/PGM."""


class ImageLoadError(OSError):
    """File is missing or unreadable."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale raster, pixels stored row-major as a (height, width) array."""

    width: int
    height: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.uint8)
        if data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {data.shape} != (height, width) = ({self.height}, {self.width})"
            )
        object.__setattr__(self, "data", _freeze(data))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "GrayImage":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("empty image")
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr.astype(np.uint8))


@dataclass(frozen=True)
class QuantizedImage:
    """Gray-level index raster: values in [0, levels-1], levels in ALLOWED_LEVELS."""

    width: int
    height: int
    levels: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.levels not in ALLOWED_LEVELS:
            raise ValueError(f"levels must be one of {ALLOWED_LEVELS}, got {self.levels}")
        data = np.asarray(self.data)
        if data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {data.shape} != (height, width) = ({self.height}, {self.width})"
            )
        if data.size and (data.min() < 0 or data.max() >= self.levels):
            raise ValueError("quantized values must lie in [0, levels-1]")
        object.__setattr__(self, "data", _freeze(data.astype(np.int16)))


def load_image(path) -> GrayImage:
    """Load an 8-bit grayscale or 8-bit RGB image (PNG or binary PGM).

    RGB is collapsed to luminance with weights 0.299/0.587/0.114, rounded
    half-up; the arithmetic is done in integers so the result is exact.
    """
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if im.format not in ("PNG", "PPM"):  # Pillow reports PGM under "PPM"
                raise ImageFormatError(f"{path}: unsupported format {im.format!r}")
            if mode == "L":
                arr = np.asarray(im, dtype=np.uint8)
            elif mode == "RGB":
                rgb = np.asarray(im, dtype=np.int64)
                luma = (
                    _LUMA_R * rgb[:, :, 0] + _LUMA_G * rgb[:, :, 1] + _LUMA_B * rgb[:, :, 2]
                )
                arr = ((luma + 500) // 1000).astype(np.uint8)
            else:
                raise ImageFormatError(
                    f"{path}: unsupported mode {mode!r} (need 8-bit grayscale or RGB)"
                )
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: not a readable PNG/PGM file") from exc
    except OSError as exc:
        raise ImageLoadError(f"{path}: {exc}") from exc
    return GrayImage.from_array(arr)


def _box_weights(n_in: int, n_out: int) -> np.ndarray:
    """(n_out, n_in) matrix of box-filter coverage weights; rows sum to 1."""
    scale = n_in / n_out
    w = np.zeros((n_out, n_in))
    edges = np.arange(n_out + 1) * scale
    for o in range(n_out):
        lo, hi = edges[o], edges[o + 1]
        i0, i1 = int(np.floor(lo)), int(np.ceil(hi))
        for i in range(i0, min(i1, n_in)):
            w[o, i] = min(hi, i + 1) - max(lo, i)
    return w / scale


def resize(img: GrayImage, target_w: int, target_h: int) -> GrayImage:
    """Area-average (box) downsampling to target_w x target_h, rounded half-up.

    Upscaling on either axis is rejected.
    """
    if target_w < 1 or target_h < 1:
        raise ValueError("target dimensions must be >= 1")
    if target_w > img.width or target_h > img.height:
        raise ValueError(
            f"upscaling not supported: {img.width}x{img.height} -> {target_w}x{target_h}"
        )
    if (target_w, target_h) == (img.width, img.height):
        return GrayImage.from_array(img.data)
    wr = _box_weights(img.height, target_h)
    wc = _box_weights(img.width, target_w)
    out = wr @ img.data.astype(np.float64) @ wc.T
    return GrayImage.from_array(np.floor(out + 0.5).astype(np.uint8))


def quantize(img: GrayImage, levels: int) -> QuantizedImage:
    """Map 8-bit values to level indices: level = floor(value * levels / 256)."""
    if levels not in ALLOWED_LEVELS:
        raise ValueError(f"levels must be one of {ALLOWED_LEVELS}, got {levels}")
    data = (img.data.astype(np.int64) * levels) // 256
    return QuantizedImage(width=img.width, height=img.height, levels=levels, data=data)
