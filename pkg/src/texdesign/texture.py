"""Six texture analyses on grayscale images and the 39-feature vector they produce.

Methods: first-order statistics (FOS), gray level difference statistics (GLDS),
gray level co-occurrence matrix (GLCM), gray level run length matrix (GLRLM),
and angular / radial distribution functions of the 2-D Fourier power spectrum
(ADF / RDF).  The first four operate on quantized images; ADF/RDF operate on
raw 8-bit grayscale.

Directional methods (GLDS, GLCM, GLRLM) evaluate the four offsets at
0/45/90/135 degrees and average the per-direction statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imageio import ALLOWED_LEVELS, GrayImage, QuantizedImage, quantize

ALLOWED_DISTANCES = (1, 2, 3, 4)
ALLOWED_STEPS = (1, 2, 3, 4)

DIST_STAT_NAMES = ("mean", "contrast", "variance", "skewness", "kurtosis", "energy", "entropy")
GLCM_STAT_NAMES = ("contrast", "correlation", "joint_energy", "joint_entropy", "idm",
                   "inverse_variance")
GLRLM_STAT_NAMES = ("sre", "lre", "gln", "rln", "rp")

FEATURE_NAMES: tuple[str, ...] = tuple(
    [f"fos_{s}" for s in DIST_STAT_NAMES]
    + [f"glds_{s}" for s in DIST_STAT_NAMES]
    + [f"glcm_{s}" for s in GLCM_STAT_NAMES]
    + [f"glrlm_{s}" for s in GLRLM_STAT_NAMES]
    + [f"adf_{s}" for s in DIST_STAT_NAMES]
    + [f"rdf_{s}" for s in DIST_STAT_NAMES]
)
N_FEATURES = len(FEATURE_NAMES)  # 39

# (row offset, col offset) for 0, 90, 45, 135 degrees at unit distance; scaled by d.
_DIRECTIONS = ((0, 1), (1, 0), (1, 1), (1, -1))


@dataclass(frozen=True)
class Distribution1D:
    """Discrete distribution over strictly increasing support coordinates.

    probs must sum to 1 within 1e-9, or be all zero (the degenerate case a
    zero power spectrum produces).
    """

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=np.float64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if support.shape != probs.shape or support.ndim != 1:
            raise ValueError("support and probs must be 1-d arrays of equal length")
        if np.any(np.diff(support) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        total = probs.sum()
        if total != 0.0 and abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, expected 1 or 0")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @property
    def is_zero(self) -> bool:
        return float(self.probs.sum()) == 0.0


@dataclass(frozen=True)
class TextureParams:
    """Per-method hyperparameters: gray levels, pair distances, profile steps."""

    fos_levels: int = 64
    glds_levels: int = 64
    glds_distance: int = 1
    glcm_levels: int = 64
    glcm_distance: int = 1
    glrlm_levels: int = 64
    adf_angle_step: int = 1
    rdf_radius_step: int = 1

    def __post_init__(self) -> None:
        for name in ("fos_levels", "glds_levels", "glcm_levels", "glrlm_levels"):
            if getattr(self, name) not in ALLOWED_LEVELS:
                raise ValueError(f"{name} must be one of {ALLOWED_LEVELS}")
        for name in ("glds_distance", "glcm_distance"):
            if getattr(self, name) not in ALLOWED_DISTANCES:
                raise ValueError(f"{name} must be one of {ALLOWED_DISTANCES}")
        for name in ("adf_angle_step", "rdf_radius_step"):
            if getattr(self, name) not in ALLOWED_STEPS:
                raise ValueError(f"{name} must be one of {ALLOWED_STEPS}")


def dist_stats(dist: Distribution1D) -> np.ndarray:
    """Seven statistics of a discrete distribution, in DIST_STAT_NAMES order.

    mean     = sum x*p
    contrast = sum x^2*p
    variance = sum (x-mu)^2*p
    skewness = sum ((x-mu)/sigma)^3*p     (0 when sigma == 0)
    kurtosis = sum ((x-mu)/sigma)^4*p - 3 (excess; 0 when sigma == 0)
    energy   = sum p^2
    entropy  = -sum p*log2(p)             (0*log 0 == 0)

    An all-zero distribution yields all-zero statistics.
    """
    x, p = dist.support, dist.probs
    if dist.is_zero:
        return np.zeros(7)
    mean = float(np.dot(x, p))
    contrast = float(np.dot(x * x, p))
    d = x - mean
    variance = float(np.dot(d * d, p))
    sigma = np.sqrt(variance)
    if sigma > 0.0:
        z = d / sigma
        skewness = float(np.dot(z**3, p))
        kurtosis = float(np.dot(z**4, p)) - 3.0
    else:
        skewness = kurtosis = 0.0
    energy = float(np.dot(p, p))
    nz = p[p > 0]
    entropy = float(-np.dot(nz, np.log2(nz)))
    return np.array([mean, contrast, variance, skewness, kurtosis, energy, entropy])


def _hist_distribution(values: np.ndarray, levels: int) -> Distribution1D:
    counts = np.bincount(values.ravel(), minlength=levels).astype(np.float64)
    total = counts.sum()
    probs = counts / total if total > 0 else counts
    return Distribution1D(support=np.arange(levels, dtype=np.float64), probs=probs)


def fos_features(q: QuantizedImage) -> np.ndarray:
    """Statistics of the normalized gray-level histogram."""
    if q.data.size == 0:
        raise ValueError("empty image")
    return dist_stats(_hist_distribution(q.data, q.levels))


def _offset_pairs(data: np.ndarray, dr: int, dc: int) -> tuple[np.ndarray, np.ndarray]:
    """All in-bounds (origin, neighbor) pixel pairs for offset (dr, dc)."""
    h, w = data.shape
    if dr >= h or abs(dc) >= w:
        return data[0:0, 0:0], data[0:0, 0:0]
    if dc >= 0:
        a = data[: h - dr, : w - dc]
        b = data[dr:, dc:]
    else:
        a = data[: h - dr, -dc:]
        b = data[dr:, : w + dc]
    return a, b


def glds_features(q: QuantizedImage, distance: int) -> np.ndarray:
    """Absolute gray-level difference statistics, averaged over four directions."""
    if distance not in ALLOWED_DISTANCES:
        raise ValueError(f"distance must be one of {ALLOWED_DISTANCES}")
    data = q.data.astype(np.int64)
    stats = []
    for dr, dc in _DIRECTIONS:
        a, b = _offset_pairs(data, dr * distance, dc * distance)
        if a.size == 0:
            raise ValueError(
                f"image {q.width}x{q.height} has no pixel pairs at distance {distance}"
            )
        stats.append(dist_stats(_hist_distribution(np.abs(a - b), q.levels)))
    return np.mean(stats, axis=0)


def _glcm_matrix(data: np.ndarray, levels: int, dr: int, dc: int) -> np.ndarray:
    a, b = _offset_pairs(data, dr, dc)
    if a.size == 0:
        raise ValueError("image has no pixel pairs at the requested distance")
    counts = np.bincount((a * levels + b).ravel(), minlength=levels * levels)
    m = counts.reshape(levels, levels).astype(np.float64)
    m = m + m.T  # symmetric accumulation
    return m / m.sum()


def _glcm_stats(p: np.ndarray) -> np.ndarray:
    levels = p.shape[0]
    idx = np.arange(levels, dtype=np.float64)
    i = idx[:, None]
    j = idx[None, :]
    diff = i - j
    contrast = float((diff**2 * p).sum())
    px = p.sum(axis=1)
    mu_i = float(np.dot(idx, px))
    var_i = float(np.dot((idx - mu_i) ** 2, px))
    py = p.sum(axis=0)
    mu_j = float(np.dot(idx, py))
    var_j = float(np.dot((idx - mu_j) ** 2, py))
    denom = np.sqrt(var_i * var_j)
    if denom > 0.0:
        correlation = float(((i - mu_i) * (j - mu_j) * p).sum()) / denom
    else:
        correlation = 1.0
    joint_energy = float((p * p).sum())
    nz = p[p > 0]
    joint_entropy = float(-np.dot(nz, np.log2(nz)))
    idm = float((p / (1.0 + diff**2)).sum())
    off = diff != 0
    inverse_variance = float((p[off] / diff[off] ** 2).sum()) if off.any() else 0.0
    return np.array([contrast, correlation, joint_energy, joint_entropy, idm,
                     inverse_variance])


def glcm_features(q: QuantizedImage, distance: int) -> np.ndarray:
    """Symmetric co-occurrence statistics, averaged over four directions."""
    if distance not in ALLOWED_DISTANCES:
        raise ValueError(f"distance must be one of {ALLOWED_DISTANCES}")
    data = q.data.astype(np.int64)
    stats = [
        _glcm_stats(_glcm_matrix(data, q.levels, dr * distance, dc * distance))
        for dr, dc in _DIRECTIONS
    ]
    return np.mean(stats, axis=0)


def _direction_lines(data: np.ndarray, dr: int, dc: int):
    """Maximal scan lines of the image along one of the four directions."""
    h, w = data.shape
    if (dr, dc) == (0, 1):
        return [data[r, :] for r in range(h)]
    if (dr, dc) == (1, 0):
        return [data[:, c] for c in range(w)]
    if (dr, dc) == (1, 1):
        return [np.diagonal(data, offset=o) for o in range(-(h - 1), w)]
    # (1, -1): down-left diagonals = diagonals of the left-right mirror
    flipped = data[:, ::-1]
    return [np.diagonal(flipped, offset=o) for o in range(-(h - 1), w)]


def _run_decomposition(line: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(levels, lengths) of the maximal equal-value runs in one line."""
    boundaries = np.flatnonzero(np.diff(line)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [line.size]))
    return line[starts], ends - starts


def _glrlm_direction_stats(data: np.ndarray, dr: int, dc: int) -> np.ndarray:
    by_level: dict[int, float] = {}
    by_length: dict[int, float] = {}
    sum_inv_sq = 0.0
    sum_sq = 0.0
    n_runs = 0
    for line in _direction_lines(data, dr, dc):
        levels, lengths = _run_decomposition(line)
        n_runs += len(lengths)
        sum_inv_sq += float((1.0 / lengths.astype(np.float64) ** 2).sum())
        sum_sq += float((lengths.astype(np.float64) ** 2).sum())
        for g, l in zip(levels.tolist(), lengths.tolist()):
            by_level[g] = by_level.get(g, 0.0) + 1.0
            by_length[l] = by_length.get(l, 0.0) + 1.0
    sre = sum_inv_sq / n_runs
    lre = sum_sq / n_runs
    gln = sum(v * v for v in by_level.values()) / n_runs
    rln = sum(v * v for v in by_length.values()) / n_runs
    rp = n_runs / data.size
    return np.array([sre, lre, gln, rln, rp])


def glrlm_features(q: QuantizedImage) -> np.ndarray:
    """Run-length statistics (SRE, LRE, GLN, RLN, RP), averaged over four directions."""
    if q.data.size == 0:
        raise ValueError("empty image")
    data = np.asarray(q.data)
    return np.mean([_glrlm_direction_stats(data, dr, dc) for dr, dc in _DIRECTIONS], axis=0)


def power_spectrum(img: GrayImage) -> np.ndarray:
    """Centered 2-D power spectrum of the mean-subtracted image.

    The zero-frequency bin sits at (height//2, width//2) and is 0 by
    construction.
    """
    if img.width < 2 or img.height < 2:
        raise ValueError("power spectrum needs at least a 2x2 image")
    x = img.data.astype(np.float64)
    x = x - x.mean()
    f = np.fft.fft2(x)
    return np.fft.fftshift((f * f.conj()).real)


def _spectrum_center(spec: np.ndarray) -> tuple[int, int]:
    return spec.shape[0] // 2, spec.shape[1] // 2


def adf_from_spectrum(spec: np.ndarray, angle_step: int) -> np.ndarray:
    """Angular profile statistics from a centered power spectrum."""
    if angle_step not in ALLOWED_STEPS:
        raise ValueError(f"angle_step must be one of {ALLOWED_STEPS}")
    cy, cx = _spectrum_center(spec)
    h, w = spec.shape
    dy = np.arange(h, dtype=np.float64)[:, None] - cy
    dx = np.arange(w, dtype=np.float64)[None, :] - cx
    angles = np.degrees(np.arctan2(np.broadcast_to(dy, spec.shape),
                                   np.broadcast_to(dx, spec.shape))) % 180.0
    n_bins = 180 // angle_step
    bins = np.minimum((angles / angle_step).astype(np.int64), n_bins - 1)
    mask = np.ones(spec.shape, dtype=bool)
    mask[cy, cx] = False
    mass = np.bincount(bins[mask], weights=spec[mask], minlength=n_bins)
    support = (np.arange(n_bins) + 0.5) * angle_step
    total = mass.sum()
    probs = mass / total if total > 0 else np.zeros(n_bins)
    return dist_stats(Distribution1D(support=support, probs=probs))


def rdf_from_spectrum(spec: np.ndarray, radius_step: int) -> np.ndarray:
    """Radial profile statistics from a centered power spectrum.

    Annuli are half-open [a, a+step) and reach up to floor(min(W, H)/2); when
    the step does not divide that radius the last annulus extends past it.
    """
    if radius_step not in ALLOWED_STEPS:
        raise ValueError(f"radius_step must be one of {ALLOWED_STEPS}")
    cy, cx = _spectrum_center(spec)
    h, w = spec.shape
    dy = np.arange(h, dtype=np.float64)[:, None] - cy
    dx = np.arange(w, dtype=np.float64)[None, :] - cx
    radius = np.hypot(*np.broadcast_arrays(dy, dx))
    r_max = min(h, w) // 2
    n_bins = -(-r_max // radius_step)  # ceil
    bins = (radius / radius_step).astype(np.int64)
    mask = (radius > 0) & (bins < n_bins)
    mass = np.bincount(bins[mask], weights=spec[mask], minlength=n_bins)
    support = (np.arange(n_bins) + 0.5) * radius_step
    total = mass.sum()
    probs = mass / total if total > 0 else np.zeros(n_bins)
    return dist_stats(Distribution1D(support=support, probs=probs))


def adf_features(img: GrayImage, angle_step: int) -> np.ndarray:
    return adf_from_spectrum(power_spectrum(img), angle_step)


def rdf_features(img: GrayImage, radius_step: int) -> np.ndarray:
    return rdf_from_spectrum(power_spectrum(img), radius_step)


def extract_features(img: GrayImage, params: TextureParams) -> np.ndarray:
    """The full 39-feature vector in FEATURE_NAMES order."""
    spec = power_spectrum(img)
    parts = (
        fos_features(quantize(img, params.fos_levels)),
        glds_features(quantize(img, params.glds_levels), params.glds_distance),
        glcm_features(quantize(img, params.glcm_levels), params.glcm_distance),
        glrlm_features(quantize(img, params.glrlm_levels)),
        adf_from_spectrum(spec, params.adf_angle_step),
        rdf_from_spectrum(spec, params.rdf_radius_step),
    )
    vec = np.concatenate(parts)
    if not np.all(np.isfinite(vec)):
        raise ValueError("non-finite texture feature produced")
    return vec
