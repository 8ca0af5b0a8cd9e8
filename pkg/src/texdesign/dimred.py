"""Fisher discriminant projection onto the most class-separating directions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

# Ridge added to the within-class scatter, relative to its mean diagonal.
_SCATTER_RIDGE = 1e-6


@dataclass(frozen=True)
class DiscriminantProjection:
    """Linear projection maximizing between- over within-class scatter.

    Each projection axis is unit length with its first nonzero coefficient
    positive, which pins down the eigenvector sign.
    """

    components: np.ndarray  # (d_out, d_in)

    @classmethod
    def fit(cls, x: np.ndarray, y: np.ndarray, n_components: int) -> "DiscriminantProjection":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y)
        if x.ndim != 2:
            raise ValueError("expected a 2-d sample matrix")
        classes = np.unique(y)
        n, d = x.shape
        if n_components < 1 or n_components > classes.size - 1:
            raise ValueError(
                f"n_components must be in [1, {classes.size - 1}] for {classes.size} classes"
            )
        if n < classes.size + 1:
            raise ValueError("need at least one more sample than classes")

        mu = x.mean(axis=0)
        s_w = np.zeros((d, d))
        s_b = np.zeros((d, d))
        for c in classes:
            xc = x[y == c]
            mu_c = xc.mean(axis=0)
            centered = xc - mu_c
            s_w += centered.T @ centered
            dm = (mu_c - mu)[:, None]
            s_b += xc.shape[0] * (dm @ dm.T)

        s_w = s_w + (_SCATTER_RIDGE * np.trace(s_w) / d) * np.eye(d)

        eigvals, eigvecs = scipy.linalg.eigh(s_b, s_w)
        order = np.argsort(eigvals)[::-1][:n_components]
        components = eigvecs[:, order].T
        norms = np.linalg.norm(components, axis=1, keepdims=True)
        components = components / norms
        for row in components:
            nz = np.flatnonzero(np.abs(row) > 1e-12)
            if nz.size and row[nz[0]] < 0:
                row *= -1.0
        return cls(components=components)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.components.T
