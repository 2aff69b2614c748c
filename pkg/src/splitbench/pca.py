"""PCA over arbitrary sample/feature subsets, plus 2D projection and loadings.

The basis is computed by thin SVD of the centered submatrix (never the
covariance matrix) for numerical stability. Explained variances use the
sample convention: squared singular values divided by (n - 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import ExpressionMatrix
from .errors import BadComponentIndex, TooFewFeatures, TooFewSamples


@dataclass(frozen=True, eq=False)
class PcaBasis:
    """Frozen mean + orthonormal components for one sample/feature subset.

    feature_subset holds dataset feature indices; components rows are unit
    vectors over that subset, ordered by descending explained variance.
    """

    feature_subset: tuple[int, ...]
    mean: np.ndarray
    components: np.ndarray
    variances: np.ndarray
    n_samples_fit: int

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def check_axes(self, pc_x: int, pc_y: int) -> None:
        k = self.n_components
        if not (0 <= pc_x < k and 0 <= pc_y < k):
            raise BadComponentIndex(f"component indices ({pc_x}, {pc_y}) out of range for {k} components")
        if pc_x == pc_y:
            raise BadComponentIndex(f"the two axes must differ, both are {pc_x}")


@dataclass(frozen=True, eq=False)
class Projection2D:
    pc_x: int
    pc_y: int
    sample_ids: tuple[str, ...]
    coords: np.ndarray  # (n, 2)

    def axis(self, which: str) -> np.ndarray:
        return self.coords[:, 0] if which == "x" else self.coords[:, 1]


@dataclass(frozen=True, eq=False)
class Loadings:
    """Per-feature influence on the two selected components.

    vectors are eigenvector entries scaled by sqrt(explained variance) for
    the biplot; raw_x/raw_y are the unscaled eigenvector entries used as
    aligned-heatmap labels.
    """

    feature_indices: tuple[int, ...]
    vectors: np.ndarray  # (m, 2)
    raw_x: np.ndarray
    raw_y: np.ndarray


def _apply_sign_convention(components: np.ndarray) -> np.ndarray:
    # the largest-|entry| coordinate of each component is made non-negative;
    # np.argmax resolves ties to the lowest feature index
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    return components


def fit_pca(
    matrix: ExpressionMatrix,
    samples: Sequence[int],
    features: Sequence[int],
) -> PcaBasis:
    """Fit a basis on the given sample rows restricted to the given features.

    Requires at least 3 samples and 2 features. Identical rows are legal and
    yield an all-zero-variance basis rather than an error.
    """
    sample_idx = list(samples)
    feature_idx = list(features)
    n, p = len(sample_idx), len(feature_idx)
    if n < 3:
        raise TooFewSamples(f"PCA needs at least 3 samples, got {n}")
    if p < 2:
        raise TooFewFeatures(f"PCA needs at least 2 features, got {p}")

    sub = matrix.values[np.ix_(sample_idx, feature_idx)]
    mean = sub.mean(axis=0)
    centered = sub - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)

    k = min(n - 1, p)
    components = _apply_sign_convention(vt[:k].copy())
    variances = np.maximum(s[:k] ** 2 / (n - 1), 0.0)

    mean.setflags(write=False)
    components.setflags(write=False)
    variances.setflags(write=False)
    return PcaBasis(
        feature_subset=tuple(int(i) for i in feature_idx),
        mean=mean,
        components=components,
        variances=variances,
        n_samples_fit=n,
    )


def project(
    basis: PcaBasis,
    matrix: ExpressionMatrix,
    samples: Sequence[int],
    pc_x: int,
    pc_y: int,
) -> Projection2D:
    """Project sample rows onto two components of a fitted basis.

    The samples need not equal the fitting set, which is what lets a frozen
    basis classify new data.
    """
    basis.check_axes(pc_x, pc_y)
    sample_idx = list(samples)
    rows = matrix.values[np.ix_(sample_idx, list(basis.feature_subset))]
    centered = rows - basis.mean
    coords = np.column_stack((centered @ basis.components[pc_x], centered @ basis.components[pc_y]))
    coords.setflags(write=False)
    return Projection2D(
        pc_x=pc_x,
        pc_y=pc_y,
        sample_ids=tuple(matrix.sample_ids[i] for i in sample_idx),
        coords=coords,
    )


def loadings(basis: PcaBasis, pc_x: int, pc_y: int) -> Loadings:
    basis.check_axes(pc_x, pc_y)
    raw_x = basis.components[pc_x]
    raw_y = basis.components[pc_y]
    vectors = np.column_stack((
        raw_x * np.sqrt(basis.variances[pc_x]),
        raw_y * np.sqrt(basis.variances[pc_y]),
    ))
    vectors.setflags(write=False)
    return Loadings(
        feature_indices=basis.feature_subset,
        vectors=vectors,
        raw_x=raw_x,
        raw_y=raw_y,
    )
