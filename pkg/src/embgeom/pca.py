"""Principal components of a language group's embeddings.

Covariance is accumulated in float64 from a single matmul and decomposed
with a dense symmetric eigensolver (d is at most ~1024 while N can be
large, so the d-by-d problem is the cheap part). A deterministic sign
convention makes projections reproducible across runs: each component's
largest-magnitude entry is made positive, ties resolved to the lowest
index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComponentCountError, DimensionMismatchError, EigensolverError, PcaError
from .io import EmbeddingSet


@dataclass(frozen=True)
class PcaResult:
    """Top-k principal axes and, once projected, the coordinates.

    components: (k, d) orthonormal rows; eigenvalues: descending,
    clamped at zero; explained_ratio: eigenvalue share of total variance.
    coordinates/row_labels are filled by the projection step and are
    None straight out of top_components.
    """

    components: np.ndarray
    eigenvalues: np.ndarray
    explained_ratio: np.ndarray
    coordinates: np.ndarray | None = None
    row_labels: tuple[str, ...] | None = None


def mean_center(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Subtract column means; returns (centered, mean) in float64."""
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise PcaError(f"expected a non-empty 2-D matrix, got shape {x.shape}")
    mean = x.mean(axis=0)
    return x - mean, mean


def _apply_sign_convention(components: np.ndarray) -> np.ndarray:
    for row in components:
        peak = np.argmax(np.abs(row))  # first occurrence on ties
        if row[peak] < 0:
            np.negative(row, out=row)
    return components


def top_components(centered: np.ndarray, k: int) -> PcaResult:
    """Leading k eigenvectors of the sample covariance (N-1 divisor).

    Input must already be mean-centered. Degenerate input with zero total
    variance gets the first k canonical basis vectors and all-zero
    eigenvalues/ratios by convention.
    """
    x = np.asarray(centered, dtype=np.float64)
    n, d = x.shape
    if n < 2:
        raise PcaError(f"need at least 2 rows, got {n}")
    limit = min(n - 1, d)
    if not 1 <= k <= limit:
        raise ComponentCountError(f"k must be in [1, {limit}], got {k}")

    cov = (x.T @ x) / (n - 1)
    total_var = float(np.trace(cov))
    if total_var == 0.0:
        return PcaResult(
            components=np.eye(d)[:k],
            eigenvalues=np.zeros(k),
            explained_ratio=np.zeros(k),
        )

    try:
        eigvals, eigvecs = np.linalg.eigh(cov)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    order = np.argsort(-eigvals, kind="stable")[:k]
    eigvals = np.maximum(eigvals[order], 0.0)
    components = _apply_sign_convention(eigvecs[:, order].T.copy())
    return PcaResult(
        components=components,
        eigenvalues=eigvals,
        explained_ratio=eigvals / total_var,
    )


def project(centered: np.ndarray, components: np.ndarray) -> np.ndarray:
    """Coordinates of centered rows on the component axes."""
    x = np.asarray(centered, dtype=np.float64)
    c = np.asarray(components, dtype=np.float64)
    if x.ndim != 2 or c.ndim != 2 or x.shape[1] != c.shape[1]:
        raise DimensionMismatchError(
            f"cannot project shape {x.shape} onto components of shape {c.shape}"
        )
    return x @ c.T


def fit_language_group(
    set_: EmbeddingSet, codes: list[str], k: int = 3
) -> PcaResult:
    """Fit PCA on the union of the given languages' rows and project them.

    Rows are stacked in the order the codes are given; row_labels carries
    the language code of each projected row.
    """
    blocks = [set_.rows(code) for code in codes]  # raises on unknown code
    labels: list[str] = []
    for code, block in zip(codes, blocks):
        labels.extend([code] * block.shape[0])
    stacked = np.vstack(blocks)
    centered, _ = mean_center(stacked)
    result = top_components(centered, k)
    coords = project(centered, result.components)
    return PcaResult(
        components=result.components,
        eigenvalues=result.eigenvalues,
        explained_ratio=result.explained_ratio,
        coordinates=coords,
        row_labels=tuple(labels),
    )
