"""Anisotropy, cross-lingual similarity, and language separability.

All reductions accumulate in float64 regardless of the float32 storage
dtype, run over fixed 256-row blocks, and are bit-identical for any
worker count (see pairwise.py). Operations are pure functions over an
immutable EmbeddingSet and safe to call concurrently on a shared set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import pairwise
from .errors import (
    AlignmentError,
    DimensionMismatchError,
    InsufficientRowsError,
    SameLanguageError,
    ZeroAnisotropyError,
    ZeroNormVectorError,
)
from .io import EmbeddingSet


class NnMetric(str, Enum):
    """Distance used by the nearest-neighbor search.

    cosine_distance is 1 - cosine(u, v).
    """

    EUCLIDEAN = "euclidean"
    COSINE_DISTANCE = "cosine_distance"


@dataclass(frozen=True)
class AnisotropyResult:
    """Absolute mean cosine over all unordered distinct row pairs."""

    value: float
    pair_count: int


@dataclass(frozen=True)
class LabeledMatrix:
    """Symmetric language-by-language matrix with axis labels.

    kind is "gamma" (similarity index) or "phi" (separability); entries
    are computed once per unordered pair and mirrored, so values[i][j]
    equals values[j][i] exactly.
    """

    codes: tuple[str, ...]
    values: np.ndarray
    kind: str

    def entry(self, a: str, b: str) -> float:
        i = self.codes.index(a)
        j = self.codes.index(b)
        return float(self.values[i, j])


def cosine(u, v) -> float:
    """dot(u, v) / (|u| |v|), accumulated in float64, clamped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionMismatchError(f"vector shapes {u.shape} and {v.shape} differ")
    u, uu = _finite_sq_norm(u)
    v, vv = _finite_sq_norm(v)
    denom = np.sqrt(uu * vv)
    if denom == 0.0 or not np.isfinite(denom):
        # extreme magnitude mix: normalize each side before the dot
        return float(np.clip(np.dot(u / np.sqrt(uu), v / np.sqrt(vv)), -1.0, 1.0))
    # norm product as sqrt(uu*vv): one rounding, so positive scaling stays exact
    return float(np.clip(np.dot(u, v) / denom, -1.0, 1.0))


def _finite_sq_norm(x: np.ndarray) -> tuple[np.ndarray, float]:
    """(possibly rescaled vector, squared norm); rescaling keeps cosine exact
    only on under/overflowing inputs, the common path is untouched."""
    sq = np.dot(x, x)
    if sq == 0.0 or not np.isfinite(sq):
        peak = np.abs(x).max()
        if peak == 0.0:
            raise ZeroNormVectorError("cosine of a zero-norm vector is undefined")
        x = x / peak
        sq = np.dot(x, x)
    return x, sq


def anisotropy(set_: EmbeddingSet, workers: int | None = None) -> AnisotropyResult:
    """Absolute mean cosine over all C(N, 2) pairs of the pooled rows.

    Pools every row of every language; the result is deterministic
    regardless of worker count.
    """
    if set_.count < 2:
        raise InsufficientRowsError(f"anisotropy needs >= 2 rows, got {set_.count}")
    unit = pairwise.unit_rows(set_.data)
    total, pair_count = pairwise.pair_dot_sum(unit, workers)
    return AnisotropyResult(value=abs(total / pair_count), pair_count=pair_count)


def _aligned_mean_cosine(unit_a: np.ndarray, unit_b: np.ndarray) -> float:
    """Mean cosine of sentence-aligned unit rows; fixed summation order."""
    dots = np.einsum("ij,ij->i", unit_a, unit_b)
    np.clip(dots, -1.0, 1.0, out=dots)
    return float(np.sum(dots) / dots.shape[0])


def gamma(
    set_: EmbeddingSet, l1: str, l2: str, aniso: AnisotropyResult
) -> float:
    """Cross-lingual similarity index of a language pair.

    Mean cosine of the aligned translation pairs divided by the model's
    anisotropy; lives in [-1/A, 1/A]. Requires equal, sentence-aligned
    row counts (parallel corpus).
    """
    span_a = set_.span(l1)
    span_b = set_.span(l2)
    if aniso.value == 0.0:
        raise ZeroAnisotropyError("anisotropy is zero; similarity index undefined")
    if l1 == l2:
        return 1.0 / aniso.value
    n_a = span_a.stop - span_a.start
    n_b = span_b.stop - span_b.start
    if n_a != n_b:
        raise AlignmentError(
            f"{l1!r} has {n_a} rows but {l2!r} has {n_b}; aligned counts required"
        )
    unit_a = pairwise.unit_rows(set_.data[span_a])
    unit_b = pairwise.unit_rows(set_.data[span_b])
    return _aligned_mean_cosine(unit_a, unit_b) / aniso.value


def gamma_matrix(set_: EmbeddingSet, workers: int | None = None) -> LabeledMatrix:
    """All pairwise similarity indices; anisotropy computed once.

    Diagonal entries are 1/anisotropy, off-diagonals computed once per
    unordered pair and mirrored.
    """
    aniso = anisotropy(set_, workers)
    if aniso.value == 0.0:
        raise ZeroAnisotropyError("anisotropy is zero; similarity index undefined")
    codes = set_.codes
    m = len(codes)
    units = {c: pairwise.unit_rows(set_.rows(c)) for c in codes}
    counts = {c: set_.language_count(c) for c in codes}
    distinct = set(counts.values())
    if len(distinct) > 1:
        raise AlignmentError(
            f"similarity matrix requires equal per-language counts, got {sorted(distinct)}"
        )

    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]

    def entry(pair: tuple[int, int]) -> float:
        i, j = pair
        return _aligned_mean_cosine(units[codes[i]], units[codes[j]]) / aniso.value

    results = pairwise.map_blocks(entry, pairs, pairwise.resolve_workers(workers))
    values = np.empty((m, m), dtype=np.float64)
    np.fill_diagonal(values, 1.0 / aniso.value)
    for (i, j), v in zip(pairs, results):
        values[i, j] = v
        values[j, i] = v
    return LabeledMatrix(codes=codes, values=values, kind="gamma")


def _as_metric(metric) -> str:
    if isinstance(metric, NnMetric):
        return metric.value
    return NnMetric(metric).value


def nearest_neighbor_labels(
    points: np.ndarray,
    labels,
    metric: NnMetric | str = NnMetric.EUCLIDEAN,
    workers: int | None = None,
) -> np.ndarray:
    """Label of each row's exact nearest neighbor (self excluded).

    Exact brute-force search; ties go to the lowest row index.
    """
    points = np.asarray(points)
    if points.ndim != 2:
        raise DimensionMismatchError(f"points must be 2-D, got shape {points.shape}")
    n = points.shape[0]
    if n < 2:
        raise InsufficientRowsError(f"nearest-neighbor search needs >= 2 rows, got {n}")
    labels = np.asarray(labels)
    if labels.shape[0] != n:
        raise DimensionMismatchError(f"{n} rows but {labels.shape[0]} labels")
    prep = pairwise.prepare_points(points, _as_metric(metric))
    _, idx = pairwise.nn_scan(prep, prep, 0, exclude_self=True, workers=workers)
    return labels[idx]


def _match_counts(
    self_val: np.ndarray,
    self_idx: np.ndarray,
    cross_val: np.ndarray,
    cross_idx: np.ndarray,
) -> int:
    """Rows whose nearest neighbor is same-language.

    The nearest neighbor over the union is the closer of the within- and
    cross-language minima; on an exact tie the lower global row index
    wins, which is well defined because the two spans are disjoint.
    """
    same = (self_val < cross_val) | ((self_val == cross_val) & (self_idx < cross_idx))
    return int(np.count_nonzero(same))


def _pair_gsi(
    prep_a: pairwise.PreparedPoints,
    base_a: int,
    self_a: tuple[np.ndarray, np.ndarray],
    prep_b: pairwise.PreparedPoints,
    base_b: int,
    self_b: tuple[np.ndarray, np.ndarray],
    workers: int | None,
) -> float:
    a_val, a_idx, b_val, b_idx = pairwise.nn_cross_both(
        prep_a, base_a, prep_b, base_b, workers
    )
    matches = _match_counts(self_a[0], self_a[1], a_val, a_idx)
    matches += _match_counts(self_b[0], self_b[1], b_val, b_idx)
    return matches / (prep_a.x.shape[0] + prep_b.x.shape[0])


def _language_prep(set_: EmbeddingSet, code: str, metric: str):
    span = set_.span(code)
    prep = pairwise.prepare_points(set_.data[span], metric)
    return prep, span.start


def _language_self_min(prep, base, workers):
    return pairwise.nn_scan(
        prep, prep, base, exclude_self=True, q_base=base, workers=workers
    )


def gsi(
    set_: EmbeddingSet,
    l1: str,
    l2: str,
    metric: NnMetric | str = NnMetric.EUCLIDEAN,
    workers: int | None = None,
) -> float:
    """Fraction of points in the two languages' union whose nearest
    neighbor is same-language; in [0, 1]."""
    if l1 == l2:
        raise SameLanguageError("separability of a language against itself is fixed at 1.0")
    metric = _as_metric(metric)
    prep_a, base_a = _language_prep(set_, l1, metric)
    prep_b, base_b = _language_prep(set_, l2, metric)
    self_a = _language_self_min(prep_a, base_a, workers)
    self_b = _language_self_min(prep_b, base_b, workers)
    return _pair_gsi(prep_a, base_a, self_a, prep_b, base_b, self_b, workers)


def phi_matrix(
    set_: EmbeddingSet,
    metric: NnMetric | str = NnMetric.EUCLIDEAN,
    workers: int | None = None,
) -> LabeledMatrix:
    """All pairwise separability values; diagonal fixed at 1.0.

    Within-language nearest-neighbor distances are computed once per
    language and shared across the pairs, so the full matrix costs one
    cross scan per unordered pair.
    """
    codes = set_.codes
    m = len(codes)
    if m < 2:
        raise InsufficientRowsError(f"separability matrix needs >= 2 languages, got {m}")
    metric = _as_metric(metric)
    preps = {c: _language_prep(set_, c, metric) for c in codes}
    selfs = {
        c: _language_self_min(preps[c][0], preps[c][1], workers) for c in codes
    }
    values = np.empty((m, m), dtype=np.float64)
    np.fill_diagonal(values, 1.0)
    for i in range(m):
        for j in range(i + 1, m):
            a, b = codes[i], codes[j]
            v = _pair_gsi(
                preps[a][0], preps[a][1], selfs[a],
                preps[b][0], preps[b][1], selfs[b],
                workers,
            )
            values[i, j] = v
            values[j, i] = v
    return LabeledMatrix(codes=codes, values=values, kind="phi")
