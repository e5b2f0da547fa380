"""Blocked, parallel, deterministic pairwise kernels.

Everything here is built so results are bit-identical for any worker
count: work is split into fixed 256-row blocks, each block's partial
result is computed independently (BLAS calls on identical inputs return
identical bits), and partials are combined sequentially in a fixed block
order with compensated summation. Threads only change *who* computes a
block, never the arithmetic.

Worker count comes from the ``EMBGEOM_WORKERS`` environment variable
(default: logical core count) unless passed explicitly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ZeroNormVectorError

BLOCK_ROWS = 256
# candidate-side tile for the NN scans; internal detail, any fixed value
# yields identical results
CAND_BLOCK = 2048

WORKERS_ENV = "EMBGEOM_WORKERS"


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument wins, then EMBGEOM_WORKERS, then logical cores."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            workers = int(env)
        else:
            workers = os.cpu_count() or 1
    return max(1, int(workers))


def map_blocks(fn, tasks: list, workers: int) -> list:
    """Run fn over tasks, returning results in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def kahan_sum(values) -> float:
    """Compensated summation; order of ``values`` is the caller's contract."""
    total = 0.0
    carry = 0.0
    for v in values:
        y = v - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total


def _block_starts(n: int, block: int) -> list[int]:
    return list(range(0, n, block))


def unit_rows(data: np.ndarray) -> np.ndarray:
    """Rows scaled to unit norm, in float64.

    Rows whose squared norm under- or overflows are pre-scaled by their
    peak magnitude; float32-sourced data never takes that path.
    """
    x = np.asarray(data, dtype=np.float64)
    sq = np.einsum("ij,ij->i", x, x)
    bad = (sq == 0.0) | ~np.isfinite(sq)
    if bad.any():
        peaks = np.abs(x[bad]).max(axis=1)
        zero = np.flatnonzero(~x.any(axis=1))
        if zero.size:
            raise ZeroNormVectorError(f"zero-norm rows: {zero[:8].tolist()}")
        x = x.copy()
        x[bad] = x[bad] / peaks[:, None]
        sq = np.einsum("ij,ij->i", x, x)
    return x / np.sqrt(sq)[:, None]


def pair_dot_sum(unit: np.ndarray, workers: int | None = None) -> tuple[float, int]:
    """Sum of cosines over all unordered distinct row pairs.

    ``unit`` must be unit-norm float64 rows. Each dot is clamped to
    [-1, 1] before summation so the mean stays inside [-1, 1].
    Returns (total, pair_count).
    """
    n = unit.shape[0]
    workers = resolve_workers(workers)
    starts = _block_starts(n, BLOCK_ROWS)
    tasks = [(i, j) for i in starts for j in starts if j >= i]

    def partial(task: tuple[int, int]) -> float:
        i, j = task
        a = unit[i : i + BLOCK_ROWS]
        b = unit[j : j + BLOCK_ROWS]
        g = a @ b.T
        np.clip(g, -1.0, 1.0, out=g)
        if i == j:
            g = np.triu(g, k=1)
        return float(np.sum(g))

    partials = map_blocks(partial, tasks, workers)
    return kahan_sum(partials), n * (n - 1) // 2


@dataclass(frozen=True)
class PreparedPoints:
    """Per-matrix precomputation for a distance metric.

    euclidean: ``x`` is the float64 matrix, ``sq`` its squared row norms;
    distances are squared Euclidean (monotone in the true distance, so
    argmin and ties are unchanged).
    cosine_distance: ``x`` holds unit rows and ``sq`` is None; distances
    are 1 - cosine.
    """

    metric: str
    x: np.ndarray
    sq: np.ndarray | None


def prepare_points(points: np.ndarray, metric: str) -> PreparedPoints:
    if metric == "euclidean":
        x = np.asarray(points, dtype=np.float64)
        sq = np.einsum("ij,ij->i", x, x)
        return PreparedPoints("euclidean", x, sq)
    if metric == "cosine_distance":
        return PreparedPoints("cosine_distance", unit_rows(points), None)
    raise ValueError(f"unknown metric {metric!r}")


def _dist_tile(
    q: PreparedPoints, qs: slice, c: PreparedPoints, cs: slice
) -> np.ndarray:
    """Distance tile between query rows qs and candidate rows cs."""
    g = q.x[qs] @ c.x[cs].T
    if q.metric == "euclidean":
        d = q.sq[qs, None] + c.sq[None, cs] - 2.0 * g
        np.maximum(d, 0.0, out=d)
        return d
    np.clip(g, -1.0, 1.0, out=g)
    return 1.0 - g


def nn_scan(
    q: PreparedPoints,
    c: PreparedPoints,
    c_base: int,
    *,
    exclude_self: bool = False,
    q_base: int = 0,
    workers: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact nearest candidate per query row.

    Returns (best_dist, best_idx) where idx is global (c_base + local row),
    ties resolved to the lowest index. ``exclude_self`` skips candidates
    whose global index equals the query's (q_base + row). With no eligible
    candidates a row gets (inf, -1).
    """
    nq = q.x.shape[0]
    nc = c.x.shape[0]
    workers = resolve_workers(workers)
    best_val = np.full(nq, np.inf)
    best_idx = np.full(nq, -1, dtype=np.int64)

    def scan_block(q0: int) -> None:
        q1 = min(q0 + BLOCK_ROWS, nq)
        qs = slice(q0, q1)
        val = np.full(q1 - q0, np.inf)
        idx = np.full(q1 - q0, -1, dtype=np.int64)
        for c0 in range(0, nc, CAND_BLOCK):
            c1 = min(c0 + CAND_BLOCK, nc)
            d = _dist_tile(q, qs, c, slice(c0, c1))
            if exclude_self:
                # same underlying matrix: mask q_global == c_global
                lo = max(q_base + q0, c_base + c0)
                hi = min(q_base + q1, c_base + c1)
                for g in range(lo, hi):
                    d[g - q_base - q0, g - c_base - c0] = np.inf
            local = np.argmin(d, axis=1)
            dv = d[np.arange(q1 - q0), local]
            better = dv < val
            val[better] = dv[better]
            idx[better] = c_base + c0 + local[better]
        best_val[qs] = val
        best_idx[qs] = idx

    map_blocks(scan_block, _block_starts(nq, BLOCK_ROWS), workers)
    return best_val, best_idx


def nn_cross_both(
    a: PreparedPoints,
    a_base: int,
    b: PreparedPoints,
    b_base: int,
    workers: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Nearest b-row for every a-row and nearest a-row for every b-row.

    One distance tile serves both directions, halving the matmul work
    versus two independent scans. Column minima are combined over query
    blocks in ascending order, so ties still land on the lowest global
    index. Returns (a_val, a_idx, b_val, b_idx).
    """
    na = a.x.shape[0]
    nb = b.x.shape[0]
    workers = resolve_workers(workers)
    a_val = np.full(na, np.inf)
    a_idx = np.full(na, -1, dtype=np.int64)

    def scan_block(q0: int):
        q1 = min(q0 + BLOCK_ROWS, na)
        qs = slice(q0, q1)
        row_val = np.full(q1 - q0, np.inf)
        row_idx = np.full(q1 - q0, -1, dtype=np.int64)
        col_val = np.full(nb, np.inf)
        col_idx = np.full(nb, -1, dtype=np.int64)
        for c0 in range(0, nb, CAND_BLOCK):
            c1 = min(c0 + CAND_BLOCK, nb)
            d = _dist_tile(a, qs, b, slice(c0, c1))
            local = np.argmin(d, axis=1)
            dv = d[np.arange(q1 - q0), local]
            better = dv < row_val
            row_val[better] = dv[better]
            row_idx[better] = b_base + c0 + local[better]
            clocal = np.argmin(d, axis=0)
            cv = d[clocal, np.arange(c1 - c0)]
            col_val[c0:c1] = cv
            col_idx[c0:c1] = a_base + q0 + clocal
        a_val[qs] = row_val
        a_idx[qs] = row_idx
        return col_val, col_idx

    col_partials = map_blocks(scan_block, _block_starts(na, BLOCK_ROWS), workers)

    b_val = np.full(nb, np.inf)
    b_idx = np.full(nb, -1, dtype=np.int64)
    for col_val, col_idx in col_partials:  # fixed ascending query-block order
        better = col_val < b_val
        b_val[better] = col_val[better]
        b_idx[better] = col_idx[better]
    return a_val, a_idx, b_val, b_idx
