"""EMBGEOM1 dump writer.

Implements the published byte layout directly so the extractor has no
code dependency on the analysis toolkit; the file format is the whole
contract between the two:

    bytes 0..7    ASCII "EMBGEOM1"
    bytes 8..11   u32 version = 1   (little-endian)
    bytes 12..15  u32 dtype = 0     (float32)
    bytes 16..19  u32 dim
    bytes 20..27  u64 count
    payload       count * dim little-endian float32, row-major

plus a ``<path>.manifest.json`` sidecar with model_id, layer, pooling,
dim, languages [{code, start_row, count}].
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np


class DumpValidationError(Exception):
    """Rows violate the dump invariants (finite, nonzero norm)."""


def write_dump(
    data: np.ndarray,
    language_counts: list[tuple[str, int]],
    path: str | Path,
    *,
    model_id: str,
    layer: int | str,
    pooling: str,
) -> None:
    """Write matrix + manifest; validates the invariants the reader enforces."""
    data = np.ascontiguousarray(data, dtype=np.float32)
    if data.ndim != 2:
        raise DumpValidationError(f"matrix must be 2-D, got shape {data.shape}")
    count, dim = data.shape
    if sum(c for _, c in language_counts) != count:
        raise DumpValidationError(
            f"language counts sum to {sum(c for _, c in language_counts)}, matrix has {count} rows"
        )
    if not np.isfinite(data).all():
        raise DumpValidationError("matrix contains NaN or infinite values")
    norms = np.linalg.norm(data.astype(np.float64), axis=1)
    if np.any(norms == 0.0):
        raise DumpValidationError(
            f"zero-norm rows at {np.flatnonzero(norms == 0.0)[:8].tolist()}"
        )

    languages = []
    start = 0
    for code, n in language_counts:
        languages.append({"code": code, "start_row": start, "count": n})
        start += n

    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<8sIIIQ", b"EMBGEOM1", 1, 0, dim, count))
        fh.write(data.astype("<f4", copy=False).tobytes(order="C"))
    manifest = {
        "model_id": model_id,
        "layer": layer,
        "pooling": pooling,
        "dim": dim,
        "languages": languages,
    }
    sidecar = path.with_name(path.name + ".manifest.json")
    sidecar.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
