"""Shared fixtures and synthetic dump builders."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # tests import oracles.py

from embgeom.io import EmbeddingSet, Manifest, manifest_for, write_embeddings


def make_parallel_set(
    seed: int,
    languages: int = 3,
    sentences: int = 20,
    dim: int = 8,
    pooling: str = "mean",
) -> tuple[EmbeddingSet, Manifest]:
    """Random sentence-aligned set; languages named l0, l1, ..."""
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((languages * sentences, dim)).astype(np.float32)
    spec = [(f"l{i}", sentences) for i in range(languages)]
    manifest = manifest_for(data, spec, pooling=pooling)
    return EmbeddingSet.from_manifest(data, manifest), manifest


def write_dump(tmp_path: Path, set_: EmbeddingSet, manifest: Manifest, name="dump.embgeom"):
    path = tmp_path / name
    write_embeddings(set_, manifest, path)
    return path


@pytest.fixture
def parallel_set():
    return make_parallel_set(seed=7)[0]
