"""Shared extractor test fixtures: synthetic corpus + deterministic stub encoder."""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
import pytest

from xnli_extractor.corpus import XNLI15_CODES

STUB_DIM = 12


def write_corpus_tsv(path: Path, rows: int = 5, codes=XNLI15_CODES) -> Path:
    lines = ["\t".join(codes)]
    for i in range(rows):
        lines.append("\t".join(f"{code} sentence {i}" for code in codes))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def corpus_path(tmp_path) -> Path:
    return write_corpus_tsv(tmp_path / "xnli.15way.orig.tsv")


def stub_encode(batch: list[str]):
    """Deterministic fake encoder.

    Each sentence becomes 2 + len(words) tokens: a leading and trailing
    special token plus one token per word, each a hash-seeded vector.
    """
    out = []
    for text in batch:
        words = text.split()
        tokens = []
        for piece in ["<s>", *words, "</s>"]:
            digest = hashlib.sha256(piece.encode()).digest()
            rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
            tokens.append(rng.standard_normal(STUB_DIM).astype(np.float32))
        special = np.zeros(len(tokens), dtype=bool)
        special[0] = special[-1] = True
        out.append((np.vstack(tokens), special))
    return out
