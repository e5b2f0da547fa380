"""Real-checkpoint acceptance: needs model weights and the 15-way corpus.

These tests exercise the three reference checkpoints over the first 300
XNLI sentences and check the qualitative orderings on the resulting
matrices (no numeric tolerance is claimed on absolute values). They skip,
with the reason shown, when the corpus file or the checkpoints are not
available locally and cannot be downloaded.

Set XNLI15_PATH to the xnli.15way.orig.tsv location to enable them.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

import embgeom
from xnli_extractor.corpus import load_corpus
from xnli_extractor.extract import ExtractionConfig, extract

CORPUS_PATH = Path(os.environ.get("XNLI15_PATH", "xnli.15way.orig.tsv"))

CHECKPOINTS = [
    ("bert-base-multilingual-cased", 768),
    ("xlm-roberta-base", 768),
    ("microsoft/Multilingual-MiniLM-L12-H384", 384),
]


def _require_corpus():
    if not CORPUS_PATH.exists():
        pytest.skip(f"15-way corpus not available at {CORPUS_PATH} (set XNLI15_PATH)")


def _load_encoder(model_id: str):
    from xnli_extractor.extract import hf_encoder

    try:
        return hf_encoder(model_id)
    except Exception as exc:  # offline hub, missing cache, ...
        pytest.skip(f"checkpoint {model_id} unavailable: {type(exc).__name__}: {exc}")


@pytest.fixture(scope="module")
def mbert_dump(tmp_path_factory):
    _require_corpus()
    encode = _load_encoder("bert-base-multilingual-cased")
    corpus = load_corpus(CORPUS_PATH, 300)
    out = tmp_path_factory.mktemp("dumps") / "mbert.embgeom"
    config = ExtractionConfig(
        model_id="bert-base-multilingual-cased", out_path=out, n_sentences=300
    )
    extract(config, corpus, encode=encode)
    return out


@pytest.mark.parametrize("model_id,dim", CHECKPOINTS)
def test_each_checkpoint_dump_validates(model_id, dim, tmp_path):
    _require_corpus()
    encode = _load_encoder(model_id)
    corpus = load_corpus(CORPUS_PATH, 300)
    out = tmp_path / "dump.embgeom"
    extract(
        ExtractionConfig(model_id=model_id, out_path=out, n_sentences=300),
        corpus,
        encode=encode,
    )
    set_, manifest = embgeom.read_embeddings(out)
    assert embgeom.validate_manifest(manifest, set_.count) == []
    assert set_.dim == dim
    assert set_.count == 4500


def test_mbert_gamma_qualitative_orderings(mbert_dump):
    set_, _ = embgeom.read_embeddings(mbert_dump)
    aniso = embgeom.anisotropy(set_)
    matrix = embgeom.gamma_matrix(set_)
    assert np.array_equal(matrix.values, matrix.values.T)
    assert np.all(np.diag(matrix.values) == 1.0 / aniso.value)
    assert matrix.entry("en", "de") > matrix.entry("en", "sw")
    assert matrix.entry("hi", "ur") > matrix.entry("hi", "zh")


def test_mbert_phi_es_fr_below_median(mbert_dump):
    set_, _ = embgeom.read_embeddings(mbert_dump)
    matrix = embgeom.phi_matrix(set_)
    off_diagonal = matrix.values[~np.eye(len(matrix.codes), dtype=bool)]
    assert matrix.entry("es", "fr") < np.median(off_diagonal)
