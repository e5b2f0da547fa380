"""Embedding extraction: encoder, pooling, dump assembly.

The encoder interface keeps model loading out of the core logic: an
encoder is a callable mapping a list of sentences to a list of
(token_vectors, special_mask) pairs, padding already stripped. Pooling
then reduces tokens per the config:

    mean  one row per sentence, average of non-special tokens
    cls   one row per sentence, the first token's vector
    none  one row per non-special token (word-level)

Checkpoint aliases: mbert, xlmr, minilm resolve to the standard hub ids.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import XNLI15_CODES
from .dump_writer import write_dump

logger = logging.getLogger(__name__)

MODEL_ALIASES = {
    "mbert": "bert-base-multilingual-cased",
    "xlmr": "xlm-roberta-base",
    "minilm": "microsoft/Multilingual-MiniLM-L12-H384",
}

POOLINGS = ("mean", "cls", "none")


class ExtractionError(Exception):
    """Inference produced unusable output for a sentence."""


@dataclass
class ExtractionConfig:
    model_id: str
    out_path: str | Path
    n_sentences: int = 300
    layer: int | str = "last"
    pooling: str = "mean"
    batch_size: int = 16

    def __post_init__(self):
        self.model_id = MODEL_ALIASES.get(self.model_id, self.model_id)
        if self.pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}, got {self.pooling!r}")
        if self.n_sentences < 1:
            raise ValueError(f"n_sentences must be >= 1, got {self.n_sentences}")


def hf_encoder(model_id: str, layer: int | str = "last", batch_size: int = 16):
    """Encoder backed by a transformers checkpoint on CPU.

    Returns encode(batch) -> [(tokens float32 [len, dim], special bool [len])].
    Sequences longer than the model maximum are truncated; truncations are
    logged once per batch.
    """
    import torch
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModel.from_pretrained(model_id, output_hidden_states=True)
    model.eval()
    max_length = min(getattr(tokenizer, "model_max_length", 512) or 512, 512)

    def encode(batch: list[str]):
        enc = tokenizer(
            batch,
            return_tensors="pt",
            padding=True,
            truncation=True,
            max_length=max_length,
            return_special_tokens_mask=True,
        )
        lengths = enc["attention_mask"].sum(dim=1)
        truncated = int((lengths == max_length).sum())
        if truncated:
            logger.warning("%d of %d sequences truncated at %d tokens", truncated, len(batch), max_length)
        special = enc.pop("special_tokens_mask")
        with torch.no_grad():
            output = model(**enc)
        if layer == "last":
            hidden = output.last_hidden_state
        else:
            hidden = output.hidden_states[layer]
        hidden = hidden.to(torch.float32).cpu().numpy()
        out = []
        for i in range(len(batch)):
            n_tokens = int(lengths[i])
            out.append(
                (
                    hidden[i, :n_tokens].copy(),
                    special[i, :n_tokens].numpy().astype(bool),
                )
            )
        return out

    return encode


def _pool(tokens: np.ndarray, special: np.ndarray, pooling: str) -> np.ndarray:
    """One sentence to its row block: (1, dim) for mean/cls, (k, dim) for none."""
    if tokens.shape[0] == 0:
        raise ExtractionError("tokenizer produced an empty sequence")
    if pooling == "cls":
        return tokens[:1]
    kept = tokens[~special]
    if kept.shape[0] == 0:
        raise ExtractionError("no non-special tokens to pool")
    if pooling == "mean":
        return kept.mean(axis=0, dtype=np.float64).astype(np.float32)[None, :]
    return kept


def extract_rows(
    encode, corpus: dict[str, list[str]], pooling: str, batch_size: int = 16
) -> tuple[np.ndarray, list[tuple[str, int]]]:
    """Run the encoder over the corpus, language by language.

    Languages are processed in the canonical code order; returns the stacked
    row matrix and per-language row counts for the manifest.
    """
    codes = [c for c in XNLI15_CODES if c in corpus]
    codes += sorted(c for c in corpus if c not in XNLI15_CODES)
    blocks: list[np.ndarray] = []
    counts: list[tuple[str, int]] = []
    for code in codes:
        sentences = corpus[code]
        rows: list[np.ndarray] = []
        for at in range(0, len(sentences), batch_size):
            for tokens, special in encode(sentences[at : at + batch_size]):
                rows.append(_pool(tokens, special, pooling))
        block = np.vstack(rows).astype(np.float32)
        blocks.append(block)
        counts.append((code, block.shape[0]))
    return np.vstack(blocks), counts


def extract(
    config: ExtractionConfig, corpus: dict[str, list[str]], encode=None
) -> Path:
    """Produce the dump + manifest for a corpus; returns the dump path.

    ``encode`` defaults to the transformers-backed encoder for
    config.model_id; tests inject deterministic stubs here.
    """
    if encode is None:
        encode = hf_encoder(config.model_id, config.layer, config.batch_size)
    trimmed = {code: text[: config.n_sentences] for code, text in corpus.items()}
    data, counts = extract_rows(encode, trimmed, config.pooling, config.batch_size)
    write_dump(
        data,
        counts,
        config.out_path,
        model_id=config.model_id,
        layer=config.layer,
        pooling=config.pooling,
    )
    logger.info(
        "wrote %s: %d rows x %d dims, %d languages",
        config.out_path, data.shape[0], data.shape[1], len(counts),
    )
    return Path(config.out_path)
