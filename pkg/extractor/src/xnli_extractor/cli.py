"""Extraction command line.

    xnli-extract --model mbert --n 300 --pooling mean --layer last \
        --corpus xnli.15way.orig.tsv --out mbert.embgeom
"""

from __future__ import annotations

import argparse
import logging
import sys

from .corpus import CorpusError, load_corpus
from .dump_writer import DumpValidationError
from .extract import ExtractionConfig, ExtractionError, MODEL_ALIASES, extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xnli-extract",
        description="Dump multilingual transformer embeddings of the XNLI-15way sample.",
    )
    parser.add_argument(
        "--model",
        required=True,
        help=f"checkpoint id or alias ({', '.join(MODEL_ALIASES)})",
    )
    parser.add_argument("--n", type=int, default=300, help="sentences per language")
    parser.add_argument("--pooling", choices=("mean", "cls", "none"), default="mean")
    parser.add_argument("--layer", default="last", help="'last' or a hidden-state index")
    parser.add_argument("--corpus", default="xnli.15way.orig.tsv", help="15-way TSV path")
    parser.add_argument("--out", required=True, help="output dump path")
    parser.add_argument("--batch-size", type=int, default=16)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    layer = args.layer if args.layer == "last" else int(args.layer)
    try:
        corpus = load_corpus(args.corpus, args.n)
        config = ExtractionConfig(
            model_id=args.model,
            out_path=args.out,
            n_sentences=args.n,
            layer=layer,
            pooling=args.pooling,
            batch_size=args.batch_size,
        )
        extract(config, corpus)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 3
    except (CorpusError, DumpValidationError, ExtractionError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
