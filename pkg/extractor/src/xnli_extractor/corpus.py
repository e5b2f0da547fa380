"""XNLI-15way corpus loading.

The distribution ships a single TSV (``xnli.15way.orig.tsv``) whose header
names the 15 language columns and whose rows are mutual translations, so
row i of every column is sentence i.
"""

from __future__ import annotations

import csv
from pathlib import Path

# canonical column/span order used for every dump (alphabetical by code)
XNLI15_CODES = (
    "ar", "bg", "de", "el", "en", "es", "fr", "hi",
    "ru", "sw", "th", "tr", "ur", "vi", "zh",
)


class CorpusError(Exception):
    """Corpus file is missing languages or rows."""


def load_corpus(path: str | Path, n: int = 300) -> dict[str, list[str]]:
    """First n aligned sentences per language from the 15-way TSV.

    Returns {code: [sentence, ...]} with all 15 codes present and each
    list exactly n long, order preserved.
    """
    if n < 1:
        raise CorpusError(f"need at least 1 sentence, got n={n}")
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is None:
            raise CorpusError(f"{path} is empty")
        columns = {code.strip(): i for i, code in enumerate(header)}
        missing = [code for code in XNLI15_CODES if code not in columns]
        if missing:
            raise CorpusError(f"{path} lacks language columns: {missing}")
        sentences: dict[str, list[str]] = {code: [] for code in XNLI15_CODES}
        for row in reader:
            if len(sentences["en"]) == n:
                break
            for code in XNLI15_CODES:
                sentences[code].append(row[columns[code]])
    short = len(sentences["en"])
    if short < n:
        raise CorpusError(f"{path} has only {short} rows, need {n}")
    return sentences
