"""Family-level aggregation and CSV/JSON serialization of results.

Matrix CSVs carry full float64 precision (17 significant digits) so a
re-parsed matrix matches the in-memory values; an optional digit count
rounds for presentation only.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass

import numpy as np

from .errors import FamilyCoverageError
from .io import FamilyMap
from .metrics import AnisotropyResult, LabeledMatrix


def _fmt(value: float, digits: int | None) -> str:
    if digits is None:
        return format(value, ".17g")
    return format(round(value, digits), f".{digits}f")


def matrix_to_csv(matrix: LabeledMatrix, digits: int | None = None) -> str:
    """Language-labeled CSV: header row of codes, one row per language."""
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["lang", *matrix.codes])
    for i, code in enumerate(matrix.codes):
        writer.writerow([code, *(_fmt(v, digits) for v in matrix.values[i])])
    return out.getvalue()


def matrix_from_csv(text: str, kind: str) -> LabeledMatrix:
    """Parse a matrix CSV back into a LabeledMatrix."""
    rows = list(csv.reader(_io.StringIO(text)))
    codes = tuple(rows[0][1:])
    values = np.array([[float(v) for v in row[1:]] for row in rows[1:]], dtype=np.float64)
    return LabeledMatrix(codes=codes, values=values, kind=kind)


def matrix_to_json_dict(matrix: LabeledMatrix, digits: int | None = None) -> dict:
    values = matrix.values
    if digits is not None:
        values = np.round(values, digits)
    return {
        "kind": matrix.kind,
        "codes": list(matrix.codes),
        "values": [[float(v) for v in row] for row in values],
    }


def coordinates_to_csv(row_labels, coordinates: np.ndarray) -> str:
    """Projection CSV: language_code, sentence_index, pc1..pck.

    sentence_index restarts at 0 for each language and follows row order
    within the language's span.
    """
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    k = coordinates.shape[1]
    writer.writerow(["language_code", "sentence_index", *(f"pc{j + 1}" for j in range(k))])
    sentence = 0
    prev = None
    for label, row in zip(row_labels, coordinates):
        sentence = sentence + 1 if label == prev else 0
        prev = label
        writer.writerow([label, sentence, *(format(v, ".17g") for v in row)])
    return out.getvalue()


@dataclass(frozen=True)
class FamilyEntry:
    family: str
    languages: tuple[str, ...]
    intra_gamma_mean: float | None
    intra_phi_mean: float | None


@dataclass(frozen=True)
class FamilyReport:
    """Per-family means plus global cross-family aggregates.

    Intra-family means cover distinct-language pairs inside a family;
    families with a single language carry None. The per-language list
    ranks mean off-diagonal similarity ascending, a diagnostic for
    languages the model represents poorly.
    """

    families: tuple[FamilyEntry, ...]
    inter_family_gamma_mean: float | None
    inter_family_phi_mean: float | None
    anisotropy: float
    per_language_gamma: tuple[tuple[str, float], ...]

    def to_dict(self) -> dict:
        return {
            "families": [
                {
                    "family": f.family,
                    "languages": list(f.languages),
                    "intra_gamma_mean": f.intra_gamma_mean,
                    "intra_phi_mean": f.intra_phi_mean,
                }
                for f in self.families
            ],
            "global": {
                "inter_family_gamma_mean": self.inter_family_gamma_mean,
                "inter_family_phi_mean": self.inter_family_phi_mean,
                "anisotropy": self.anisotropy,
            },
            "per_language_gamma": [
                {"code": code, "mean_offdiag_gamma": value}
                for code, value in self.per_language_gamma
            ],
        }


def _pair_mean(matrix: LabeledMatrix, pairs: list[tuple[int, int]]) -> float | None:
    if not pairs:
        return None
    return float(sum(matrix.values[i, j] for i, j in pairs) / len(pairs))


def build_family_report(
    gamma: LabeledMatrix,
    phi: LabeledMatrix,
    aniso: AnisotropyResult,
    family_map: FamilyMap,
) -> FamilyReport:
    """Aggregate similarity/separability matrices by linguistic family."""
    codes = gamma.codes
    missing = family_map.missing_codes(codes)
    if missing:
        raise FamilyCoverageError(missing)

    by_family: dict[str, list[int]] = {}
    for i, code in enumerate(codes):
        by_family.setdefault(family_map.family(code), []).append(i)

    entries = []
    for family in sorted(by_family):
        members = by_family[family]
        pairs = [
            (members[a], members[b])
            for a in range(len(members))
            for b in range(a + 1, len(members))
        ]
        entries.append(
            FamilyEntry(
                family=family,
                languages=tuple(codes[i] for i in members),
                intra_gamma_mean=_pair_mean(gamma, pairs),
                intra_phi_mean=_pair_mean(phi, pairs),
            )
        )

    family_of = {i: family_map.family(code) for i, code in enumerate(codes)}
    inter_pairs = [
        (i, j)
        for i in range(len(codes))
        for j in range(i + 1, len(codes))
        if family_of[i] != family_of[j]
    ]
    per_language = []
    for i, code in enumerate(codes):
        others = [gamma.values[i, j] for j in range(len(codes)) if j != i]
        per_language.append((code, float(sum(others) / len(others))))
    per_language.sort(key=lambda item: (item[1], item[0]))

    return FamilyReport(
        families=tuple(entries),
        inter_family_gamma_mean=_pair_mean(gamma, inter_pairs),
        inter_family_phi_mean=_pair_mean(phi, inter_pairs),
        anisotropy=aniso.value,
        per_language_gamma=tuple(per_language),
    )
