"""EMBGEOM1 embedding dump format: types, reader, writer, validation.

File layout (all integers little-endian, independent of host byte order):

    bytes 0..7    ASCII magic "EMBGEOM1"
    bytes 8..11   u32 version, currently 1
    bytes 12..15  u32 dtype, 0 = float32
    bytes 16..19  u32 dim
    bytes 20..27  u64 count
    bytes 28..    count * dim little-endian IEEE-754 float32, row-major

A sidecar manifest lives next to the dump at ``<path>.manifest.json`` with
keys model_id, layer, pooling, dim, languages (array of
``{code, start_row, count}``).

Loading is single-threaded; the returned matrix is marked read-only so a
loaded set can be shared freely across threads.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    ManifestError,
    ManifestMismatchError,
    MissingManifestError,
    NonFiniteValueError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    VersionMismatchError,
    ZeroNormRowError,
)

MAGIC = b"EMBGEOM1"
VERSION = 1
DTYPE_FLOAT32 = 0
HEADER_SIZE = 28
HEADER_STRUCT = struct.Struct("<8sIIIQ")

POOLINGS = ("mean", "cls", "none")


@dataclass(frozen=True)
class LanguageSpan:
    """Contiguous block of rows belonging to one language."""

    code: str
    start_row: int
    count: int


@dataclass(frozen=True)
class Manifest:
    """Provenance and row layout of a dump.

    ``layer`` is an integer index or the string "last"; ``pooling`` is one
    of "mean", "cls" (sentence-level) or "none" (word-level).
    """

    model_id: str
    layer: int | str
    pooling: str
    dim: int
    languages: tuple[LanguageSpan, ...]

    @property
    def total_rows(self) -> int:
        return sum(lang.count for lang in self.languages)

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "layer": self.layer,
            "pooling": self.pooling,
            "dim": self.dim,
            "languages": [
                {"code": l.code, "start_row": l.start_row, "count": l.count}
                for l in self.languages
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Manifest":
        try:
            languages = tuple(
                LanguageSpan(str(l["code"]), int(l["start_row"]), int(l["count"]))
                for l in obj["languages"]
            )
            return cls(
                model_id=str(obj["model_id"]),
                layer=obj["layer"],
                pooling=str(obj["pooling"]),
                dim=int(obj["dim"]),
                languages=languages,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError([f"malformed manifest: {exc!r}"]) from exc


@dataclass(frozen=True)
class EmbeddingSet:
    """Validated dense embedding matrix with per-row language labels.

    ``data`` is a read-only (count, dim) float32 array; ``labels[i]`` indexes
    into ``codes`` and gives row i's language. Rows of one language are
    contiguous, so ``span(code)`` returns a slice.
    """

    dim: int
    count: int
    data: np.ndarray
    labels: np.ndarray
    codes: tuple[str, ...]
    _spans: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_manifest(cls, data: np.ndarray, manifest: Manifest) -> "EmbeddingSet":
        data = np.ascontiguousarray(data, dtype=np.float32)
        violations = validate_manifest(manifest, data.shape[0])
        if violations:
            raise ManifestError(violations)
        labels = np.empty(data.shape[0], dtype=np.int32)
        spans = {}
        for idx, lang in enumerate(manifest.languages):
            labels[lang.start_row : lang.start_row + lang.count] = idx
            spans[lang.code] = slice(lang.start_row, lang.start_row + lang.count)
        data.setflags(write=False)
        labels.setflags(write=False)
        return cls(
            dim=data.shape[1],
            count=data.shape[0],
            data=data,
            labels=labels,
            codes=tuple(lang.code for lang in manifest.languages),
            _spans=spans,
        )

    @classmethod
    def from_arrays(
        cls,
        data: np.ndarray,
        languages: list[tuple[str, int]],
        pooling: str = "mean",
    ) -> "EmbeddingSet":
        """Build a set from a matrix and ordered (code, count) pairs.

        Use pooling="none" for word-level sets with unequal counts.
        """
        manifest = manifest_for(data, languages, pooling=pooling)
        return cls.from_manifest(data, manifest)

    def span(self, code: str) -> slice:
        try:
            return self._spans[code]
        except KeyError:
            from .errors import UnknownLanguageError

            raise UnknownLanguageError(f"unknown language code: {code!r}") from None

    def rows(self, code: str) -> np.ndarray:
        return self.data[self.span(code)]

    def language_count(self, code: str) -> int:
        s = self.span(code)
        return s.stop - s.start


@dataclass(frozen=True)
class FamilyMap:
    """Language code -> linguistic family name."""

    entries: dict[str, str]

    def family(self, code: str) -> str:
        return self.entries[code]

    def missing_codes(self, codes) -> list[str]:
        return [c for c in codes if c not in self.entries]


def manifest_for(
    data: np.ndarray,
    languages: list[tuple[str, int]],
    model_id: str = "synthetic",
    layer: int | str = "last",
    pooling: str = "mean",
) -> Manifest:
    """Convenience manifest builder for in-memory matrices."""
    spans = []
    start = 0
    for code, count in languages:
        spans.append(LanguageSpan(code, start, count))
        start += count
    return Manifest(
        model_id=model_id,
        layer=layer,
        pooling=pooling,
        dim=int(data.shape[1]),
        languages=tuple(spans),
    )


def manifest_path_for(path: str | Path) -> Path:
    """Sidecar manifest path: the dump path with '.manifest.json' appended."""
    path = Path(path)
    return path.with_name(path.name + ".manifest.json")


def validate_manifest(manifest: Manifest, n_rows: int) -> list[str]:
    """Check every manifest invariant against a row count.

    Returns a list of human-readable violations; empty iff the manifest is
    valid. Nothing is raised so callers can report all problems at once.
    """
    violations: list[str] = []
    if manifest.dim < 1:
        violations.append(f"dim must be positive, got {manifest.dim}")
    if manifest.pooling not in POOLINGS:
        violations.append(
            f"pooling must be one of {POOLINGS}, got {manifest.pooling!r}"
        )
    if not (manifest.layer == "last" or isinstance(manifest.layer, int)):
        violations.append(f"layer must be an integer or 'last', got {manifest.layer!r}")
    if not manifest.languages:
        violations.append("manifest declares no languages")
        return violations

    seen: set[str] = set()
    for lang in manifest.languages:
        if lang.code in seen:
            violations.append(f"duplicate language code {lang.code!r}")
        seen.add(lang.code)
        if lang.count < 1:
            violations.append(f"language {lang.code!r} has non-positive count {lang.count}")

    first = manifest.languages[0]
    if first.start_row != 0:
        violations.append(
            f"first span must start at row 0, {first.code!r} starts at {first.start_row}"
        )
    for prev, cur in zip(manifest.languages, manifest.languages[1:]):
        prev_end = prev.start_row + prev.count
        if cur.start_row < prev_end:
            violations.append(
                f"span overlap: {cur.code!r} starts at {cur.start_row}, "
                f"{prev.code!r} ends at {prev_end}"
            )
        elif cur.start_row > prev_end:
            violations.append(
                f"span gap: {cur.code!r} starts at {cur.start_row}, "
                f"{prev.code!r} ends at {prev_end}"
            )
    last = manifest.languages[-1]
    end = last.start_row + last.count
    if end != n_rows:
        violations.append(f"spans cover [0, {end}) but the matrix has {n_rows} rows")

    if manifest.pooling in ("mean", "cls"):
        counts = {lang.count for lang in manifest.languages}
        if len(counts) > 1:
            violations.append(
                "sentence-level dump requires identical per-language counts, "
                f"got {sorted(counts)}"
            )
    return violations


def _validate_matrix(data: np.ndarray) -> None:
    if data.ndim != 2:
        raise ManifestMismatchError(f"matrix must be 2-D, got shape {data.shape}")
    if not np.isfinite(data).all():
        bad = np.argwhere(~np.isfinite(data))[0]
        raise NonFiniteValueError(
            f"non-finite value at row {bad[0]}, column {bad[1]}"
        )
    # norms in float64 so tiny float32 rows do not underflow to zero
    norms = np.linalg.norm(data.astype(np.float64, copy=False), axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroNormRowError(f"rows with zero Euclidean norm: {zero[:8].tolist()}")


def write_embeddings(set_: EmbeddingSet, manifest: Manifest, path: str | Path) -> None:
    """Write a validated dump + sidecar manifest at ``path``.

    Raises on any set/manifest inconsistency rather than writing a file
    that would fail to load.
    """
    data = np.ascontiguousarray(set_.data, dtype=np.float32)
    _validate_matrix(data)
    if manifest.dim != data.shape[1]:
        raise ManifestMismatchError(
            f"manifest dim {manifest.dim} != matrix dim {data.shape[1]}"
        )
    violations = validate_manifest(manifest, data.shape[0])
    if violations:
        raise ManifestError(violations)
    if tuple(l.code for l in manifest.languages) != set_.codes:
        raise ManifestMismatchError(
            "manifest language order does not match the set's codes"
        )

    path = Path(path)
    header = HEADER_STRUCT.pack(
        MAGIC, VERSION, DTYPE_FLOAT32, data.shape[1], data.shape[0]
    )
    payload = data.astype("<f4", copy=False).tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
    with open(manifest_path_for(path), "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=2)
        fh.write("\n")


def read_embeddings(path: str | Path) -> tuple[EmbeddingSet, Manifest]:
    """Load and fully validate a dump; fails loudly on any violation."""
    path = Path(path)
    raw = path.read_bytes()

    if len(raw) < len(MAGIC):
        raise TruncatedPayloadError(f"file is {len(raw)} bytes, shorter than the magic")
    if raw[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"bad magic {raw[:len(MAGIC)]!r}, expected {MAGIC!r}")
    if len(raw) < HEADER_SIZE:
        raise TruncatedPayloadError(
            f"file is {len(raw)} bytes, shorter than the {HEADER_SIZE}-byte header"
        )
    _, version, dtype, dim, count = HEADER_STRUCT.unpack_from(raw, 0)
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}, expected {VERSION}")
    if dtype != DTYPE_FLOAT32:
        raise UnsupportedDtypeError(f"unsupported dtype code {dtype}, expected 0 (float32)")
    if dim < 1:
        raise ManifestError([f"header dim must be positive, got {dim}"])

    expected = HEADER_SIZE + count * dim * 4
    if len(raw) < expected:
        raise TruncatedPayloadError(
            f"payload needs {count}*{dim}*4 bytes, file has {len(raw) - HEADER_SIZE}"
        )
    if len(raw) > expected:
        raise TrailingDataError(f"{len(raw) - expected} unexpected bytes after payload")

    data = (
        np.frombuffer(raw, dtype="<f4", count=count * dim, offset=HEADER_SIZE)
        .reshape(count, dim)
        .astype(np.float32)  # own, native-order copy
    )
    _validate_matrix(data)

    mpath = manifest_path_for(path)
    if not mpath.exists():
        raise MissingManifestError(f"sidecar manifest not found: {mpath}")
    try:
        manifest = Manifest.from_dict(json.loads(mpath.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise MissingManifestError(f"sidecar manifest unreadable: {exc}") from exc

    violations = validate_manifest(manifest, count)
    if manifest.dim != dim:
        violations.append(f"manifest dim {manifest.dim} != file dim {dim}")
    if violations:
        raise ManifestError(violations)

    return EmbeddingSet.from_manifest(data, manifest), manifest


def load_family_map(path: str | Path) -> FamilyMap:
    """Load a JSON object mapping language code -> family name."""
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(obj, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in obj.items()
    ):
        raise ManifestError(["family map must be a JSON object of code -> family strings"])
    return FamilyMap(entries=dict(obj))
