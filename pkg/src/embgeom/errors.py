"""Exception hierarchy for embgeom.

Every rejection path has its own class so callers (and the CLI exit-code
mapping) can tell failure modes apart without parsing messages.
"""

from __future__ import annotations


class EmbGeomError(Exception):
    """Base class for all embgeom errors."""


# ---------------------------------------------------------------------------
# dump file / manifest loading

class EmbeddingIOError(EmbGeomError):
    """Base class for dump reading/writing failures."""


class BadMagicError(EmbeddingIOError):
    """File does not start with the EMBGEOM1 magic bytes."""


class VersionMismatchError(EmbeddingIOError):
    """Header version field is not a supported version."""


class UnsupportedDtypeError(EmbeddingIOError):
    """Header dtype field is not float32 (0)."""


class TruncatedPayloadError(EmbeddingIOError):
    """File ends before header + count*dim*4 payload bytes."""


class TrailingDataError(EmbeddingIOError):
    """File contains bytes past the declared payload."""


class NonFiniteValueError(EmbeddingIOError):
    """Payload contains NaN or infinite values."""


class ZeroNormRowError(EmbeddingIOError):
    """A row of the matrix has zero Euclidean norm."""


class MissingManifestError(EmbeddingIOError):
    """The sidecar manifest file is absent or unreadable."""


class ManifestError(EmbeddingIOError):
    """Manifest violates its invariants (spans, codes, counts)."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ManifestMismatchError(EmbeddingIOError):
    """Manifest is inconsistent with the embedding set being written."""


# ---------------------------------------------------------------------------
# metric computation

class MetricError(EmbGeomError):
    """Base class for metric computation failures."""


class DimensionMismatchError(MetricError):
    """Operands have incompatible dimensions."""


class ZeroNormVectorError(MetricError):
    """Cosine of a zero-norm vector is undefined."""


class InsufficientRowsError(MetricError):
    """Operation needs at least two rows."""


class UnknownLanguageError(MetricError):
    """Requested language code is not in the set."""


class AlignmentError(MetricError):
    """Languages do not have equal, sentence-aligned row counts."""


class ZeroAnisotropyError(MetricError):
    """Anisotropy is exactly zero, so the similarity index is undefined."""


class SameLanguageError(MetricError):
    """Separability of a language against itself is a fixed convention,
    not a computed value."""


# ---------------------------------------------------------------------------
# pca

class PcaError(EmbGeomError):
    """Base class for PCA failures."""


class ComponentCountError(PcaError):
    """Requested component count is outside [1, min(N-1, d)]."""


class EigensolverError(PcaError):
    """Eigendecomposition of the covariance did not converge."""


# ---------------------------------------------------------------------------
# family report

class ReportError(EmbGeomError):
    """Base class for report generation failures."""


class FamilyCoverageError(ReportError):
    """Family map does not cover every language in the manifest."""

    def __init__(self, missing: list[str]):
        self.missing = list(missing)
        super().__init__(f"family map missing codes: {self.missing}")
