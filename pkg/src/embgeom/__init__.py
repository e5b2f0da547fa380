"""Geometry metrics for multilingual embedding spaces."""

from .errors import EmbGeomError
from .io import (
    EmbeddingSet,
    FamilyMap,
    LanguageSpan,
    Manifest,
    load_family_map,
    manifest_for,
    read_embeddings,
    validate_manifest,
    write_embeddings,
)
from .metrics import (
    AnisotropyResult,
    LabeledMatrix,
    NnMetric,
    anisotropy,
    cosine,
    gamma,
    gamma_matrix,
    gsi,
    nearest_neighbor_labels,
    phi_matrix,
)
from .pca import PcaResult, fit_language_group, mean_center, project, top_components
from .report import FamilyReport, build_family_report

__version__ = "0.1.0"

__all__ = [
    "AnisotropyResult",
    "EmbGeomError",
    "EmbeddingSet",
    "FamilyMap",
    "FamilyReport",
    "LabeledMatrix",
    "LanguageSpan",
    "Manifest",
    "NnMetric",
    "PcaResult",
    "anisotropy",
    "build_family_report",
    "cosine",
    "fit_language_group",
    "gamma",
    "gamma_matrix",
    "gsi",
    "load_family_map",
    "manifest_for",
    "mean_center",
    "nearest_neighbor_labels",
    "phi_matrix",
    "project",
    "read_embeddings",
    "top_components",
    "validate_manifest",
    "write_embeddings",
]
