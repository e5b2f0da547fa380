"""Command-line front end.

Subcommands: anisotropy, gamma, phi, pca, report. Every subcommand reads
an EMBGEOM1 dump (--input), writes to --output or stdout, and exits 0 on
success. Failure classes map to distinct exit codes:

    2  usage / bad arguments (argparse)
    3  input file missing or unreadable
    4  dump format error (magic, version, dtype, truncation, trailing data)
    5  data or manifest validation error (non-finite, zero-norm rows,
       span problems, missing sidecar, set/manifest mismatch)
    6  computation error (alignment, unknown code, zero anisotropy,
       component count, eigensolver)
    7  family map does not cover the manifest

The EMBGEOM_WORKERS environment variable caps the worker threads used by
the metric engines (default: logical cores); results are identical for
any value.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import errors, io, metrics, pca, report

EXIT_OS = 3
EXIT_FORMAT = 4
EXIT_DATA = 5
EXIT_COMPUTE = 6
EXIT_FAMILY = 7

_FORMAT_ERRORS = (
    errors.BadMagicError,
    errors.VersionMismatchError,
    errors.UnsupportedDtypeError,
    errors.TruncatedPayloadError,
    errors.TrailingDataError,
)
_DATA_ERRORS = (
    errors.NonFiniteValueError,
    errors.ZeroNormRowError,
    errors.ManifestError,
    errors.MissingManifestError,
    errors.ManifestMismatchError,
)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(obj, output: str | None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", output)


def _load(path: str) -> tuple[io.EmbeddingSet, io.Manifest]:
    return io.read_embeddings(path)


def _cmd_anisotropy(args) -> None:
    set_, _ = _load(args.input)
    result = metrics.anisotropy(set_)
    if args.format == "csv":
        _emit(
            f"anisotropy,pair_count\n{result.value:.17g},{result.pair_count}\n",
            args.output,
        )
    else:
        _emit_json(
            {"anisotropy": result.value, "pair_count": result.pair_count}, args.output
        )


def _emit_matrix(matrix: metrics.LabeledMatrix, args) -> None:
    digits = getattr(args, "round", None)
    if args.format == "json":
        _emit_json(report.matrix_to_json_dict(matrix, digits), args.output)
    else:
        _emit(report.matrix_to_csv(matrix, digits), args.output)


def _cmd_gamma(args) -> None:
    set_, manifest = _load(args.input)
    if manifest.pooling == "none":
        raise errors.AlignmentError(
            "word-level dump (pooling none) has no sentence alignment; "
            "similarity index requires a sentence-level dump"
        )
    _emit_matrix(metrics.gamma_matrix(set_), args)


def _cmd_phi(args) -> None:
    set_, _ = _load(args.input)
    metric = (
        metrics.NnMetric.COSINE_DISTANCE
        if args.metric == "cosine"
        else metrics.NnMetric.EUCLIDEAN
    )
    _emit_matrix(metrics.phi_matrix(set_, metric), args)


def _cmd_pca(args) -> None:
    set_, _ = _load(args.input)
    codes = [c.strip() for c in args.languages.split(",") if c.strip()]
    if not codes:
        raise errors.PcaError("no language codes given")
    result = pca.fit_language_group(set_, codes, args.components)
    if args.format == "json":
        _emit_json(
            {
                "codes": codes,
                "eigenvalues": result.eigenvalues.tolist(),
                "explained_ratio": result.explained_ratio.tolist(),
                "components": result.components.tolist(),
                "coordinates": result.coordinates.tolist(),
                "row_labels": list(result.row_labels),
            },
            args.output,
        )
    else:
        _emit(report.coordinates_to_csv(result.row_labels, result.coordinates), args.output)


def _cmd_report(args) -> None:
    set_, _ = _load(args.input)
    family_map = io.load_family_map(args.families)
    gamma = metrics.gamma_matrix(set_)
    phi = metrics.phi_matrix(set_)
    aniso = metrics.anisotropy(set_)
    rep = report.build_family_report(gamma, phi, aniso, family_map)
    obj = rep.to_dict()
    if args.round is not None:

        def _round(v):
            return round(v, args.round) if isinstance(v, float) else v

        for fam in obj["families"]:
            fam["intra_gamma_mean"] = _round(fam["intra_gamma_mean"])
            fam["intra_phi_mean"] = _round(fam["intra_phi_mean"])
        obj["global"] = {k: _round(v) for k, v in obj["global"].items()}
        for item in obj["per_language_gamma"]:
            item["mean_offdiag_gamma"] = _round(item["mean_offdiag_gamma"])
    if args.format == "csv":
        lines = ["section,key,value"]
        for fam in obj["families"]:
            lines.append(
                f"family,{fam['family']} ({' '.join(fam['languages'])}),"
                f"gamma={fam['intra_gamma_mean']} phi={fam['intra_phi_mean']}"
            )
        for key, value in obj["global"].items():
            lines.append(f"global,{key},{value}")
        for item in obj["per_language_gamma"]:
            lines.append(f"per_language_gamma,{item['code']},{item['mean_offdiag_gamma']}")
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit_json(obj, args.output)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embgeom",
        description="Geometry metrics over multilingual embedding dumps.",
        epilog="Set EMBGEOM_WORKERS to cap worker threads; results do not depend on it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, default_format: str) -> None:
        p.add_argument("--input", required=True, help="EMBGEOM1 dump path")
        p.add_argument("--output", default=None, help="output path (default: stdout)")
        p.add_argument(
            "--format", choices=("csv", "json"), default=default_format, help="output format"
        )

    p = sub.add_parser("anisotropy", help="absolute mean pairwise cosine of the dump")
    common(p, "json")
    p.set_defaults(func=_cmd_anisotropy)

    p = sub.add_parser("gamma", help="cross-lingual similarity index matrix")
    common(p, "csv")
    p.add_argument("--round", type=int, default=None, help="round values to N decimals")
    p.set_defaults(func=_cmd_gamma)

    p = sub.add_parser("phi", help="language separability matrix")
    common(p, "csv")
    p.add_argument(
        "--metric",
        choices=("euclidean", "cosine"),
        default="euclidean",
        help="nearest-neighbor distance",
    )
    p.add_argument("--round", type=int, default=None, help="round values to N decimals")
    p.set_defaults(func=_cmd_phi)

    p = sub.add_parser("pca", help="project a language group onto top components")
    common(p, "csv")
    p.add_argument("--languages", required=True, help="comma-separated language codes")
    p.add_argument("--components", type=_positive_int, default=3, help="component count")
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("report", help="family-aggregated similarity/separability report")
    common(p, "json")
    p.add_argument("--families", required=True, help="JSON file mapping code -> family")
    p.add_argument("--round", type=int, default=None, help="round values to N decimals")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_OS
    except _FORMAT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except _DATA_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except errors.FamilyCoverageError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAMILY
    except (errors.MetricError, errors.PcaError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OS
    return 0


if __name__ == "__main__":
    sys.exit(main())
