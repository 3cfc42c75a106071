"""Command-line access to the full pipeline plus the server launcher.

Batch subcommands mirror the HTTP endpoints through the same shared
pipeline helpers. All JSON output is pretty-printed with alphabetical
keys for diff stability; coordinates are written as `id,x,y` CSV using
round-trippable float reprs. Exit codes: 0 success, 1 domain error
(machine-readable {"code","message"} on stderr, same codes as the
server), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cluster import (
    DegenerateLabeling,
    KTooLarge,
    LINKAGES,
    agglomerative,
    kmeans,
    validity,
)
from .docstore import (
    DocStore,
    FilterError,
    NonNumericField,
    ParseError,
    UnknownCollection,
)
from .embed import (
    KERNEL_KINDS,
    DegenerateData,
    InvalidConstraint,
    KernelSpec,
    PerplexityTooLarge,
    RankDeficient,
    SingularSystem,
    TanimotoOnDense,
    TooFewControls,
    TsneParams,
    UnknownControl,
)
from .pipeline import (
    CLUSTER_ALGOS,
    DEFAULT_KERNEL_KIND,
    EMBED_METHODS,
    FINGERPRINT_METHODS,
    embed_coordinates,
    fingerprint_batch,
    path_config,
    quality_report,
)
from .quality import TooFewPoints, embedding_quality
from .serialize import (
    clustering_to_json,
    constraints_from_json,
    field_summary_to_json,
    quality_to_json,
)
from .smiles import SmilesParseError

DEFAULT_BIND = "127.0.0.1:8000"


class CliError(Exception):
    """Domain error with a machine-readable code, printed to stderr."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


# Most-specific first; ValueError last so subclasses keep their codes.
_ERROR_CODES: tuple[tuple[type, str], ...] = (
    (UnknownCollection, "unknown_collection"),
    (FilterError, "invalid_filter"),
    (NonNumericField, "non_numeric_field"),
    (ParseError, "parse_error"),
    (KTooLarge, "k_too_large"),
    (PerplexityTooLarge, "perplexity_too_large"),
    (TooFewControls, "too_few_controls"),
    (UnknownControl, "unknown_control"),
    (InvalidConstraint, "invalid_constraint"),
    (SingularSystem, "singular_system"),
    (TanimotoOnDense, "invalid_parameter"),
    (RankDeficient, "degenerate_data"),
    (DegenerateData, "degenerate_data"),
    (DegenerateLabeling, "degenerate_labeling"),
    (TooFewPoints, "too_few_points"),
    (SmilesParseError, "smiles_parse_error"),
    (FileNotFoundError, "file_not_found"),
    (IsADirectoryError, "file_not_found"),
    (OSError, "io_error"),
    (ValueError, "invalid_parameter"),
)


@dataclass(frozen=True)
class CliConfig:
    """Shared run configuration: the data directory must exist or be
    creatable; bind is host:port for serve."""

    data_dir: Path
    bind: str = DEFAULT_BIND
    log_level: str = "info"

    def __post_init__(self) -> None:
        data_dir = Path(self.data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        object.__setattr__(self, "data_dir", data_dir)

    def host_port(self) -> tuple[str, int]:
        host, sep, port = self.bind.rpartition(":")
        if not sep or not host:
            raise CliError("invalid_parameter",
                           f"bind must look like host:port, got {self.bind!r}")
        try:
            number = int(port)
        except ValueError as exc:
            raise CliError("invalid_parameter",
                           f"invalid port {port!r}") from exc
        if not 0 <= number <= 65535:
            raise CliError("invalid_parameter",
                           f"port {number} out of range")
        return host, number


def _print_json(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _print_error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"code": code, "message": message},
                                indent=2, sort_keys=True) + "\n")


def _parse_filter(raw: str | None):
    if raw is None:
        return None
    try:
        return json.loads(raw)
    except ValueError as exc:
        raise CliError("invalid_filter",
                       f"filter is not valid JSON: {exc}") from exc


def _store(args) -> DocStore:
    config = CliConfig(data_dir=args.data_dir)
    return DocStore(config.data_dir)


# ---------------------------------------------------------------------------
# fingerprint and coordinate files
# ---------------------------------------------------------------------------


def _write_fingerprints(path: Path, ids: list[str], batch) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for mol_id, fp in zip(ids, batch.fingerprints):
            record = {"id": mol_id, "bits": sorted(fp.bits),
                      "n_bits": fp.n_bits, "method": fp.method}
            handle.write(json.dumps(record, sort_keys=True) + "\n")


def _read_fingerprints(path: Path) -> tuple[list[str], np.ndarray]:
    ids: list[str] = []
    rows: list[list[int]] = []
    n_bits = None
    try:
        handle = open(path, "r", encoding="utf-8")
    except FileNotFoundError as exc:
        raise CliError("file_not_found", str(exc)) from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                record = json.loads(text)
            except ValueError as exc:
                raise CliError(
                    "parse_error",
                    f"{path}: line {lineno}: not valid JSON: {exc}") from exc
            if not isinstance(record, dict) \
                    or not isinstance(record.get("id"), str) \
                    or not isinstance(record.get("bits"), list) \
                    or isinstance(record.get("n_bits"), bool) \
                    or not isinstance(record.get("n_bits"), int):
                raise CliError(
                    "parse_error",
                    f"{path}: line {lineno}: fingerprint records need "
                    "id, bits, and n_bits")
            if n_bits is None:
                n_bits = record["n_bits"]
            elif record["n_bits"] != n_bits:
                raise CliError("parse_error",
                               f"{path}: line {lineno}: inconsistent n_bits")
            bits = record["bits"]
            if not all(isinstance(b, int) and not isinstance(b, bool)
                       and 0 <= b < n_bits for b in bits):
                raise CliError(
                    "parse_error",
                    f"{path}: line {lineno}: bits must be integers "
                    "in [0, n_bits)")
            ids.append(record["id"])
            rows.append(bits)
    if not ids:
        raise CliError("parse_error", f"{path}: no fingerprint records")
    vectors = np.zeros((len(ids), n_bits))
    for i, bits in enumerate(rows):
        vectors[i, bits] = 1.0
    return ids, vectors


def _write_coords(path: Path, ids: list[str], coords: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "x", "y"])
        for mol_id, (x, y) in zip(ids, coords):
            writer.writerow([mol_id, repr(float(x)), repr(float(y))])


def _read_coords(path: Path) -> tuple[list[str], np.ndarray]:
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError as exc:
        raise CliError("file_not_found", str(exc)) from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["id", "x", "y"]:
            raise CliError("parse_error",
                           f"{path}: expected header id,x,y")
        ids: list[str] = []
        rows: list[tuple[float, float]] = []
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise CliError("parse_error",
                               f"{path}: every row needs id,x,y")
            try:
                rows.append((float(row[1]), float(row[2])))
            except ValueError as exc:
                raise CliError("parse_error",
                               f"{path}: non-numeric coordinates") from exc
            ids.append(row[0])
    return ids, (np.array(rows) if rows else np.zeros((0, 2)))


def _load_constraints(path: str | None):
    if path is None:
        return None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise CliError("file_not_found", str(exc)) from exc
    try:
        payload = json.loads(text)
    except ValueError as exc:
        raise CliError("invalid_constraint",
                       f"constraints file is not valid JSON: {exc}") from exc
    try:
        return constraints_from_json(payload)
    except ValueError as exc:  # includes InvalidConstraint
        raise CliError("invalid_constraint", str(exc)) from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    store = _store(args)
    result = store.ingest(Path(args.file), args.collection,
                          format=args.format)
    store.snapshot(args.collection)
    _print_json({
        "collection": args.collection,
        "inserted": result.inserted,
        "rejects": [[line, reason] for line, reason in result.rejects],
        "size": store.size(args.collection),
    })
    return 0


def _cmd_summarize(args) -> int:
    store = _store(args)
    summaries = store.summarize(
        args.collection, args.fields, filter=_parse_filter(args.filter),
        bins="auto" if args.bins is None else args.bins,
        group_by=args.group_by)
    _print_json([field_summary_to_json(summary) for summary in summaries])
    return 0


def _cmd_fingerprint(args) -> int:
    store = _store(args)
    docs = store.fetch(args.collection, filter=_parse_filter(args.filter),
                       limit=args.limit, sample=args.sample, seed=args.seed)
    if not docs:
        raise CliError("empty_selection", "no documents matched")
    params = {}
    if args.max_len is not None:
        params["max_len"] = args.max_len
    if args.n_bits is not None:
        params["n_bits"] = args.n_bits
    if args.method == "hashed_path":
        config = path_config(params)
    else:
        if params:
            raise CliError("invalid_parameter",
                           "atmo_keys takes no parameters")
        config = None
    batch = fingerprint_batch([doc.smiles for doc in docs],
                              args.method, config)
    _write_fingerprints(Path(args.out), [doc.id for doc in docs], batch)
    _print_json({
        "collection": args.collection,
        "count": len(docs),
        "density": batch.density_stats(),
        "dimension": batch.dimension,
        "method": args.method,
        "n_failed": batch.n_failed,
        "out": str(args.out),
    })
    return 0


def _cmd_cluster(args) -> int:
    ids, vectors = _read_fingerprints(Path(args.fingerprints))
    if args.algo == "kmeans":
        clustering = kmeans(vectors, args.k, seed=args.seed)
    else:
        clustering = agglomerative(vectors, args.k, linkage=args.linkage)
    try:
        report = validity(vectors, clustering.labels)
    except DegenerateLabeling:
        report = None
    payload = clustering_to_json(clustering, report)
    payload["ids"] = ids
    _print_json(payload)
    return 0


def _cmd_embed(args) -> int:
    ids, vectors = _read_fingerprints(Path(args.fingerprints))
    constraints = _load_constraints(args.constraints)
    kernel_spec = KernelSpec(kind=args.kernel, gamma=args.gamma)
    tsne_params = TsneParams(perplexity=args.perplexity, iters=args.iters,
                             seed=args.seed)
    embedding, _ = embed_coordinates(
        vectors, args.method,
        kernel_spec=kernel_spec if args.method in ("kpca", "ckpca") else None,
        constraints=constraints, tsne_params=tsne_params,
        k_neighbors=args.k_neighbors)
    _write_coords(Path(args.out), ids, embedding.coords)
    quality = quality_report(vectors, embedding.coords)
    _print_json({
        "count": len(ids),
        "coords": str(args.out),
        "method": args.method,
        "quality": quality_to_json(quality),
    })
    return 0


def _cmd_quality(args) -> int:
    ids, vectors = _read_fingerprints(Path(args.fingerprints))
    coord_ids, coords = _read_coords(Path(args.coords))
    if coord_ids != ids:
        raise CliError("parse_error",
                       "coordinate ids do not match fingerprint ids")
    if args.k is None:
        report = quality_report(vectors, coords)
        if report is None:
            raise CliError("too_few_points",
                           "not enough molecules for quality metrics")
    else:
        report = embedding_quality(vectors, coords, args.k)
    _print_json(quality_to_json(report))
    return 0


def _cmd_serve(args) -> int:
    config = CliConfig(data_dir=args.data_dir, bind=args.bind,
                       log_level=args.log_level)
    host, port = config.host_port()
    import uvicorn

    from .server import create_app

    app = create_app(data_dir=config.data_dir)
    uvicorn.run(app, host=host, port=port, log_level=config.log_level)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moleda",
        description="Molecular EDA: ingest, summarize, fingerprint, "
                    "cluster, embed, score, serve.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")

    p = sub.add_parser("ingest",
                       help="load a JSONL or CSV file into a collection")
    p.add_argument("file", help="input .jsonl or .csv path")
    p.add_argument("--collection", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None,
                   help="override extension-based detection")
    p.add_argument("--data-dir", default="data")
    p.set_defaults(handler=_cmd_ingest)

    p = sub.add_parser("summarize", help="per-field summary statistics")
    p.add_argument("collection")
    p.add_argument("--fields", nargs="+", required=True)
    p.add_argument("--filter", default=None, help="filter as a JSON object")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--group-by", default=None)
    p.add_argument("--data-dir", default="data")
    p.set_defaults(handler=_cmd_summarize)

    p = sub.add_parser("fingerprint",
                       help="fingerprint a collection into a JSONL file")
    p.add_argument("collection")
    p.add_argument("--method", choices=FINGERPRINT_METHODS,
                   default="hashed_path")
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--n-bits", type=int, default=None)
    p.add_argument("--filter", default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--sample", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--data-dir", default="data")
    p.set_defaults(handler=_cmd_fingerprint)

    p = sub.add_parser("cluster", help="cluster a fingerprint file")
    p.add_argument("fingerprints", help="fingerprint .jsonl path")
    p.add_argument("--algo", choices=CLUSTER_ALGOS, default="kmeans")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--linkage", choices=LINKAGES, default="average")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_cluster)

    p = sub.add_parser("embed",
                       help="project a fingerprint file to 2-D coordinates")
    p.add_argument("fingerprints", help="fingerprint .jsonl path")
    p.add_argument("--method", choices=EMBED_METHODS, required=True)
    p.add_argument("--kernel", choices=KERNEL_KINDS,
                   default=DEFAULT_KERNEL_KIND)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--constraints", default=None,
                   help="constraint-set JSON file")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-neighbors", type=int, default=10)
    p.add_argument("--out", required=True, help="coordinates CSV path")
    p.set_defaults(handler=_cmd_embed)

    p = sub.add_parser("quality",
                       help="score coordinates against fingerprints")
    p.add_argument("fingerprints", help="fingerprint .jsonl path")
    p.add_argument("coords", help="coordinates CSV path")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(handler=_cmd_quality)

    p = sub.add_parser("serve", help="run the HTTP + WebSocket server")
    p.add_argument("--bind", default=DEFAULT_BIND)
    p.add_argument("--data-dir", default="data")
    p.add_argument("--log-level", default="info")
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if isinstance(code, int):
            return code
        return 0 if code is None else 2
    try:
        return args.handler(args)
    except CliError as exc:
        _print_error(exc.code, str(exc))
        return 1
    except Exception as exc:  # noqa: BLE001 - map known domain errors
        for exc_type, code in _ERROR_CODES:
            if isinstance(exc, exc_type):
                _print_error(code, str(exc))
                return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
