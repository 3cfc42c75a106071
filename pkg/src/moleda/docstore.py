"""Embedded schema-free document store with filters and field summaries.

Collections hold flat documents (scalar fields only) in insertion order,
in memory, with optional JSONL snapshots on disk. Filtering is a small
predicate tree evaluated totally: a malformed comparison never errors,
it just fails to match. Summaries compute numeric statistics, histograms
(Freedman-Diaconis bins), a linearly-binned Gaussian KDE on a 128-point
grid, and Tukey boxplots in a single pass over the filtered documents.

Standard deviations are population (divide by n), not sample.
"""

from __future__ import annotations

import csv
import json
import math
import os
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np

OPS = ("eq", "ne", "lt", "lte", "gt", "gte", "in", "exists", "contains")
COMBINATORS = ("and", "or", "not")
KDE_GRID_SIZE = 128
MIN_BINS, MAX_BINS, FALLBACK_BINS = 10, 100, 20
MISSING_SMILES = "missing_smiles"


class DocstoreError(ValueError):
    """Base class for document-store domain errors."""


class UnknownCollection(DocstoreError):
    """The named collection does not exist."""


class ParseError(DocstoreError):
    """An ingest line could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class MissingSmiles(DocstoreError):
    """A record has no usable smiles text; carries the line number."""

    def __init__(self, line: int) -> None:
        super().__init__(f"line {line}: record has no smiles text")
        self.line = line


class NonNumericField(DocstoreError):
    """Numeric-only statistics were requested for a field with no numbers."""


class FilterError(DocstoreError):
    """A filter tree violates the predicate grammar."""


@dataclass(frozen=True)
class Document:
    """One molecule record: unique id plus a flat map of scalar fields."""

    id: str
    fields: dict

    def __post_init__(self) -> None:
        object.__setattr__(self, "fields", dict(self.fields))

    @property
    def smiles(self) -> str:
        return self.fields.get("smiles", "")


@dataclass(frozen=True)
class IngestResult:
    """Insert count plus (line, reason) tallies for skipped records."""

    inserted: int
    rejects: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True)
class Boxplot:
    """Tukey boxplot: whiskers reach the most extreme data points within
    1.5 IQR of the quartiles; everything beyond is counted as an outlier."""

    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: int


@dataclass(frozen=True)
class FieldSummary:
    """Aggregates for one field over the filtered documents.

    ``count`` tallies usable values (numeric for numeric fields, text or
    boolean for categorical ones) and ``count + missing`` always equals
    the filtered collection size. Numeric-only members are None for
    categorical or empty fields. ``std_kind`` records that std is the
    population standard deviation.
    """

    field: str
    kind: str  # "numeric" | "categorical" | "empty"
    count: int
    missing: int
    min: float | None = None
    max: float | None = None
    mean: float | None = None
    std: float | None = None
    q1: float | None = None
    median: float | None = None
    q3: float | None = None
    histogram: tuple[tuple[float, float, int], ...] | None = None
    kde: tuple[tuple[float, float], ...] | None = None
    boxplot: Boxplot | None = None
    categories: tuple[tuple[str, int], ...] | None = None
    group_boxplots: tuple[tuple[str, Boxplot], ...] | None = None
    std_kind: str = "population"


class RemoteStoreAdapter(Protocol):
    """Extension point for backing collections with a remote database.

    Declared only; no remote adapter ships in v1. Implementations must
    provide the same fetch/summarize semantics as the embedded store.
    """

    def fetch(self, collection: str, filter: dict | None,
              fields: list[str] | None, limit: int | None) -> list[Document]:
        ...

    def summarize(self, collection: str, fields: list[str],
                  filter: dict | None) -> list[FieldSummary]:
        ...


# ---------------------------------------------------------------------------
# values and filters
# ---------------------------------------------------------------------------


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) \
        and math.isfinite(value)


def _is_scalar(value) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _eq(value, other) -> bool:
    if isinstance(value, bool) or isinstance(other, bool):
        return isinstance(value, bool) and isinstance(other, bool) \
            and value == other
    if _is_number(value) and _is_number(other):
        return float(value) == float(other)
    if isinstance(value, str) and isinstance(other, str):
        return value == other
    return value is None and other is None


def _ordered(value, other, op: str) -> bool:
    if _is_number(value) and _is_number(other):
        a, b = float(value), float(other)
    elif isinstance(value, str) and isinstance(other, str) \
            and not isinstance(value, bool) and not isinstance(other, bool):
        a, b = value, other
    else:
        return False
    if op == "lt":
        return a < b
    if op == "lte":
        return a <= b
    if op == "gt":
        return a > b
    return a >= b


def validate_filter(filt) -> None:
    """Check a predicate tree against the grammar; raise FilterError."""
    if filt is None:
        return
    if not isinstance(filt, dict):
        raise FilterError("a filter must be a JSON object")
    if not filt:
        return
    if "and" in filt or "or" in filt:
        key = "and" if "and" in filt else "or"
        if set(filt) != {key} or not isinstance(filt[key], list):
            raise FilterError(f"'{key}' must be the only key and hold a list")
        for child in filt[key]:
            validate_filter(child)
        return
    if "not" in filt:
        if set(filt) != {"not"} or not isinstance(filt["not"], dict):
            raise FilterError("'not' must be the only key and hold one filter")
        validate_filter(filt["not"])
        return
    if "field" in filt or "op" in filt:
        extra = set(filt) - {"field", "op", "value"}
        if extra:
            raise FilterError(f"unknown filter keys: {sorted(extra)}")
        name = filt.get("field")
        if not isinstance(name, str) or not name:
            raise FilterError("filter field name must be non-empty text")
        op = filt.get("op")
        if op not in OPS:
            raise FilterError(f"unknown op {op!r}; expected one of {OPS}")
        if op == "exists":
            return
        if "value" not in filt:
            raise FilterError(f"op {op!r} requires a value")
        if op == "in":
            if not isinstance(filt["value"], list) or not filt["value"]:
                raise FilterError("'in' requires a non-empty list")
        return
    raise FilterError(f"unrecognized filter shape: {sorted(filt)}")


def match(doc: Document, filt: dict | None) -> bool:
    """Evaluate a predicate tree against one document; never raises for a
    grammar-valid filter. A missing field fails every leaf, including ne."""
    if filt is None or not filt:
        return True
    if "and" in filt:
        return all(match(doc, child) for child in filt["and"])
    if "or" in filt:
        return any(match(doc, child) for child in filt["or"])
    if "not" in filt:
        return not match(doc, filt["not"])
    name = filt["field"]
    op = filt["op"]
    if name not in doc.fields:
        return False
    value = doc.fields[name]
    if op == "exists":
        return value is not None
    target = filt.get("value")
    if op == "eq":
        return _eq(value, target)
    if op == "ne":
        if value is None or target is None:
            return False
        comparable = (
            (isinstance(value, bool) and isinstance(target, bool))
            or (_is_number(value) and _is_number(target))
            or (isinstance(value, str) and isinstance(target, str)
                and not isinstance(value, bool) and not isinstance(target, bool)))
        return comparable and not _eq(value, target)
    if op == "in":
        return any(_eq(value, item) for item in target)
    if op == "contains":
        return isinstance(value, str) and isinstance(target, str) \
            and target in value
    return _ordered(value, target, op)


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------


def _boxplot(values: np.ndarray, q1: float, q3: float) -> Boxplot:
    iqr = q3 - q1
    low_fence = q1 - 1.5 * iqr
    high_fence = q3 + 1.5 * iqr
    whisker_lo = float(values[values >= low_fence].min())
    whisker_hi = float(values[values <= high_fence].max())
    outliers = int(((values < whisker_lo) | (values > whisker_hi)).sum())
    median = float(np.quantile(values, 0.5))
    return Boxplot(median=median, q1=q1, q3=q3, whisker_lo=whisker_lo,
                   whisker_hi=whisker_hi, outliers=outliers)


def _histogram(values: np.ndarray, bins, iqr: float
               ) -> tuple[tuple[float, float, int], ...]:
    mn, mx = float(values.min()), float(values.max())
    count = len(values)
    if mx == mn:
        return ((mn, mx, count),)
    if bins == "auto":
        if iqr == 0:
            nbins = FALLBACK_BINS
        else:
            width = 2.0 * iqr * count ** (-1.0 / 3.0)
            nbins = min(MAX_BINS, max(MIN_BINS, math.ceil((mx - mn) / width)))
    else:
        nbins = int(bins)
    edges = np.linspace(mn, mx, nbins + 1)
    idx = np.clip(np.searchsorted(edges, values, side="right") - 1, 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    return tuple((float(edges[i]), float(edges[i + 1]), int(counts[i]))
                 for i in range(nbins))


def _kde(values: np.ndarray, std: float, iqr: float
         ) -> tuple[tuple[float, float], ...]:
    """Gaussian KDE with Silverman bandwidth, approximated by linear
    binning onto the evaluation grid itself."""
    mn, mx = float(values.min()), float(values.max())
    count = len(values)
    if std == 0 or iqr == 0:
        h = max(1e-9, 0.1 * (mx - mn))
    else:
        h = 0.9 * min(std, iqr / 1.34) * count ** (-1.0 / 5.0)
    lo, hi = mn - 3 * h, mx + 3 * h
    grid = np.linspace(lo, hi, KDE_GRID_SIZE)
    step = (hi - lo) / (KDE_GRID_SIZE - 1)
    t = (values - lo) / step
    base = np.clip(np.floor(t).astype(int), 0, KDE_GRID_SIZE - 2)
    frac = t - base
    mass = np.zeros(KDE_GRID_SIZE)
    np.add.at(mass, base, 1.0 - frac)
    np.add.at(mass, base + 1, frac)
    z = (grid[:, None] - grid[None, :]) / h
    kernel = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    density = kernel @ mass / (count * h)
    return tuple((float(x), float(d)) for x, d in zip(grid, density))


def _numeric_summary(name: str, values: list[float], missing: int,
                     bins) -> FieldSummary:
    array = np.asarray(values, dtype=float)
    q1, median, q3 = (float(np.quantile(array, q)) for q in (0.25, 0.5, 0.75))
    std = float(np.std(array))
    iqr = q3 - q1
    return FieldSummary(
        field=name, kind="numeric", count=len(values), missing=missing,
        min=float(array.min()), max=float(array.max()),
        mean=float(array.mean()), std=std, q1=q1, median=median, q3=q3,
        histogram=_histogram(array, bins, iqr),
        kde=_kde(array, std, iqr),
        boxplot=_boxplot(array, q1, q3))


def _category_key(value) -> str | None:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return None


def _sorted_categories(counter: Counter) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0])))


# ---------------------------------------------------------------------------
# the store
# ---------------------------------------------------------------------------


class _Collection:
    def __init__(self) -> None:
        self.docs: list[Document] = []
        self.ids: set[str] = set()


class DocStore:
    """In-memory collections with optional JSONL snapshots under data_dir.

    Concurrency: many readers, one writer; mutation and snapshotting are
    serialized by an internal lock.
    """

    def __init__(self, data_dir: str | Path | None = None) -> None:
        self._lock = threading.RLock()
        self._collections: dict[str, _Collection] = {}
        self.data_dir = Path(data_dir) if data_dir is not None else None
        if self.data_dir is not None and self.data_dir.is_dir():
            for path in sorted(self.data_dir.glob("*.jsonl")):
                self.ingest(path, path.stem)

    # -- introspection ----------------------------------------------------

    def collections(self) -> dict[str, int]:
        return {name: len(col.docs) for name, col in self._collections.items()}

    def size(self, collection: str) -> int:
        return len(self._get(collection).docs)

    def field_info(self, collection: str) -> dict[str, str]:
        """Field names with inferred types: number, text, boolean,
        mixed (several types), or null (only nulls seen)."""
        kinds: dict[str, set[str]] = {}
        for doc in self._get(collection).docs:
            for name, value in doc.fields.items():
                seen = kinds.setdefault(name, set())
                if isinstance(value, bool):
                    seen.add("boolean")
                elif _is_number(value):
                    seen.add("number")
                elif isinstance(value, str):
                    seen.add("text")
        return {
            name: next(iter(seen)) if len(seen) == 1
            else ("null" if not seen else "mixed")
            for name, seen in sorted(kinds.items())}

    def _get(self, collection: str) -> _Collection:
        try:
            return self._collections[collection]
        except KeyError:
            raise UnknownCollection(f"no collection named {collection!r}") from None

    # -- ingest -----------------------------------------------------------

    def ingest(self, source, collection: str, format: str | None = None
               ) -> IngestResult:
        """Append JSONL or CSV records; returns inserted count and rejects.

        Records without usable smiles text are skipped and tallied;
        structurally bad input raises ParseError with its line number.
        """
        stream, close, detected = _open_source(source, format)
        try:
            with self._lock:
                col = self._collections.setdefault(collection, _Collection())
                if detected == "csv":
                    records = _read_csv(stream)
                else:
                    records = _read_jsonl(stream)
                inserted = 0
                rejects: list[tuple[int, str]] = []
                for line, record in records:
                    doc_id, fields = _normalize_record(record, line)
                    smiles = fields.get("smiles")
                    if not isinstance(smiles, str):
                        rejects.append((line, MISSING_SMILES))
                        continue
                    if doc_id is None:
                        ordinal = len(col.docs)
                        while f"doc-{ordinal}" in col.ids:
                            ordinal += 1
                        doc_id = f"doc-{ordinal}"
                    elif doc_id in col.ids:
                        raise ParseError(f"duplicate id {doc_id!r}", line)
                    col.docs.append(Document(id=doc_id, fields=fields))
                    col.ids.add(doc_id)
                    inserted += 1
                return IngestResult(inserted=inserted, rejects=tuple(rejects))
        finally:
            if close:
                stream.close()

    # -- queries ----------------------------------------------------------

    def fetch(self, collection: str, filter: dict | None = None,
              fields: list[str] | None = None, limit: int | None = None,
              sample: bool = False, seed: int = 0) -> list[Document]:
        """Filtered documents in insertion order, optionally projected and
        truncated; sample mode draws a seeded uniform subset instead of a
        prefix, keeping insertion order."""
        validate_filter(filter)
        col = self._get(collection)
        docs = [d for d in col.docs if match(d, filter)]
        if limit is not None and limit < len(docs):
            if sample:
                rng = np.random.RandomState(seed)
                keep = np.sort(rng.choice(len(docs), size=limit, replace=False))
                docs = [docs[i] for i in keep]
            else:
                docs = docs[:limit]
        if fields is not None:
            wanted = set(fields) | {"smiles"}
            docs = [
                Document(id=d.id, fields={
                    k: v for k, v in d.fields.items() if k in wanted})
                for d in docs]
        return docs

    def summarize(self, collection: str, fields: list[str],
                  filter: dict | None = None, bins="auto",
                  group_by: str | None = None) -> list[FieldSummary]:
        """One FieldSummary per requested field, single pass over the
        filtered documents.

        With group_by, the first numeric requested field becomes the
        comparison field and the group_by field's summary gains one
        boxplot of comparison values per category; NonNumericField is
        raised when no requested field has numeric values.
        """
        validate_filter(filter)
        if bins != "auto" and (not isinstance(bins, int) or bins < 1):
            raise ValueError("bins must be 'auto' or a positive integer")
        col = self._get(collection)

        numeric: dict[str, list[float]] = {name: [] for name in fields}
        cats: dict[str, Counter] = {name: Counter() for name in fields}
        grouped: dict[str, dict[str, list[float]]] = {
            name: {} for name in fields}
        group_counts: Counter = Counter()
        total = 0
        for doc in col.docs:
            if not match(doc, filter):
                continue
            total += 1
            group_key = None
            if group_by is not None:
                group_key = _category_key(doc.fields.get(group_by))
                if group_key is not None:
                    group_counts[group_key] += 1
            for name in fields:
                value = doc.fields.get(name)
                if _is_number(value):
                    numeric[name].append(float(value))
                    if group_key is not None:
                        grouped[name].setdefault(group_key, []).append(
                            float(value))
                else:
                    key = _category_key(value)
                    if key is not None:
                        cats[name][key] += 1

        summaries: list[FieldSummary] = []
        for name in fields:
            values = numeric[name]
            if values:
                summaries.append(_numeric_summary(
                    name, values, total - len(values), bins))
            elif cats[name]:
                count = sum(cats[name].values())
                summaries.append(FieldSummary(
                    field=name, kind="categorical", count=count,
                    missing=total - count,
                    categories=_sorted_categories(cats[name])))
            else:
                summaries.append(FieldSummary(
                    field=name, kind="empty", count=0, missing=total))

        if group_by is not None:
            comparison = next((n for n in fields if numeric[n]), None)
            if comparison is None:
                raise NonNumericField(
                    "group_by needs a numeric comparison field among "
                    f"{fields!r}")
            boxes = []
            for key in sorted(grouped[comparison]):
                values = np.asarray(grouped[comparison][key], dtype=float)
                q1, q3 = (float(np.quantile(values, q)) for q in (0.25, 0.75))
                boxes.append((key, _boxplot(values, q1, q3)))
            group_summary = FieldSummary(
                field=group_by, kind="categorical",
                count=sum(group_counts.values()),
                missing=total - sum(group_counts.values()),
                categories=_sorted_categories(group_counts),
                group_boxplots=tuple(boxes))
            for i, existing in enumerate(summaries):
                if existing.field == group_by:
                    summaries[i] = group_summary
                    break
            else:
                summaries.append(group_summary)
        return summaries

    # -- snapshots ----------------------------------------------------------

    def snapshot(self, collection: str) -> Path:
        """Write <collection>.jsonl under data_dir atomically
        (temp file + rename)."""
        if self.data_dir is None:
            raise ValueError("snapshotting requires a data_dir")
        col = self._get(collection)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        final = self.data_dir / f"{collection}.jsonl"
        temp = self.data_dir / f".{collection}.jsonl.tmp-{os.getpid()}"
        with self._lock:
            with open(temp, "w", encoding="utf-8") as handle:
                for doc in col.docs:
                    record = {"id": doc.id, **doc.fields}
                    handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            os.replace(temp, final)
        return final


# ---------------------------------------------------------------------------
# ingest plumbing
# ---------------------------------------------------------------------------


def _open_source(source, format: str | None):
    """Resolve (stream, owns_stream, format). Format comes from the
    explicit argument, else the file extension, defaulting to jsonl."""
    if format is not None and format not in ("jsonl", "csv"):
        raise ValueError("format must be 'jsonl' or 'csv'")
    if hasattr(source, "read"):
        name = getattr(source, "name", "")
        detected = format or (
            "csv" if str(name).lower().endswith(".csv") else "jsonl")
        return source, False, detected
    path = Path(source)
    detected = format or (
        "csv" if path.suffix.lower() == ".csv" else "jsonl")
    return open(path, "r", encoding="utf-8", newline=""), True, detected


def _reject_constant(token: str):
    raise ValueError(f"non-finite JSON constant {token!r}")


def _read_jsonl(stream) -> Iterable[tuple[int, dict]]:
    for line_no, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw, parse_constant=_reject_constant)
        except ValueError as err:
            raise ParseError(str(err), line_no) from None
        if not isinstance(record, dict):
            raise ParseError("each line must be a JSON object", line_no)
        yield line_no, record


def _read_csv(stream) -> Iterable[tuple[int, dict]]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        return
    if "smiles" not in header:
        raise ParseError("CSV header has no smiles column", 1)
    width = len(header)
    for row in reader:
        if not row:
            continue
        if len(row) != width:
            raise ParseError(
                f"expected {width} cells, got {len(row)}", reader.line_num)
        record = {
            name: _parse_csv_cell(name, cell)
            for name, cell in zip(header, row)}
        yield reader.line_num, record


def _parse_csv_cell(column: str, cell: str):
    """Numeric-looking cells become numbers, except in the id and smiles
    columns which stay text; empty cells become null (so an empty smiles
    cell counts as missing, unlike explicit empty text in JSONL)."""
    if column in ("id", "smiles"):
        return cell or None
    if cell == "":
        return None
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        value = float(cell)
    except ValueError:
        return cell
    return value if math.isfinite(value) else cell


def _normalize_record(record: dict, line: int) -> tuple[str | None, dict]:
    """Validate one flat record; split off its explicit id if present."""
    fields = {}
    doc_id = None
    for key, value in record.items():
        if not isinstance(key, str) or not key:
            raise ParseError("field names must be non-empty text", line)
        if key == "id":
            if value in (None, ""):
                continue
            if not isinstance(value, str):
                raise ParseError("id must be text", line)
            doc_id = value
            continue
        if not _is_scalar(value):
            raise ParseError(
                f"field {key!r} must be a scalar, got {type(value).__name__}",
                line)
        if isinstance(value, float) and not math.isfinite(value):
            raise ParseError(f"field {key!r} is not finite", line)
        fields[key] = value
    return doc_id, fields
