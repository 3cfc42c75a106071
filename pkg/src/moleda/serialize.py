"""Canonical JSON shapes shared by the HTTP server and the CLI.

One serializer per domain object keeps batch outputs and wire payloads
structurally and numerically identical; the constraint-set codec is the
single serialization used by constraint files and the WebSocket echo.
"""

from __future__ import annotations

import math

import numpy as np

from .cluster import Clustering, ValidityReport
from .docstore import Boxplot, Document, FieldSummary
from .embed import ConstraintSet
from .quality import QualityReport


def json_number(value) -> float | None:
    """Floats JSON cannot carry (inf/nan) become null."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def coords_to_json(coords: np.ndarray) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in np.asarray(coords, dtype=float)]


def document_to_json(doc: Document) -> dict:
    return {"id": doc.id, **doc.fields}


def boxplot_to_json(box: Boxplot) -> dict:
    return {
        "median": box.median,
        "q1": box.q1,
        "q3": box.q3,
        "whisker_lo": box.whisker_lo,
        "whisker_hi": box.whisker_hi,
        "outliers": box.outliers,
    }


def field_summary_to_json(summary: FieldSummary) -> dict:
    return {
        "field": summary.field,
        "kind": summary.kind,
        "count": summary.count,
        "missing": summary.missing,
        "min": summary.min,
        "max": summary.max,
        "mean": summary.mean,
        "std": summary.std,
        "std_kind": summary.std_kind,
        "q1": summary.q1,
        "median": summary.median,
        "q3": summary.q3,
        "histogram": None if summary.histogram is None else
            [[lo, hi, count] for lo, hi, count in summary.histogram],
        "kde": None if summary.kde is None else
            [[x, density] for x, density in summary.kde],
        "boxplot": None if summary.boxplot is None else
            boxplot_to_json(summary.boxplot),
        "categories": None if summary.categories is None else
            [[value, count] for value, count in summary.categories],
        "group_boxplots": None if summary.group_boxplots is None else
            [[category, boxplot_to_json(box)]
             for category, box in summary.group_boxplots],
    }


def validity_to_json(report: ValidityReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "silhouette": json_number(report.silhouette),
        "calinski_harabasz": json_number(report.calinski_harabasz),
        "davies_bouldin": json_number(report.davies_bouldin),
    }


def clustering_to_json(clustering: Clustering,
                       validity: ValidityReport | None) -> dict:
    return {
        "labels": [int(label) for label in clustering.labels],
        "k": clustering.k,
        "inertia": json_number(clustering.inertia),
        "seed": clustering.seed,
        "iterations": len(clustering.inertia_history),
        "validity": validity_to_json(validity),
    }


def quality_to_json(report: QualityReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "trustworthiness": report.trustworthiness,
        "knn_preservation": report.knn_preservation,
        "shepard_spearman": json_number(report.shepard_spearman),
        "normalized_stress": json_number(report.normalized_stress),
        "k_used": report.k_used,
    }


def constraints_to_json(cset: ConstraintSet) -> dict:
    """The canonical constraint serialization (files, requests, WS echo)."""
    return {
        "control_points": [{"index": i, "x": x, "y": y}
                           for i, x, y in cset.control_points],
        "must_links": [[i, j] for i, j in cset.must_links],
        "cannot_links": [[i, j] for i, j in cset.cannot_links],
        "mu_cp": cset.mu_cp,
        "mu_ml": cset.mu_ml,
        "mu_cl": cset.mu_cl,
        "lambda": cset.ridge,
    }


def constraints_from_json(payload: dict | None) -> ConstraintSet:
    """Parse the canonical constraint JSON; absent keys take defaults.

    Raises ValueError (or InvalidConstraint from the ConstraintSet
    constructor) on malformed payloads.
    """
    if payload is None:
        return ConstraintSet()
    if not isinstance(payload, dict):
        raise ValueError("constraints must be a JSON object")
    defaults = ConstraintSet()
    known = {"control_points", "must_links", "cannot_links",
             "mu_cp", "mu_ml", "mu_cl", "lambda"}
    unknown = set(payload) - known
    if unknown:
        raise ValueError(f"unknown constraint keys: {sorted(unknown)}")
    controls = payload.get("control_points", [])
    if not isinstance(controls, list):
        raise ValueError("control_points must be a list")
    control_points = []
    for entry in controls:
        if not isinstance(entry, dict) or not {"index", "x", "y"} <= set(entry):
            raise ValueError("each control point needs index, x, and y")
        control_points.append((entry["index"], entry["x"], entry["y"]))

    def links(key: str) -> list[tuple[int, int]]:
        raw = payload.get(key, [])
        if not isinstance(raw, list):
            raise ValueError(f"{key} must be a list of [i, j] pairs")
        pairs = []
        for pair in raw:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValueError(f"{key} must be a list of [i, j] pairs")
            pairs.append((pair[0], pair[1]))
        return pairs

    def strength(key: str, fallback: float) -> float:
        value = payload.get(key, fallback)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{key} must be a number")
        return float(value)

    return ConstraintSet(
        control_points=tuple(control_points),
        must_links=tuple(links("must_links")),
        cannot_links=tuple(links("cannot_links")),
        mu_cp=strength("mu_cp", defaults.mu_cp),
        mu_ml=strength("mu_ml", defaults.mu_ml),
        mu_cl=strength("mu_cl", defaults.mu_cl),
        ridge=strength("lambda", defaults.ridge),
    )
