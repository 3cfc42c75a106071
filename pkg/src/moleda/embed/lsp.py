"""Least squares projection anchored at user-placed control points.

Free points are tied to the mean of their k nearest neighbors in feature
space; control points get anchor rows kappa * x_c = kappa * target that
replace their neighborhood rows, so a fully controlled system reproduces
the targets exactly. Output stays in the targets' coordinate space: the
anchors define the frame, so no rescaling is applied.
"""

from __future__ import annotations

import numpy as np

from .base import Embedding

KAPPA = 10.0


class TooFewControls(ValueError):
    """LSP needs at least three control points."""


def knn_indices(vectors: np.ndarray, k: int) -> np.ndarray:
    """k nearest neighbors per row: Euclidean, self excluded, ties by index."""
    norms = np.einsum("ij,ij->i", vectors, vectors)
    sq = norms[:, None] + norms[None, :] - 2.0 * (vectors @ vectors.T)
    np.maximum(sq, 0.0, out=sq)
    order = np.argsort(sq, axis=1, kind="stable")
    n = vectors.shape[0]
    neighbors = np.empty((n, k), dtype=int)
    for i in range(n):
        row = order[i]
        neighbors[i] = row[row != i][:k]
    return neighbors


def lsp(vectors, controls, k_neighbors: int = 10) -> Embedding:
    """Solve the anchored neighborhood-preservation system.

    `controls` is a list of (index, x, y) targets; at least three are
    required, each index at most once.
    """
    data = np.asarray(vectors, dtype=float)
    if data.ndim != 2:
        raise ValueError("vectors must form a 2-D array")
    n = data.shape[0]
    anchors = [(int(i), float(x), float(y)) for i, x, y in controls]
    if len(anchors) < 3:
        raise TooFewControls(f"need at least 3 controls, got {len(anchors)}")
    if not 1 <= k_neighbors < n:
        raise ValueError(f"k_neighbors must be in [1, n), got {k_neighbors}")
    indices = [i for i, _, _ in anchors]
    if len(indices) != len(set(indices)):
        raise ValueError("duplicate control index")
    if not all(0 <= i < n for i in indices):
        raise ValueError("control index out of range")
    neighbors = knn_indices(data, k_neighbors)
    system = np.zeros((n, n))
    rhs = np.zeros((n, 2))
    targets = {i: (x, y) for i, x, y in anchors}
    for i in range(n):
        if i in targets:
            system[i, i] = KAPPA
            rhs[i, 0] = KAPPA * targets[i][0]
            rhs[i, 1] = KAPPA * targets[i][1]
        else:
            system[i, i] = 1.0
            system[i, neighbors[i]] -= 1.0 / k_neighbors
    coords, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    provenance = {
        "k_neighbors": k_neighbors,
        "kappa": KAPPA,
        "n_controls": len(anchors),
    }
    return Embedding(coords=coords, method="lsp", version=1, provenance=provenance)
