"""Embedding-quality metrics: how well 2-D coordinates preserve structure.

Four complementary scores compare the high-dimensional point cloud with
its 2-D embedding under the Euclidean metric:

- trustworthiness penalizes low-dimensional neighbors that are far in
  the original space, weighted by their original-space rank;
- knn_preservation is the mean fractional overlap of the k-neighborhoods;
- shepard_spearman is the Spearman rank correlation of the two
  upper-triangle pairwise-distance vectors (average ranks on ties);
- normalized_stress is Kruskal-style stress after fitting the single
  scale factor that best maps low- onto high-dimensional distances, so
  the value is invariant to the embedding's units.

Neighbor ranks break distance ties by point index; rank metrics are
therefore deterministic and depend only on distance orderings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

DEFAULT_K = 10


class TooFewPoints(ValueError):
    """The metrics need n >= 2k + 2 points to be well defined."""


@dataclass(frozen=True)
class QualityReport:
    """Preservation scores for one embedding, at neighborhood size k_used."""

    trustworthiness: float
    knn_preservation: float
    shepard_spearman: float
    normalized_stress: float
    k_used: int


def _pairwise(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.maximum(np.einsum("ijk,ijk->ij", diff, diff), 0.0))


def _neighbor_order(dist: np.ndarray) -> np.ndarray:
    """Rows of neighbor indices sorted by (distance, index), self excluded."""
    work = dist.copy()
    np.fill_diagonal(work, -np.inf)
    order = np.argsort(work, axis=1, kind="stable")
    return order[:, 1:]


def _spearman(upper_hd: np.ndarray, upper_ld: np.ndarray) -> float:
    ranks_hd = rankdata(upper_hd, method="average")
    ranks_ld = rankdata(upper_ld, method="average")
    if np.array_equal(ranks_hd, ranks_ld):
        return 1.0  # identical rankings correlate perfectly by definition
    if ranks_hd.std() == 0.0 or ranks_ld.std() == 0.0:
        return 0.0  # a constant distance vector carries no ordering signal
    return float(np.corrcoef(ranks_hd, ranks_ld)[0, 1])


def embedding_quality(hd, ld, k: int = DEFAULT_K) -> QualityReport:
    """Score how faithfully 2-D coordinates preserve the original cloud.

    ``hd`` holds n feature vectors, ``ld`` the aligned n x 2 coordinates.
    Requires n >= 2k + 2, which also keeps the trustworthiness
    normalizer 2n - 3k - 1 positive.
    """
    hd = np.asarray(hd, dtype=float)
    ld = np.asarray(ld, dtype=float)
    if hd.ndim != 2 or ld.ndim != 2:
        raise ValueError("hd and ld must be 2-D arrays")
    if ld.shape[1] != 2:
        raise ValueError("ld must have exactly two columns")
    if hd.shape[0] != ld.shape[0]:
        raise ValueError("hd and ld must hold the same number of points")
    if not (np.isfinite(hd).all() and np.isfinite(ld).all()):
        raise ValueError("inputs must be finite")
    if k < 1:
        raise ValueError("k must be at least 1")
    n = hd.shape[0]
    if n < 2 * k + 2:
        raise TooFewPoints(f"need n >= 2k + 2 = {2 * k + 2}, got n={n}")

    dist_hd = _pairwise(hd)
    dist_ld = _pairwise(ld)
    order_hd = _neighbor_order(dist_hd)
    order_ld = _neighbor_order(dist_ld)
    rank_hd = np.empty((n, n), dtype=int)
    rank_hd[np.arange(n)[:, None], order_hd] = np.arange(1, n)[None, :]

    penalty = 0
    overlap_total = 0
    for i in range(n):
        hd_nn = set(order_hd[i, :k].tolist())
        ld_nn = set(order_ld[i, :k].tolist())
        for j in ld_nn - hd_nn:
            penalty += int(rank_hd[i, j]) - k
        overlap_total += len(hd_nn & ld_nn)
    trustworthiness = 1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1))
    knn_preservation = overlap_total / (n * k)

    rows, cols = np.triu_indices(n, 1)
    upper_hd = dist_hd[rows, cols]
    upper_ld = dist_ld[rows, cols]
    spearman = _spearman(upper_hd, upper_ld)

    ld_energy = float((upper_ld ** 2).sum())
    beta = float((upper_hd * upper_ld).sum()) / ld_energy if ld_energy > 0 else 0.0
    hd_energy = float((upper_hd ** 2).sum())
    if hd_energy > 0:
        residual = upper_hd - beta * upper_ld
        stress = float(np.sqrt((residual ** 2).sum() / hd_energy))
    else:
        stress = 0.0  # a fully degenerate cloud is preserved vacuously

    return QualityReport(trustworthiness=trustworthiness,
                         knn_preservation=knn_preservation,
                         shepard_spearman=spearman,
                         normalized_stress=stress,
                         k_used=k)
