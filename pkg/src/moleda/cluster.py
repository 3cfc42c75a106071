"""Clustering of feature vectors and partition-validity scoring.

Two partitioners share one result type: Lloyd k-means with k-means++
seeding, and bottom-up agglomerative merging driven by Lance-Williams
updates (single, average, or Ward linkage). Validity indices (mean
silhouette, Calinski-Harabasz, Davies-Bouldin) score any labeling under
the Euclidean metric.

Conventions chosen for determinism:

- Nearest-center ties assign to the smallest center index.
- Agglomerative clusters are identified by their smallest member index;
  merge ties pick the lexicographically smallest identifier pair, and
  final labels number surviving clusters by smallest member.
- Empty k-means clusters are repaired by reseeding onto the point
  farthest from its current center, never taking a cluster's last point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LINKAGES = ("single", "average", "ward")
MAX_LLOYD_ITERATIONS = 300


class KTooLarge(ValueError):
    """Requested more clusters than there are points."""


class DegenerateLabeling(ValueError):
    """Validity indices need 2 <= k <= n-1 distinct clusters."""


@dataclass(frozen=True)
class Clustering:
    """A hard partition: labels in [0, k), optional centers, and inertia.

    ``inertia`` is the within-cluster sum of squared Euclidean distances
    to cluster centroids. ``inertia_history`` records the value after
    every Lloyd update (empty for agglomerative results) so monotone
    descent is checkable from the outside.
    """

    labels: np.ndarray
    k: int
    centers: np.ndarray | None
    inertia: float
    seed: int | None
    inertia_history: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=int)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        present = np.unique(labels)
        if not np.array_equal(present, np.arange(self.k)):
            raise ValueError("every cluster id in [0, k) must occur at least once")
        if self.centers is not None:
            centers = np.array(self.centers, dtype=float)
            centers.setflags(write=False)
            object.__setattr__(self, "centers", centers)
            if centers.shape[0] != self.k:
                raise ValueError("centers must hold one row per cluster")

    @property
    def n(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True)
class ValidityReport:
    """Partition quality under the Euclidean metric."""

    silhouette: float
    calinski_harabasz: float
    davies_bouldin: float


def _as_points(vectors) -> np.ndarray:
    points = np.asarray(vectors, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("expected a non-empty 2-D array of points")
    if not np.isfinite(points).all():
        raise ValueError("points must be finite")
    return points


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, points x centers, one fixed formula.

    Per-iteration inertia comparisons rely on every distance inside the
    Lloyd loop coming from this exact expression.
    """
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _plus_plus_init(points: np.ndarray, k: int,
                    rng: np.random.RandomState) -> np.ndarray:
    """k-means++ seeding: D^2-weighted draws via inverse-CDF sampling."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.randint(n)]
    closest = _sq_dists(points, centers[:1])[:, 0]
    for c in range(1, k):
        total = float(closest.sum())
        if total > 0.0:
            cumulative = np.cumsum(closest)
            draw = rng.random_sample() * total
            idx = min(int(np.searchsorted(cumulative, draw, side="right")), n - 1)
        else:
            idx = int(rng.randint(n))
        centers[c] = points[idx]
        closest = np.minimum(closest, _sq_dists(points, centers[c:c + 1])[:, 0])
    return centers


def _repair_empty_clusters(points: np.ndarray, labels: np.ndarray,
                           centers: np.ndarray, sq: np.ndarray) -> None:
    """Reseed each empty cluster onto the farthest currently-assigned point.

    Donors are restricted to clusters with at least two members, so a
    repair never empties another cluster; by pigeonhole such a donor
    always exists while any cluster is empty.
    """
    k = centers.shape[0]
    counts = np.bincount(labels, minlength=k)
    current = sq[np.arange(points.shape[0]), labels].copy()
    for empty in np.flatnonzero(counts == 0):
        eligible = counts[labels] >= 2
        donor = int(np.where(eligible, current, -np.inf).argmax())
        counts[labels[donor]] -= 1
        counts[empty] += 1
        centers[empty] = points[donor]
        labels[donor] = empty
        current[donor] = 0.0


def kmeans(vectors, k: int, seed: int = 0) -> Clustering:
    """Lloyd k-means from a k-means++ start; deterministic given the seed.

    Iterates until the label assignment is stable or 300 iterations,
    asserting after every centroid update that inertia did not increase.
    """
    points = _as_points(vectors)
    n = points.shape[0]
    if k > n:
        raise KTooLarge(f"k={k} exceeds n={n}")
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = np.random.RandomState(seed)
    centers = _plus_plus_init(points, k, rng)
    previous_labels: np.ndarray | None = None
    previous_inertia = np.inf
    history: list[float] = []
    for _ in range(MAX_LLOYD_ITERATIONS):
        sq = _sq_dists(points, centers)
        labels = sq.argmin(axis=1)
        _repair_empty_clusters(points, labels, centers, sq)
        if previous_labels is not None and np.array_equal(labels, previous_labels):
            break
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
        inertia = float(_sq_dists(points, centers)[np.arange(n), labels].sum())
        assert inertia <= previous_inertia + 1e-9 * (1.0 + previous_inertia), \
            "Lloyd iteration increased inertia"
        history.append(inertia)
        previous_labels = labels
        previous_inertia = inertia
    return Clustering(labels=previous_labels, k=k, centers=centers,
                      inertia=history[-1], seed=seed,
                      inertia_history=tuple(history))


def _lance_williams_merge(dist: np.ndarray, sizes: np.ndarray, active: np.ndarray,
                          i: int, j: int, linkage: str) -> None:
    """Fold cluster j into cluster i, updating row/column i in place."""
    others = active.copy()
    others[[i, j]] = False
    di = dist[i, others]
    dj = dist[j, others]
    if linkage == "single":
        merged = np.minimum(di, dj)
    elif linkage == "average":
        merged = (sizes[i] * di + sizes[j] * dj) / (sizes[i] + sizes[j])
    else:  # ward, on dissimilarities equal to twice the merge SSE increase
        sm = sizes[others]
        merged = ((sizes[i] + sm) * di + (sizes[j] + sm) * dj
                  - sm * dist[i, j]) / (sizes[i] + sizes[j] + sm)
    dist[i, others] = merged
    dist[others, i] = merged
    dist[j, :] = np.inf
    dist[:, j] = np.inf
    sizes[i] += sizes[j]
    active[j] = False


def agglomerative(vectors, k: int, linkage: str = "average") -> Clustering:
    """Bottom-up merging under the requested linkage, cut at k clusters.

    Single and average linkage operate on Euclidean distances; Ward
    operates on squared distances, where the Lance-Williams recurrence
    maintains twice the within-cluster SSE increase of each merge.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    points = _as_points(vectors)
    n = points.shape[0]
    if k > n:
        raise KTooLarge(f"k={k} exceeds n={n}")
    if k < 2:
        raise ValueError("k must be at least 2")
    sq = _sq_dists(points, points)
    dist = sq if linkage == "ward" else np.sqrt(np.maximum(sq, 0.0))
    np.fill_diagonal(dist, np.inf)
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    active = np.ones(n, dtype=bool)
    sizes = np.ones(n, dtype=int)
    slot_of = np.arange(n)
    for _ in range(n - k):
        candidates = np.where(upper & active[:, None] & active[None, :],
                              dist, np.inf)
        i, j = divmod(int(candidates.argmin()), n)
        _lance_williams_merge(dist, sizes, active, i, j, linkage)
        slot_of[slot_of == j] = i
    rank = {slot: label for label, slot in enumerate(np.flatnonzero(active))}
    labels = np.array([rank[slot] for slot in slot_of])
    inertia = sum(
        float(((points[labels == c] - points[labels == c].mean(axis=0)) ** 2).sum())
        for c in range(k))
    return Clustering(labels=labels, k=k, centers=None,
                      inertia=inertia, seed=None)


def _first_occurrence_codes(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel clusters by first appearance so index sums are canonical.

    Permuting cluster ids then leaves every internal reduction order
    unchanged, making the validity indices bit-identical under renaming.
    """
    values, first, inverse = np.unique(labels, return_index=True,
                                       return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(values), dtype=int)
    rank[order] = np.arange(len(values))
    return rank[inverse], len(values)


def validity(vectors, labels) -> ValidityReport:
    """Mean silhouette, Calinski-Harabasz, and Davies-Bouldin scores.

    Silhouette follows the usual (b - a)/max(a, b) with singletons
    scoring zero; Calinski-Harabasz is (B/(k-1))/(W/(n-k)) about
    centroids; Davies-Bouldin averages the worst pairwise
    (sigma_i + sigma_j)/d(c_i, c_j) ratio per cluster.
    """
    points = _as_points(vectors)
    n = points.shape[0]
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError("labels must align with points")
    codes, k = _first_occurrence_codes(labels)
    if k < 2 or k > n - 1:
        raise DegenerateLabeling(f"validity needs 2 <= k <= n-1, got k={k}, n={n}")
    members = [np.flatnonzero(codes == c) for c in range(k)]
    dist = np.sqrt(np.maximum(_sq_dists(points, points), 0.0))

    scores = np.zeros(n)
    for c, own in enumerate(members):
        if len(own) == 1:
            continue
        a = dist[np.ix_(own, own)].sum(axis=1) / (len(own) - 1)
        b = np.min(np.stack([
            dist[np.ix_(own, other)].mean(axis=1)
            for d, other in enumerate(members) if d != c]), axis=0)
        denom = np.maximum(a, b)
        scores[own] = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    silhouette = float(scores.mean())

    grand = points.mean(axis=0)
    centroids = np.stack([points[own].mean(axis=0) for own in members])
    between = sum(
        len(own) * float(((centroids[c] - grand) ** 2).sum())
        for c, own in enumerate(members))
    within = sum(
        float(((points[own] - centroids[c]) ** 2).sum())
        for c, own in enumerate(members))
    if within > 0:
        calinski = float((between / (k - 1)) / (within / (n - k)))
    else:
        calinski = float("inf")

    sigma = np.array([
        float(np.linalg.norm(points[own] - centroids[c], axis=1).mean())
        for c, own in enumerate(members)])
    centroid_dist = np.sqrt(np.maximum(_sq_dists(centroids, centroids), 0.0))
    ratios = np.full((k, k), -np.inf)
    for c in range(k):
        for d in range(k):
            if c == d:
                continue
            gap = centroid_dist[c, d]
            ratios[c, d] = (sigma[c] + sigma[d]) / gap if gap > 0 else np.inf
    davies = float(ratios.max(axis=1).mean())

    return ValidityReport(silhouette=silhouette, calinski_harabasz=calinski,
                          davies_bouldin=davies)
