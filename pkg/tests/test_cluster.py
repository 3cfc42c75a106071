"""Tests for moleda.cluster: k-means, agglomerative merging, validity indices.

The agglomerative solver is checked against a naive reference that recomputes
every cluster-to-cluster linkage directly from the raw points at each merge,
and the validity indices are checked against hand-evaluated examples plus
scikit-learn (test-only oracle).
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn import metrics as skmetrics

from moleda.cluster import (
    LINKAGES,
    Clustering,
    DegenerateLabeling,
    KTooLarge,
    ValidityReport,
    agglomerative,
    kmeans,
    validity,
)


# ---------------------------------------------------------------------------
# fixtures and oracles
# ---------------------------------------------------------------------------


def two_blobs(n: int = 200, seed: int = 7) -> tuple[np.ndarray, np.ndarray]:
    """Two 1-D unit-variance Gaussian blobs whose means sit 20 sigma apart."""
    rng = np.random.RandomState(seed)
    half = n // 2
    left = rng.normal(0.0, 1.0, size=(half, 1))
    right = rng.normal(20.0, 1.0, size=(n - half, 1))
    points = np.vstack([left, right])
    truth = np.array([0] * half + [1] * (n - half))
    return points, truth


def naive_agglomerate(points: np.ndarray, k: int, linkage: str) -> np.ndarray:
    """Brute-force reference agglomerator, O(n^3), straight from definitions.

    Clusters are member-index lists identified by their smallest member;
    every pairwise linkage value is recomputed from the raw points at each
    step.  Ties pick the lexicographically smallest identifier pair.  Labels
    are assigned to surviving clusters in order of smallest member.
    """
    points = np.asarray(points, dtype=float)
    clusters = [[i] for i in range(len(points))]
    while len(clusters) > k:
        best = None
        best_pair = None
        for a, b in itertools.combinations(range(len(clusters)), 2):
            xs, ys = points[clusters[a]], points[clusters[b]]
            if linkage == "single":
                value = min(
                    float(np.linalg.norm(x - y)) for x in xs for y in ys)
            elif linkage == "average":
                value = float(
                    np.mean([np.linalg.norm(x - y) for x in xs for y in ys]))
            else:  # ward: twice the merge increase in within-cluster SSE
                na, nb = len(xs), len(ys)
                gap = xs.mean(axis=0) - ys.mean(axis=0)
                value = 2.0 * na * nb / (na + nb) * float(gap @ gap)
            key = (value, clusters[a][0], clusters[b][0])
            if best is None or key < best:
                best = key
                best_pair = (a, b)
        a, b = best_pair
        merged = sorted(clusters[a] + clusters[b])
        clusters = [c for i, c in enumerate(clusters) if i not in (a, b)]
        clusters.append(merged)
        clusters.sort(key=lambda c: c[0])
    labels = np.empty(len(points), dtype=int)
    for label, members in enumerate(sorted(clusters, key=lambda c: c[0])):
        labels[members] = label
    return labels


def hand_silhouette(points: np.ndarray, labels: np.ndarray) -> float:
    """Silhouette straight from the definition, singletons scoring zero."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    scores = []
    for i in range(n):
        own = np.flatnonzero(labels == labels[i])
        if len(own) == 1:
            scores.append(0.0)
            continue
        a = dist[i, own].sum() / (len(own) - 1)
        b = min(
            dist[i, labels == other].mean()
            for other in np.unique(labels) if other != labels[i])
        scores.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return float(np.mean(scores))


def assert_valid_partition(result: Clustering, n: int, k: int) -> None:
    assert result.k == k
    assert result.labels.shape == (n,)
    assert sorted(set(result.labels.tolist())) == list(range(k))


# ---------------------------------------------------------------------------
# k-means
# ---------------------------------------------------------------------------


class TestKmeans:
    def test_k1_center_is_mean(self):
        rng = np.random.RandomState(3)
        points = rng.normal(size=(17, 4))
        result = kmeans(points, 1, seed=0)
        assert_valid_partition(result, 17, 1)
        np.testing.assert_allclose(
            result.centers[0], points.mean(axis=0), atol=1e-10)

    def test_k_equals_n_singletons_zero_inertia(self):
        rng = np.random.RandomState(4)
        points = rng.normal(size=(9, 3))
        result = kmeans(points, 9, seed=1)
        assert_valid_partition(result, 9, 9)
        assert result.inertia == 0.0
        reordered = result.centers[result.labels]
        np.testing.assert_array_equal(reordered, points)

    def test_two_blobs_exact_partition(self):
        points, truth = two_blobs()
        result = kmeans(points, 2, seed=0)
        assert skmetrics.adjusted_rand_score(truth, result.labels) == 1.0

    def test_deterministic_given_seed(self):
        rng = np.random.RandomState(5)
        points = rng.normal(size=(40, 6))
        first = kmeans(points, 5, seed=11)
        second = kmeans(points, 5, seed=11)
        np.testing.assert_array_equal(first.labels, second.labels)
        np.testing.assert_array_equal(first.centers, second.centers)
        assert first.inertia == second.inertia

    def test_inertia_matches_partition(self):
        rng = np.random.RandomState(6)
        points = rng.normal(size=(60, 3))
        result = kmeans(points, 4, seed=2)
        recomputed = sum(
            float(((points[result.labels == c] - result.centers[c]) ** 2).sum())
            for c in range(4))
        assert result.inertia == pytest.approx(recomputed, rel=1e-12)

    def test_inertia_history_non_increasing(self):
        rng = np.random.RandomState(7)
        points = rng.normal(size=(120, 5))
        result = kmeans(points, 6, seed=3)
        history = np.array(result.inertia_history)
        assert len(history) >= 1
        assert history[-1] == result.inertia
        slack = 1e-9 * (1.0 + np.abs(history[:-1]))
        assert (np.diff(history) <= slack).all()

    def test_duplicate_points_repair_empty_clusters(self):
        points = np.array([[0.0], [0.0], [0.0], [1.0], [1.0], [1.0]])
        for seed in range(10):
            result = kmeans(points, 4, seed=seed)
            assert_valid_partition(result, 6, 4)
            assert np.isfinite(result.inertia)

    def test_k_too_large_and_bad_k(self):
        points = np.zeros((5, 2))
        with pytest.raises(KTooLarge):
            kmeans(points, 6, seed=0)
        with pytest.raises(ValueError):
            kmeans(points, 0, seed=0)

    def test_centers_shape_and_seed_recorded(self):
        rng = np.random.RandomState(8)
        points = rng.normal(size=(30, 4))
        result = kmeans(points, 3, seed=42)
        assert result.centers.shape == (3, 4)
        assert result.seed == 42
        assert result.labels.flags.writeable is False


# ---------------------------------------------------------------------------
# agglomerative
# ---------------------------------------------------------------------------


class TestAgglomerative:
    def test_single_linkage_gap(self):
        points = np.array([[0.0], [1.0], [10.0], [11.0]])
        result = agglomerative(points, 2, linkage="single")
        np.testing.assert_array_equal(result.labels, [0, 0, 1, 1])

    def test_k_equals_n_singletons(self):
        rng = np.random.RandomState(9)
        points = rng.normal(size=(7, 2))
        for linkage in LINKAGES:
            result = agglomerative(points, 7, linkage=linkage)
            np.testing.assert_array_equal(result.labels, np.arange(7))
            assert result.inertia == 0.0
            assert result.centers is None

    def test_tie_breaks_toward_smaller_pair(self):
        # d(0,1) == d(1,2); the (0,1) merge must win the tie.
        points = np.array([[0.0], [1.0], [2.0]])
        result = agglomerative(points, 2, linkage="single")
        np.testing.assert_array_equal(result.labels, [0, 0, 1])

    @pytest.mark.parametrize("linkage", LINKAGES)
    def test_matches_naive_reference_40x5(self, linkage):
        rng = np.random.RandomState(10)
        points = rng.normal(size=(40, 5))
        for k in (2, 5, 11):
            mine = agglomerative(points, k, linkage=linkage)
            reference = naive_agglomerate(points, k, linkage)
            np.testing.assert_array_equal(mine.labels, reference)

    @pytest.mark.parametrize("linkage", LINKAGES)
    def test_matches_scipy_partitions(self, linkage):
        from scipy.cluster.hierarchy import fcluster, linkage as scipy_linkage

        rng = np.random.RandomState(11)
        points = rng.normal(size=(35, 4))
        link = scipy_linkage(points, method=linkage)
        for k in (2, 4, 9):
            mine = agglomerative(points, k, linkage=linkage)
            theirs = fcluster(link, t=k, criterion="maxclust")
            assert skmetrics.adjusted_rand_score(theirs, mine.labels) == 1.0

    def test_inertia_is_within_cluster_sse(self):
        rng = np.random.RandomState(12)
        points = rng.normal(size=(25, 3))
        result = agglomerative(points, 4, linkage="ward")
        expected = sum(
            float(((points[result.labels == c]
                    - points[result.labels == c].mean(axis=0)) ** 2).sum())
            for c in range(4))
        assert result.inertia == pytest.approx(expected, rel=1e-12)

    def test_errors(self):
        points = np.zeros((4, 2))
        with pytest.raises(KTooLarge):
            agglomerative(points, 5, linkage="single")
        with pytest.raises(ValueError):
            agglomerative(points, 1, linkage="single")
        with pytest.raises(ValueError):
            agglomerative(np.zeros((6, 2)), 2, linkage="centroid")


# ---------------------------------------------------------------------------
# validity indices
# ---------------------------------------------------------------------------


class TestValidity:
    def test_hand_silhouette_example(self):
        points = np.array([[0.0], [0.1], [10.0], [10.1]])
        labels = np.array([0, 0, 1, 1])
        report = validity(points, labels)
        assert report.silhouette == pytest.approx(0.990, abs=1e-3)
        # Exact hand evaluation: s = (b - a) / max(a, b) per point.
        expected = np.mean([9.95 / 10.05, 9.85 / 9.95, 9.85 / 9.95, 9.95 / 10.05])
        assert report.silhouette == pytest.approx(expected, abs=1e-12)

    def test_singletons_contribute_zero(self):
        points = np.array([[0.0], [0.2], [5.0], [9.0], [14.0]])
        labels = np.array([0, 0, 1, 2, 3])
        report = validity(points, labels)
        pair_scores = [
            s for i, s in enumerate(_silhouette_samples(points, labels))
            if labels.tolist().count(labels[i]) > 1]
        assert report.silhouette == pytest.approx(sum(pair_scores) / 5, abs=1e-12)
        assert report.silhouette == pytest.approx(
            hand_silhouette(points, labels), abs=1e-12)

    def test_blobs_davies_bouldin_small(self):
        points, truth = two_blobs()
        report = validity(points, truth)
        assert report.davies_bouldin < 0.1

    def test_matches_sklearn(self):
        rng = np.random.RandomState(13)
        points = rng.normal(size=(50, 4))
        labels = kmeans(points, 5, seed=0).labels
        report = validity(points, labels)
        assert report.silhouette == pytest.approx(
            skmetrics.silhouette_score(points, labels), abs=1e-9)
        assert report.calinski_harabasz == pytest.approx(
            skmetrics.calinski_harabasz_score(points, labels), rel=1e-9)
        assert report.davies_bouldin == pytest.approx(
            skmetrics.davies_bouldin_score(points, labels), rel=1e-9)

    def test_permutation_of_cluster_ids(self):
        rng = np.random.RandomState(14)
        points = rng.normal(size=(30, 3))
        labels = kmeans(points, 4, seed=1).labels
        permuted = np.array([3, 0, 1, 2])[labels]
        base = validity(points, labels)
        swapped = validity(points, permuted)
        assert base == swapped

    def test_translation_invariance(self):
        rng = np.random.RandomState(15)
        points = rng.normal(size=(40, 3))
        labels = kmeans(points, 3, seed=2).labels
        base = validity(points, labels)
        shifted = validity(points + np.array([5.0, -2.0, 100.0]), labels)
        assert shifted.silhouette == pytest.approx(base.silhouette, abs=1e-8)
        assert shifted.calinski_harabasz == pytest.approx(
            base.calinski_harabasz, rel=1e-8)
        assert shifted.davies_bouldin == pytest.approx(
            base.davies_bouldin, rel=1e-8)

    def test_ranges(self):
        rng = np.random.RandomState(16)
        points = rng.normal(size=(30, 2))
        labels = kmeans(points, 5, seed=3).labels
        report = validity(points, labels)
        assert -1.0 <= report.silhouette <= 1.0
        assert report.calinski_harabasz >= 0.0
        assert report.davies_bouldin >= 0.0

    def test_degenerate_labelings(self):
        points = np.random.RandomState(17).normal(size=(6, 2))
        with pytest.raises(DegenerateLabeling):
            validity(points, np.zeros(6, dtype=int))
        with pytest.raises(DegenerateLabeling):
            validity(points, np.arange(6))
        with pytest.raises(ValueError):
            validity(points, np.zeros(5, dtype=int))


def _silhouette_samples(points: np.ndarray, labels: np.ndarray) -> list[float]:
    """Per-point silhouettes straight from the definition (test-local)."""
    dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    out = []
    for i in range(len(points)):
        own = np.flatnonzero(labels == labels[i])
        if len(own) == 1:
            out.append(0.0)
            continue
        a = dist[i, own].sum() / (len(own) - 1)
        b = min(
            dist[i, labels == other].mean()
            for other in np.unique(labels) if other != labels[i])
        out.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return out


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 8))
def test_property_kmeans_partitions_are_valid(seed: int, k: int):
    rng = np.random.RandomState(seed % 997)
    points = rng.normal(size=(20, 3))
    result = kmeans(points, k, seed=seed)
    assert_valid_partition(result, 20, k)
    again = kmeans(points, k, seed=seed)
    np.testing.assert_array_equal(result.labels, again.labels)


@settings(deadline=None, max_examples=20)
@given(
    seed=st.integers(0, 10_000),
    k=st.integers(2, 6),
    linkage=st.sampled_from(LINKAGES),
)
def test_property_agglomerative_matches_naive(seed: int, k: int, linkage: str):
    rng = np.random.RandomState(seed % 9973)
    points = rng.normal(size=(10, 3))
    mine = agglomerative(points, k, linkage=linkage)
    np.testing.assert_array_equal(mine.labels, naive_agglomerate(points, k, linkage))


@settings(deadline=None, max_examples=25)
@given(
    seed=st.integers(0, 10_000),
    shift=st.lists(
        st.floats(-50, 50, allow_nan=False, allow_infinity=False),
        min_size=3, max_size=3),
)
def test_property_validity_translation_invariant(seed: int, shift: list[float]):
    rng = np.random.RandomState(seed % 7919)
    points = rng.normal(size=(18, 3))
    labels = kmeans(points, 3, seed=0).labels
    base = validity(points, labels)
    moved = validity(points + np.array(shift), labels)
    assert moved.silhouette == pytest.approx(base.silhouette, abs=1e-8)
    assert moved.calinski_harabasz == pytest.approx(
        base.calinski_harabasz, rel=1e-8, abs=1e-8)
    assert moved.davies_bouldin == pytest.approx(
        base.davies_bouldin, rel=1e-8, abs=1e-8)
