"""PCA and kernel PCA tests.

The PCA oracle is an independent covariance eigendecomposition; the KPCA
oracle is the textbook equivalence with PCA under a linear kernel. Both
comparisons normalize column signs on each side before comparing, and
re-apply the unit frame the same way the solvers do.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moleda.embed import (
    DegenerateData,
    KernelMatrix,
    KernelSpec,
    RankDeficient,
    build_kernel,
    center,
    column_signs,
    kpca,
    pca,
)


def unit_frame(coords: np.ndarray) -> np.ndarray:
    lows, highs = coords.min(axis=0), coords.max(axis=0)
    side = (highs - lows).max()
    scale = 2.0 / side if side > 0 else 1.0
    return scale * coords - scale * (highs + lows) / 2.0


def oriented(coords: np.ndarray) -> np.ndarray:
    """Sign-normalize framed columns for cross-solver comparison.

    The sign decision must be made on mean-centered columns: framed
    coordinates carry an offset, and negating a framed column equals
    framing the negated raw column (the frame is negation-symmetric).
    """
    return coords * column_signs(coords - coords.mean(axis=0))


def pca_oracle(data: np.ndarray) -> np.ndarray:
    """Top-2 covariance eigendecomposition, sign-normalized and framed."""
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (data.shape[0] - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:2]
    coords = centered @ eigenvectors[:, order]
    return oriented(unit_frame(coords))


class TestPca:
    def test_centered_two_d_data_is_reproduced(self):
        # Box max side already 2 and mean zero, so the frame is the identity.
        points = np.array([[1.0, 0.3], [1.0, -0.3], [-1.0, 0.3], [-1.0, -0.3]])
        emb = pca(points)
        assert np.allclose(emb.coords, points, atol=1e-12)
        assert emb.method == "pca"

    def test_collinear_points_have_zero_second_variance(self):
        direction = np.array([1.0, 2.0, -0.5])
        points = np.outer([0.0, 1.0, 2.0, 3.0], direction)
        emb = pca(points)
        assert float(emb.coords[:, 1].var()) <= 1e-10

    def test_identical_points_degenerate(self):
        with pytest.raises(DegenerateData):
            pca(np.ones((5, 3)))

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            pca(np.array([[1.0, 0.0], [0.0, 1.0]]))

    def test_matches_covariance_oracle(self):
        rng = np.random.RandomState(11)
        data = rng.normal(size=(10, 6))
        emb = pca(data)
        assert np.allclose(oriented(emb.coords), pca_oracle(data), atol=1e-8)

    def test_variance_ordering(self):
        rng = np.random.RandomState(12)
        data = rng.normal(size=(40, 5)) * np.array([5.0, 1.0, 1.0, 0.5, 0.2])
        emb = pca(data)
        assert emb.coords[:, 0].var() >= emb.coords[:, 1].var()

    def test_coords_read_only(self):
        emb = pca(np.random.RandomState(13).normal(size=(6, 3)))
        with pytest.raises(ValueError):
            emb.coords[0, 0] = 9.9


class TestKpca:
    def test_requires_centered_kernel(self):
        km = build_kernel(np.eye(4), KernelSpec(kind="linear"))
        with pytest.raises(ValueError, match="centered"):
            kpca(km)

    def test_linear_kernel_matches_pca(self):
        rng = np.random.RandomState(14)
        data = rng.normal(size=(15, 6))
        emb_k = kpca(center(build_kernel(data, KernelSpec(kind="linear"))))
        emb_p = pca(data)
        assert np.allclose(oriented(emb_k.coords), oriented(emb_p.coords),
                           atol=1e-8)

    def test_duplicate_points_coincide(self):
        rng = np.random.RandomState(15)
        data = rng.normal(size=(9, 4))
        data[7] = data[2]
        emb = kpca(center(build_kernel(data, KernelSpec(kind="rbf"))))
        assert np.allclose(emb.coords[7], emb.coords[2], atol=1e-10)

    def test_zero_matrix_rank_deficient(self):
        km = KernelMatrix(values=np.zeros((5, 5)), centered=True)
        with pytest.raises(RankDeficient):
            kpca(km)

    def test_output_is_framed(self):
        rng = np.random.RandomState(16)
        emb = kpca(center(build_kernel(rng.normal(size=(12, 5)),
                                       KernelSpec(kind="rbf"))))
        spans = emb.coords.max(axis=0) - emb.coords.min(axis=0)
        centers = (emb.coords.max(axis=0) + emb.coords.min(axis=0)) / 2.0
        assert spans.max() == pytest.approx(2.0, abs=1e-9)
        assert np.allclose(centers, 0.0, atol=1e-9)

    def test_provenance_records_kernel(self):
        rng = np.random.RandomState(17)
        emb = kpca(center(build_kernel(rng.normal(size=(8, 3)),
                                       KernelSpec(kind="rbf", gamma=0.7))))
        assert emb.provenance["kernel"] == {"kind": "rbf", "gamma": 0.7}


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000))
def test_property_permutation_invariance(seed):
    rng = np.random.RandomState(seed)
    data = rng.normal(size=(10, 4))
    perm = rng.permutation(10)
    base = kpca(center(build_kernel(data, KernelSpec(kind="rbf"))))
    permuted = kpca(center(build_kernel(data[perm], KernelSpec(kind="rbf"))))
    unpermuted = np.empty_like(permuted.coords)
    unpermuted[perm] = permuted.coords
    assert np.allclose(oriented(unpermuted), oriented(base.coords), atol=1e-8)


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000))
def test_property_pca_matches_oracle(seed):
    rng = np.random.RandomState(seed)
    data = rng.normal(size=(rng.randint(5, 20), rng.randint(3, 8)))
    emb = pca(data)
    assert np.allclose(oriented(emb.coords), pca_oracle(data), atol=1e-8)
