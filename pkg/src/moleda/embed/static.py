"""Static spectral embeddings: PCA and kernel PCA."""

from __future__ import annotations

import numpy as np

from .base import DegenerateData, Embedding, RankDeficient, fit_frame, fix_signs
from .kernels import KernelMatrix


def pca(vectors, dims: int = 2) -> Embedding:
    """Project mean-centered data on its top right singular directions.

    Components are ordered by decreasing variance. The sign convention
    makes the largest-magnitude loading of every component positive, so
    output orientation does not depend on the eigensolver.
    """
    data = np.asarray(vectors, dtype=float)
    if data.ndim != 2:
        raise ValueError("vectors must form a 2-D array")
    n = data.shape[0]
    if n < 3:
        raise ValueError("pca requires at least 3 points")
    if dims < 1:
        raise ValueError("dims must be at least 1")
    if float(np.ptp(data, axis=0).max()) == 0.0:
        raise DegenerateData("all points identical")
    centered = data - data.mean(axis=0)
    left, singular, loadings = np.linalg.svd(centered, full_matrices=False)
    available = min(dims, singular.shape[0])
    for d in range(available):
        pivot = int(np.argmax(np.abs(loadings[d])))
        if loadings[d, pivot] < 0:
            loadings[d] = -loadings[d]
            left[:, d] = -left[:, d]
    raw = np.zeros((n, dims))
    raw[:, :available] = left[:, :available] * singular[:available]
    frame = fit_frame(raw)
    provenance = {
        "dims": dims,
        "singular_values": [float(s) for s in singular[:available]],
        "frame_scale": frame.scale,
    }
    return Embedding(coords=frame.apply(raw), method="pca", version=1,
                     provenance=provenance)


def kpca_raw(kbar: np.ndarray, dims: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Unframed kernel PCA coordinates sqrt(lambda_d) * v_d, sign-fixed.

    Returns (raw coords, eigenvalues). Raises RankDeficient when fewer
    than `dims` eigenvalues are positive (relative tolerance 1e-12).
    """
    eigenvalues, eigenvectors = np.linalg.eigh(kbar)
    magnitude = float(max(abs(eigenvalues[0]), abs(eigenvalues[-1]))) if eigenvalues.size else 0.0
    positive = eigenvalues > magnitude * 1e-12
    if int(positive.sum()) < dims:
        raise RankDeficient(
            f"need {dims} positive eigenvalues, found {int(positive.sum())}")
    top = np.argsort(eigenvalues)[::-1][:dims]
    lams = eigenvalues[top]
    vecs = fix_signs(eigenvectors[:, top])
    return vecs * np.sqrt(lams), lams


def kpca(kernel: KernelMatrix, dims: int = 2) -> Embedding:
    """Embed via the top eigenpairs of a centered Gram matrix."""
    if not kernel.centered:
        raise ValueError("kpca requires a centered kernel")
    if kernel.n < 3:
        raise ValueError("kpca requires at least 3 points")
    raw, lams = kpca_raw(kernel.values, dims)
    frame = fit_frame(raw)
    spec = kernel.spec
    provenance = {
        "kernel": None if spec is None else {"kind": spec.kind, "gamma": spec.gamma},
        "eigenvalues": [float(v) for v in lams],
        "frame_scale": frame.scale,
    }
    return Embedding(coords=frame.apply(raw), method="kpca", version=1,
                     provenance=provenance)
