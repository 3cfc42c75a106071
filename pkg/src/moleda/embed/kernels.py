"""Gram matrix construction and centering for spectral embeddings.

Kernels are built from dense feature vectors (linear, rbf) or 0/1 bit
vectors (tanimoto) and symmetrized explicitly, so eigensolvers downstream
can rely on exact symmetry. Centering is the usual double-centering
K_bar = H K H with H = I - (1/n) 11^T.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

KERNEL_KINDS = ("linear", "rbf", "tanimoto")


class MixedLengths(ValueError):
    """Input vectors do not share a common length."""


class TanimotoOnDense(ValueError):
    """Tanimoto kernel requested for vectors that are not 0/1 valued."""


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus hyperparameters.

    gamma applies to the rbf kernel only; None means 1/feature_dim and is
    resolved when the kernel is built.
    """

    kind: str
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.gamma is not None:
            if self.kind != "rbf":
                raise ValueError("gamma is only meaningful for the rbf kernel")
            if not self.gamma > 0:
                raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric Gram matrix over n points, optionally centered."""

    values: np.ndarray
    centered: bool = False
    spec: KernelSpec | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("kernel matrix must be square")
        if not np.isfinite(values).all():
            raise ValueError("kernel matrix has non-finite entries")
        asymmetry = float(np.abs(values - values.T).max()) if values.size else 0.0
        if asymmetry > 1e-12:
            raise ValueError(f"kernel asymmetry {asymmetry:.3e} exceeds 1e-12")
        # Shared freely across threads; lock a private copy.
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _as_matrix(vectors) -> np.ndarray:
    rows = [np.asarray(v, dtype=float) for v in vectors]
    if len(rows) < 2:
        raise ValueError("need at least two vectors")
    if any(r.ndim != 1 for r in rows):
        raise ValueError("every vector must be one-dimensional")
    lengths = {r.shape[0] for r in rows}
    if len(lengths) > 1:
        raise MixedLengths(f"vector lengths differ: {sorted(lengths)}")
    return np.vstack(rows)


def build_kernel(vectors, spec: KernelSpec) -> KernelMatrix:
    """Build the Gram matrix of `vectors` under `spec`.

    The rbf and tanimoto diagonals are pinned to exactly 1. Tanimoto of
    two all-zero vectors is defined as 1 so the kernel stays total on
    empty fingerprints.
    """
    matrix = _as_matrix(vectors)
    _, dim = matrix.shape
    resolved = spec
    if spec.kind == "linear":
        gram = matrix @ matrix.T
    elif spec.kind == "rbf":
        gamma = spec.gamma if spec.gamma is not None else 1.0 / dim
        norms = np.einsum("ij,ij->i", matrix, matrix)
        sq_dists = norms[:, None] + norms[None, :] - 2.0 * (matrix @ matrix.T)
        np.maximum(sq_dists, 0.0, out=sq_dists)
        gram = np.exp(-gamma * sq_dists)
        np.fill_diagonal(gram, 1.0)
        resolved = replace(spec, gamma=gamma)
    else:
        if not ((matrix == 0.0) | (matrix == 1.0)).all():
            raise TanimotoOnDense("tanimoto kernel requires 0/1 bit vectors")
        popcounts = matrix.sum(axis=1)
        dot = matrix @ matrix.T
        union = popcounts[:, None] + popcounts[None, :] - dot
        gram = np.where(union > 0, dot / np.where(union > 0, union, 1.0), 1.0)
        np.fill_diagonal(gram, 1.0)
    gram = (gram + gram.T) / 2.0
    return KernelMatrix(values=gram, centered=False, spec=resolved)


def center(kernel: KernelMatrix) -> KernelMatrix:
    """Double-center a Gram matrix; every row of the result sums to zero."""
    if kernel.centered:
        raise ValueError("kernel matrix is already centered")
    values = kernel.values
    row_means = values.mean(axis=1, keepdims=True)
    col_means = values.mean(axis=0, keepdims=True)
    grand_mean = values.mean()
    centered = values - row_means - col_means + grand_mean
    centered = (centered + centered.T) / 2.0
    return KernelMatrix(values=centered, centered=True, spec=kernel.spec)
