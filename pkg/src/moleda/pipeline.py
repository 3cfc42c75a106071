"""Shared numeric pipeline behind the HTTP service and the CLI.

Both frontends run fingerprinting, embedding, and quality scoring
through these helpers with identical inputs, which is what keeps batch
outputs and wire payloads numerically identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import (
    CkpcaState,
    ConstraintSet,
    Embedding,
    KernelSpec,
    TsneParams,
    build_kernel,
    center,
    ckpca_solve,
    ckpca_state,
    kpca,
    lsp,
    pca,
    tsne,
)
from .fingerprint import (
    ATMO_KEY_NAMES,
    Fingerprint,
    PathConfig,
    fingerprint_smiles,
)
from .quality import QualityReport, TooFewPoints, embedding_quality
from .smiles import SmilesParseError

FINGERPRINT_METHODS = ("hashed_path", "atmo_keys")
EMBED_METHODS = ("pca", "kpca", "ckpca", "tsne", "lsp")
CLUSTER_ALGOS = ("kmeans", "agglomerative")
DEFAULT_KERNEL_KIND = "tanimoto"
DEFAULT_QUALITY_K = 10


@dataclass(frozen=True)
class FingerprintBatch:
    """Fingerprints for one working set, unparseable records included.

    Records whose smiles fail to parse contribute an all-zero
    fingerprint and are tallied in ``n_failed`` so downstream matrices
    keep one row per molecule.
    """

    fingerprints: tuple[Fingerprint, ...]
    method: str
    dimension: int
    n_failed: int

    def dense(self) -> np.ndarray:
        if not self.fingerprints:
            return np.zeros((0, self.dimension))
        return np.array([fp.to_dense() for fp in self.fingerprints])

    def density_stats(self) -> dict | None:
        if not self.fingerprints:
            return None
        densities = [len(fp.bits) / fp.n_bits for fp in self.fingerprints]
        return {"mean": float(np.mean(densities)),
                "min": min(densities),
                "max": max(densities)}


def path_config(params: dict) -> PathConfig:
    """hashed_path parameters -> config; ValueError on anything unknown."""
    unknown = set(params) - {"max_len", "n_bits"}
    if unknown:
        raise ValueError(f"unknown parameters: {sorted(unknown)}")
    try:
        return PathConfig(**params)
    except TypeError as exc:
        raise ValueError(str(exc)) from exc


def fingerprint_batch(smiles_list, method: str = "hashed_path",
                      config: PathConfig | None = None) -> FingerprintBatch:
    if method == "hashed_path":
        config = PathConfig() if config is None else config
        dimension = config.n_bits
    elif method == "atmo_keys":
        dimension = len(ATMO_KEY_NAMES)
    else:
        raise ValueError(f"unknown fingerprint method {method!r}")
    fingerprints: list[Fingerprint] = []
    n_failed = 0
    for smiles in smiles_list:
        try:
            if method == "hashed_path":
                fp = fingerprint_smiles(smiles, method=method, config=config)
            else:
                fp = fingerprint_smiles(smiles, method=method)
        except SmilesParseError:
            n_failed += 1
            fp = Fingerprint(bits=frozenset(), n_bits=dimension,
                             method=method)
        fingerprints.append(fp)
    return FingerprintBatch(fingerprints=tuple(fingerprints), method=method,
                            dimension=dimension, n_failed=n_failed)


def embed_coordinates(vectors, method: str, *,
                      kernel_spec: KernelSpec | None = None,
                      constraints: ConstraintSet | None = None,
                      tsne_params: TsneParams | None = None,
                      k_neighbors: int = 10
                      ) -> tuple[Embedding, CkpcaState | None]:
    """One entry point for every embedding method.

    Returns the embedding plus, for ckpca, the live solver state whose
    frame stays fixed across later interactive updates.
    """
    constraints = ConstraintSet() if constraints is None else constraints
    if method == "pca":
        return pca(vectors), None
    if method in ("kpca", "ckpca"):
        spec = KernelSpec(kind=DEFAULT_KERNEL_KIND) \
            if kernel_spec is None else kernel_spec
        kernel = center(build_kernel(vectors, spec))
        if method == "kpca":
            return kpca(kernel), None
        solver = ckpca_state(kernel)
        return ckpca_solve(solver, constraints), solver
    if method == "tsne":
        return tsne(vectors, TsneParams() if tsne_params is None
                    else tsne_params), None
    if method == "lsp":
        return lsp(vectors, constraints.control_points,
                   k_neighbors=k_neighbors), None
    raise ValueError(f"unknown embedding method {method!r}")


def quality_report(vectors, coords) -> QualityReport | None:
    """Quality at k = min(10, (n-2)//2); None when n is too small."""
    n = np.asarray(vectors).shape[0]
    k_used = min(DEFAULT_QUALITY_K, (n - 2) // 2)
    if k_used < 1:
        return None
    try:
        return embedding_quality(vectors, coords, k_used)
    except TooFewPoints:
        return None
