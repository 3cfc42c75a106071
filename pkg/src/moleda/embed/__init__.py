"""Dimensionality reduction: kernels, PCA/KPCA, constrained KPCA, t-SNE, LSP."""

from .base import (
    ConstraintSet,
    DegenerateData,
    Embedding,
    Frame,
    InvalidConstraint,
    RankDeficient,
    column_signs,
    fit_frame,
    fix_signs,
)
from .ckpca import (
    CkpcaState,
    SingularSystem,
    UnknownControl,
    ckpca_move_control,
    ckpca_solve,
    ckpca_state,
)
from .kernels import (
    KERNEL_KINDS,
    KernelMatrix,
    KernelSpec,
    MixedLengths,
    TanimotoOnDense,
    build_kernel,
    center,
)
from .lsp import TooFewControls, lsp
from .static import kpca, kpca_raw, pca
from .tsne import PerplexityTooLarge, TsneParams, tsne

__all__ = [
    "ConstraintSet",
    "DegenerateData",
    "Embedding",
    "Frame",
    "InvalidConstraint",
    "RankDeficient",
    "column_signs",
    "fit_frame",
    "fix_signs",
    "CkpcaState",
    "SingularSystem",
    "UnknownControl",
    "ckpca_move_control",
    "ckpca_solve",
    "ckpca_state",
    "KERNEL_KINDS",
    "KernelMatrix",
    "KernelSpec",
    "MixedLengths",
    "TanimotoOnDense",
    "build_kernel",
    "center",
    "TooFewControls",
    "lsp",
    "kpca",
    "kpca_raw",
    "pca",
    "PerplexityTooLarge",
    "TsneParams",
    "tsne",
]
