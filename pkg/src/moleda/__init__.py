"""Molecular exploratory-data-analysis toolkit.

SMILES parsing, bit-vector fingerprints, clustering with validity
indices, 2-D embeddings (PCA/KPCA/t-SNE/LSP) including interactively
constrained kernel PCA, embedding-quality metrics, and an embedded
document store. The HTTP + WebSocket service lives in
:mod:`moleda.server` and the command-line front end in
:mod:`moleda.cli`; both are imported on demand so the numeric core
stays importable without web dependencies.
"""

from .cluster import (
    Clustering,
    DegenerateLabeling,
    KTooLarge,
    ValidityReport,
    agglomerative,
    kmeans,
    validity,
)
from .docstore import (
    Boxplot,
    DocStore,
    Document,
    FieldSummary,
    FilterError,
    IngestResult,
    NonNumericField,
    ParseError,
    UnknownCollection,
)
from .embed import (
    ConstraintSet,
    Embedding,
    InvalidConstraint,
    KernelSpec,
    PerplexityTooLarge,
    SingularSystem,
    TooFewControls,
    TsneParams,
    UnknownControl,
    build_kernel,
    center,
    ckpca_move_control,
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
    atmo_keys,
    fingerprint_smiles,
    path_fingerprint,
    tanimoto,
)
from .quality import QualityReport, TooFewPoints, embedding_quality
from .smiles import MolecularGraph, SmilesParseError, implicit_hydrogens, parse_smiles

__version__ = "0.1.0"

__all__ = [
    "Clustering",
    "DegenerateLabeling",
    "KTooLarge",
    "ValidityReport",
    "agglomerative",
    "kmeans",
    "validity",
    "Boxplot",
    "DocStore",
    "Document",
    "FieldSummary",
    "FilterError",
    "IngestResult",
    "NonNumericField",
    "ParseError",
    "UnknownCollection",
    "ConstraintSet",
    "Embedding",
    "InvalidConstraint",
    "KernelSpec",
    "PerplexityTooLarge",
    "SingularSystem",
    "TooFewControls",
    "TsneParams",
    "UnknownControl",
    "build_kernel",
    "center",
    "ckpca_move_control",
    "ckpca_solve",
    "ckpca_state",
    "kpca",
    "lsp",
    "pca",
    "tsne",
    "ATMO_KEY_NAMES",
    "Fingerprint",
    "PathConfig",
    "atmo_keys",
    "fingerprint_smiles",
    "path_fingerprint",
    "tanimoto",
    "QualityReport",
    "TooFewPoints",
    "embedding_quality",
    "MolecularGraph",
    "SmilesParseError",
    "implicit_hydrogens",
    "parse_smiles",
    "__version__",
]
