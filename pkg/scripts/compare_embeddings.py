#!/usr/bin/env python3
"""Compare embedding methods on a demo corpus by quality metrics.

Synthesizes a seeded molecule corpus (same families as
generate_demo_data), fingerprints it, embeds with each method, and
prints the four preservation metrics per method. t-SNE runs with a
corpus-appropriate perplexity; LSP anchors three KPCA positions.

    python3 scripts/compare_embeddings.py --n 300 --seed 0
"""

from __future__ import annotations

import argparse
import sys

from moleda.embed import ConstraintSet, TsneParams
from moleda.pipeline import embed_coordinates, fingerprint_batch
from moleda.quality import embedding_quality

from generate_demo_data import build_records


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=300)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--tsne-iters", type=int, default=500)
    args = parser.parse_args(argv)

    records = build_records(args.n, args.seed)
    batch = fingerprint_batch([r["smiles"] for r in records], "hashed_path",
                              None)
    vectors = batch.dense()

    kpca_embedding, _ = embed_coordinates(vectors, "kpca")
    anchors = tuple(
        (i, float(kpca_embedding.coords[i, 0]),
         float(kpca_embedding.coords[i, 1]))
        for i in (0, args.n // 2, args.n - 1))
    perplexity = min(30.0, (args.n - 1) / 4)

    runs = [
        ("pca", {}),
        ("kpca", {}),
        ("ckpca", {"constraints": ConstraintSet(control_points=anchors)}),
        ("tsne", {"tsne_params": TsneParams(perplexity=perplexity,
                                            iters=args.tsne_iters,
                                            seed=args.seed)}),
        ("lsp", {"constraints": ConstraintSet(control_points=anchors)}),
    ]

    header = (f"{'method':>8}  {'trust':>7}  {'knn':>7}  "
              f"{'spearman':>9}  {'stress':>7}")
    print(header)
    print("-" * len(header))
    for method, kwargs in runs:
        embedding, _ = embed_coordinates(vectors, method, **kwargs)
        report = embedding_quality(vectors, embedding.coords, k=args.k)
        print(f"{method:>8}  {report.trustworthiness:>7.4f}  "
              f"{report.knn_preservation:>7.4f}  "
              f"{report.shepard_spearman:>9.4f}  "
              f"{report.normalized_stress:>7.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
