#!/usr/bin/env python3
"""Generate a seeded demo corpus of small oxidized organics as JSONL.

Each record carries an id, a SMILES string built from family templates
(alkanes, alcohols, acids, peroxides, nitrates, aromatics, rings,
halides), the molecular mass computed from the parsed graph, and the
family tag. The output feeds straight into `moleda ingest`.

    python3 scripts/generate_demo_data.py --n 500 --seed 0 --out demo.jsonl
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from moleda.smiles import implicit_hydrogens, parse_smiles

ATOMIC_MASS = {
    "H": 1.008, "B": 10.81, "C": 12.011, "N": 14.007, "O": 15.999,
    "F": 18.998, "Si": 28.085, "P": 30.974, "S": 32.06, "Cl": 35.45,
    "Br": 79.904, "I": 126.904,
}

FAMILIES = (
    ("alkane", ""),
    ("alcohol", "O"),
    ("acid", "C(=O)O"),
    ("peroxide", "OO"),
    ("nitrate", "O[N+](=O)[O-]"),
    ("aromatic", "c1ccccc1"),
    ("cyclic", "C1CCCCC1"),
    ("halide", "Cl"),
)


def molecular_mass(smiles: str) -> float:
    total = 0.0
    for graph in parse_smiles(smiles):
        for i, atom in enumerate(graph.atoms):
            total += ATOMIC_MASS[atom.element]
            total += implicit_hydrogens(graph, i) * ATOMIC_MASS["H"]
    return round(total, 3)


def build_records(n: int, seed: int) -> list[dict]:
    rng = np.random.RandomState(seed)
    records = []
    for i in range(n):
        family, suffix = FAMILIES[i % len(FAMILIES)]
        chain = "C" * int(rng.randint(1, 9))
        smiles = chain + suffix
        records.append({
            "id": f"demo-{i:05d}",
            "smiles": smiles,
            "mass": molecular_mass(smiles),
            "family": family,
            "chain_length": len(chain),
        })
    return records


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="demo.jsonl")
    args = parser.parse_args(argv)

    records = build_records(args.n, args.seed)
    with open(args.out, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    print(f"wrote {len(records)} records to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
