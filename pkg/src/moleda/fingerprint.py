"""Molecular fingerprints: hashed path enumeration and fixed substructure keys.

Two bit-vector representations of a molecular graph:

* :func:`path_fingerprint` enumerates every simple path of up to
  ``max_len`` bonds, serializes each to a canonical string, and hashes it
  with 64-bit FNV-1a into a fixed-width bit space (one presence bit per
  distinct path class).
* :func:`atmo_keys` evaluates a fixed, versioned panel of 24 boolean
  substructure keys aimed at oxidized organic molecules (acids,
  peroxides, nitrates, rings, ...).

Both return a :class:`Fingerprint`; similarity between fingerprints of
equal width is the Tanimoto coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

from .smiles import MolecularGraph, implicit_hydrogens, parse_smiles

__all__ = [
    "Fingerprint",
    "PathConfig",
    "LengthMismatch",
    "fnv1a64",
    "path_fingerprint",
    "atmo_keys",
    "ATMO_KEY_NAMES",
    "ATMO_KEYS_VERSION",
    "tanimoto",
    "fingerprint_smiles",
]

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211

_BOND_SYMBOLS = {1.0: "-", 1.5: ":", 2.0: "=", 3.0: "#"}

ATMO_KEYS_VERSION = "atmokeys-v1"

# Fixed key order defines bit positions; never reorder within a version.
ATMO_KEY_NAMES: tuple[str, ...] = (
    "contains_carbon",
    "contains_nitrogen",
    "contains_oxygen",
    "contains_sulfur",
    "contains_halogen",
    "oxygen_count_ge_3",
    "oxygen_count_ge_6",
    "carbon_count_ge_5",
    "carbon_count_ge_10",
    "hydroxyl",
    "carbonyl",
    "carboxyl",
    "ether",
    "peroxide",
    "hydroperoxide",
    "nitro_or_nitrate",
    "amine",
    "nitrile",
    "aromatic_ring",
    "nonaromatic_ring",
    "carbon_double_bond",
    "triple_bond",
    "charged",
    "sulfur_oxide",
)


class LengthMismatch(ValueError):
    """Tanimoto between fingerprints of different widths."""

    code = "length_mismatch"


@dataclass(frozen=True)
class PathConfig:
    """Hashed path fingerprint parameters.

    Attributes:
        max_len: maximum path length in bonds (paths span 1..max_len+1 atoms).
        n_bits: bit-space width; must be a power of two, at least 64.
    """

    max_len: int = 7
    n_bits: int = 2048

    def __post_init__(self) -> None:
        if self.max_len < 0:
            raise ValueError("max_len must be non-negative")
        if self.n_bits < 64 or self.n_bits & (self.n_bits - 1) != 0:
            raise ValueError("n_bits must be a power of two >= 64")


@dataclass(frozen=True)
class Fingerprint:
    """Sparse presence bit vector.

    Attributes:
        bits: set bit positions, each in [0, n_bits).
        n_bits: width of the bit space.
        method: identifier of the producing scheme, including parameters.
    """

    bits: frozenset[int]
    n_bits: int
    method: str

    def to_dense(self):
        """Dense 0/1 float vector (numpy array of length n_bits)."""
        import numpy as np

        dense = np.zeros(self.n_bits, dtype=np.float64)
        if self.bits:
            dense[sorted(self.bits)] = 1.0
        return dense


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _atom_label(graph: MolecularGraph, index: int) -> str:
    atom = graph.atoms[index]
    label = atom.element.lower() if atom.aromatic else atom.element
    q = atom.formal_charge
    if q > 0:
        label += "+" if q == 1 else f"+{q}"
    elif q < 0:
        label += "-" if q == -1 else f"-{abs(q)}"
    return label


def _path_string(graph: MolecularGraph, path: list[int], orders: list[float]) -> str:
    """Serialize one direction of a path; canonical form is the lexicographic
    minimum of the forward and reversed serializations."""
    forward = _atom_label(graph, path[0])
    for atom, order in zip(path[1:], orders):
        forward += _BOND_SYMBOLS[order] + _atom_label(graph, atom)
    backward = _atom_label(graph, path[-1])
    for atom, order in zip(reversed(path[:-1]), reversed(orders)):
        backward += _BOND_SYMBOLS[order] + _atom_label(graph, atom)
    return min(forward, backward)


def path_classes(graph: MolecularGraph, max_len: int) -> set[str]:
    """All distinct canonical path strings with up to max_len bonds."""
    classes: set[str] = set()
    n = len(graph.atoms)

    def extend(path: list[int], orders: list[float], visited: set[int]) -> None:
        classes.add(_path_string(graph, path, orders))
        if len(orders) == max_len:
            return
        for neighbor, order in graph.neighbors(path[-1]):
            if neighbor in visited:
                continue
            path.append(neighbor)
            orders.append(order)
            visited.add(neighbor)
            extend(path, orders, visited)
            visited.remove(neighbor)
            orders.pop()
            path.pop()

    for start in range(n):
        extend([start], [], {start})
    return classes


def path_fingerprint(graph: MolecularGraph, config: PathConfig = PathConfig()) -> Fingerprint:
    """Hashed path fingerprint of one molecular graph.

    Bit positions are stable across platforms: FNV-1a 64 of the UTF-8
    canonical path string, masked modulo n_bits.
    """
    if not graph.atoms:
        raise ValueError("graph has no atoms")
    mask = config.n_bits - 1
    bits = frozenset(
        fnv1a64(cls.encode("utf-8")) & mask for cls in path_classes(graph, config.max_len)
    )
    return Fingerprint(
        bits=bits,
        n_bits=config.n_bits,
        method=f"hashed_path(max_len={config.max_len},n_bits={config.n_bits})",
    )


# -- substructure keys ---------------------------------------------------


def _fundamental_cycles(graph: MolecularGraph) -> list[list[tuple[int, int]]]:
    """Cycle basis as edge lists, from a DFS spanning tree."""
    n = len(graph.atoms)
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    cycles: list[list[tuple[int, int]]] = []
    tree_edges: set[frozenset[int]] = set()
    for root in range(n):
        if root in parent:
            continue
        parent[root] = None
        depth[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for v, _ in graph.neighbors(u):
                if v not in parent:
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    tree_edges.add(frozenset((u, v)))
                    stack.append(v)
    for bond in graph.bonds:
        if frozenset((bond.a, bond.b)) in tree_edges:
            continue
        # walk both endpoints up to their common ancestor
        a, b = bond.a, bond.b
        edges = [(a, b)]
        while depth[a] > depth[b]:
            edges.append((a, parent[a]))
            a = parent[a]
        while depth[b] > depth[a]:
            edges.append((b, parent[b]))
            b = parent[b]
        while a != b:
            edges.append((a, parent[a]))
            edges.append((b, parent[b]))
            a = parent[a]
            b = parent[b]
        cycles.append(edges)
    return cycles


def atmo_keys(graph: MolecularGraph) -> Fingerprint:
    """Fixed 24-key substructure panel (version ``atmokeys-v1``)."""
    if not graph.atoms:
        raise ValueError("graph has no atoms")
    elements = [a.element for a in graph.atoms]
    halogens = {"F", "Cl", "Br", "I"}
    n_carbon = elements.count("C")
    n_oxygen = elements.count("O")

    def h_count(i: int) -> int:
        return implicit_hydrogens(graph, i)

    order_of = {frozenset((b.a, b.b)): b.order for b in graph.bonds}
    flags = dict.fromkeys(ATMO_KEY_NAMES, False)
    flags["contains_carbon"] = n_carbon > 0
    flags["contains_nitrogen"] = "N" in elements
    flags["contains_oxygen"] = n_oxygen > 0
    flags["contains_sulfur"] = "S" in elements
    flags["contains_halogen"] = any(e in halogens for e in elements)
    flags["oxygen_count_ge_3"] = n_oxygen >= 3
    flags["oxygen_count_ge_6"] = n_oxygen >= 6
    flags["carbon_count_ge_5"] = n_carbon >= 5
    flags["carbon_count_ge_10"] = n_carbon >= 10
    flags["charged"] = any(a.formal_charge != 0 for a in graph.atoms)

    for i, atom in enumerate(graph.atoms):
        neighbors = graph.neighbors(i)
        if atom.element == "O":
            if h_count(i) >= 1:
                flags["hydroxyl"] = True
            carbons_single = sum(
                1
                for j, order in neighbors
                if graph.atoms[j].element == "C" and order == 1.0
            )
            if carbons_single >= 2:
                flags["ether"] = True
            for j, order in neighbors:
                if graph.atoms[j].element == "O" and order == 1.0:
                    flags["peroxide"] = True
                    if h_count(i) >= 1 or h_count(j) >= 1:
                        flags["hydroperoxide"] = True
        elif atom.element == "C":
            double_o = [j for j, order in neighbors if order == 2.0 and graph.atoms[j].element == "O"]
            if double_o:
                flags["carbonyl"] = True
                for j, order in neighbors:
                    if (
                        order == 1.0
                        and graph.atoms[j].element == "O"
                        and h_count(j) >= 1
                    ):
                        flags["carboxyl"] = True
        elif atom.element == "N":
            if h_count(i) >= 1:
                flags["amine"] = True
            o_neighbors = sum(1 for j, _ in neighbors if graph.atoms[j].element == "O")
            if o_neighbors >= 2:
                flags["nitro_or_nitrate"] = True
        elif atom.element == "S":
            o_neighbors = sum(1 for j, _ in neighbors if graph.atoms[j].element == "O")
            if o_neighbors >= 2:
                flags["sulfur_oxide"] = True

    for bond in graph.bonds:
        ea, eb = elements[bond.a], elements[bond.b]
        if bond.order == 2.0 and ea == "C" and eb == "C":
            flags["carbon_double_bond"] = True
        if bond.order == 3.0:
            flags["triple_bond"] = True
            if {ea, eb} == {"C", "N"}:
                flags["nitrile"] = True

    for cycle in _fundamental_cycles(graph):
        aromatic_cycle = all(order_of[frozenset(e)] == 1.5 for e in cycle)
        if aromatic_cycle:
            flags["aromatic_ring"] = True
        else:
            flags["nonaromatic_ring"] = True

    bits = frozenset(i for i, name in enumerate(ATMO_KEY_NAMES) if flags[name])
    return Fingerprint(bits=bits, n_bits=len(ATMO_KEY_NAMES), method=ATMO_KEYS_VERSION)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Tanimoto similarity |a & b| / |a | b|; 1.0 when both are empty."""
    if a.n_bits != b.n_bits:
        raise LengthMismatch(
            f"fingerprint widths differ: {a.n_bits} != {b.n_bits}"
        )
    union = len(a.bits | b.bits)
    if union == 0:
        return 1.0
    return len(a.bits & b.bits) / union


def fingerprint_smiles(
    smiles: str,
    method: str = "hashed_path",
    config: PathConfig = PathConfig(),
) -> Fingerprint:
    """Fingerprint a SMILES record; multi-component records take the union
    of their components' bits."""
    graphs = parse_smiles(smiles)
    if method == "hashed_path":
        prints = [path_fingerprint(g, config) for g in graphs]
    elif method == "atmo_keys":
        prints = [atmo_keys(g) for g in graphs]
    else:
        raise ValueError(f"unknown fingerprint method {method!r}")
    bits: frozenset[int] = frozenset().union(*(fp.bits for fp in prints))
    return Fingerprint(bits=bits, n_bits=prints[0].n_bits, method=prints[0].method)
