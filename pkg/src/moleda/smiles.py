"""SMILES subset parser producing annotated molecular graphs.

Supported subset: organic-subset atoms written bare (B, C, N, O, F, P, S,
Cl, Br, I, plus aromatic b, c, n, o, p, s), bracket atoms for any supported
element (H and Si must be bracketed) with optional isotope (ignored),
stereo markers (ignored), explicit hydrogen count, and formal charge.
Bonds: - (single), = (double), # (triple), : (aromatic); / and \\ are
accepted as single bonds with the stereo annotation dropped. Branches use
parentheses, ring closures use digits or %nn, and dots split the input
into disconnected components (one graph per component).

Rejections never raise bare exceptions: every malformed input maps to a
:class:`SmilesParseError` subclass carrying the character offset of the
offending token.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

__all__ = [
    "Atom",
    "Bond",
    "MolecularGraph",
    "SmilesParseError",
    "EmptyInput",
    "UnknownElement",
    "UnclosedRing",
    "UnbalancedParen",
    "parse_smiles",
    "implicit_hydrogens",
    "DEFAULT_VALENCES",
]

# Default valences used for implicit hydrogen counting. Nitrogen and
# sulfur deliberately get their lowest common valence; hypervalent atoms
# clamp to zero hydrogens and set the graph warning flag instead.
DEFAULT_VALENCES: dict[str, int] = {
    "H": 1,
    "B": 3,
    "C": 4,
    "N": 3,
    "O": 2,
    "F": 1,
    "Si": 4,
    "P": 3,
    "S": 2,
    "Cl": 1,
    "Br": 1,
    "I": 1,
}

# Elements that may appear bare (no brackets). Two-letter symbols must be
# matched before their one-letter prefixes.
_ORGANIC_TWO = ("Cl", "Br")
_ORGANIC_ONE = frozenset("BCNOFPSI")
_AROMATIC_ORGANIC = frozenset("bcnops")

_BOND_ORDERS: dict[str, float] = {"-": 1.0, "=": 2.0, "#": 3.0, ":": 1.5, "/": 1.0, "\\": 1.0}

_BRACKET_RE = re.compile(
    r"""^(?P<isotope>[0-9]+)?
         (?P<element>[A-Z][a-z]?|[a-z])
         (?P<stereo>@@?)?
         (?P<hcount>H[0-9]*)?
         (?P<charge>\+[0-9]+|-[0-9]+|\++|-+)?$""",
    re.VERBOSE,
)


class SmilesParseError(ValueError):
    """Base class for all SMILES rejections.

    Attributes:
        offset: character position of the offending token in the input
            (after surrounding whitespace is stripped).
        code: short machine-readable reason.
    """

    code = "smiles_parse_error"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EmptyInput(SmilesParseError):
    code = "empty_input"

    def __init__(self) -> None:
        super().__init__("empty SMILES input", 0)


class UnknownElement(SmilesParseError):
    code = "unknown_element"


class UnclosedRing(SmilesParseError):
    code = "unclosed_ring"


class UnbalancedParen(SmilesParseError):
    code = "unbalanced_paren"


@dataclass
class Atom:
    """One heavy atom (or bracketed hydrogen) in a molecular graph.

    Attributes:
        element: element symbol in canonical case (e.g. "C", "Cl").
        aromatic: True when written lowercase in the source.
        formal_charge: signed integer charge, 0 by default.
        explicit_h: hydrogen count written in a bracket atom; None for
            bare atoms, whose hydrogens are implied by valence.
    """

    element: str
    aromatic: bool = False
    formal_charge: int = 0
    explicit_h: int | None = None


@dataclass
class Bond:
    """Undirected bond between atom indices ``a < b``.

    order is 1.0, 2.0, 3.0 or 1.5 (aromatic).
    """

    a: int
    b: int
    order: float


@dataclass
class MolecularGraph:
    """Connected molecular graph for one SMILES component.

    Attributes:
        atoms: atoms in source order, indexed from 0.
        bonds: undirected bonds; at most one per atom pair.
        source: the component's SMILES text.
        valence_warning: True when any atom exceeded its default valence
            and had its implicit hydrogen count clamped to zero.
    """

    atoms: list[Atom]
    bonds: list[Bond]
    source: str
    valence_warning: bool = False
    _adjacency: dict[int, list[tuple[int, float]]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def neighbors(self, index: int) -> list[tuple[int, float]]:
        """Return [(neighbor index, bond order)] for one atom."""
        if not self._adjacency:
            adj: dict[int, list[tuple[int, float]]] = {i: [] for i in range(len(self.atoms))}
            for bond in self.bonds:
                adj[bond.a].append((bond.b, bond.order))
                adj[bond.b].append((bond.a, bond.order))
            self._adjacency.update(adj)
        return self._adjacency[index]

    def bond_order_sum(self, index: int) -> float:
        return sum(order for _, order in self.neighbors(index))


def implicit_hydrogens(graph: MolecularGraph, index: int) -> int:
    """Implicit hydrogen count for one atom.

    Bracket atoms return their written hydrogen count verbatim. Bare
    atoms get max(0, floor(default_valence - sum of bond orders)), with
    aromatic bonds counting 1.5. A negative difference clamps to zero;
    the parser records that condition on the graph's warning flag.
    """
    atom = graph.atoms[index]
    if atom.explicit_h is not None:
        return atom.explicit_h
    valence = DEFAULT_VALENCES[atom.element]
    return max(0, math.floor(valence - graph.bond_order_sum(index)))


def parse_smiles(text: str) -> list[MolecularGraph]:
    """Parse a SMILES string into one graph per dot-separated component.

    Raises a :class:`SmilesParseError` subclass with a character offset
    for every malformed input; never any other exception type.
    """
    s = text.strip()
    if not s:
        raise EmptyInput()
    return _Parser(s).run()


class _Parser:
    """Single-pass cursor parser over a stripped SMILES string."""

    def __init__(self, s: str):
        self.s = s
        self.pos = 0
        self.graphs: list[MolecularGraph] = []
        self._reset_component(0)

    def _reset_component(self, start: int) -> None:
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self.bond_pairs: set[frozenset[int]] = set()
        self.prev: int | None = None
        self.pending_bond: float | None = None
        self.pending_bond_offset = 0
        # branch stack entries: (anchor atom, '(' offset, atom count at open)
        self.stack: list[tuple[int, int, int]] = []
        # open ring closures: digit -> (atom, explicit order or None, offset)
        self.rings: dict[int, tuple[int, float | None, int]] = {}
        self.component_start = start

    def run(self) -> list[MolecularGraph]:
        s = self.s
        while self.pos < len(s):
            ch = s[self.pos]
            if ch == "[":
                self._bracket_atom()
            elif s.startswith(_ORGANIC_TWO, self.pos):
                self._add_atom(Atom(s[self.pos : self.pos + 2]), self.pos)
                self.pos += 2
            elif ch in _ORGANIC_ONE:
                self._add_atom(Atom(ch), self.pos)
                self.pos += 1
            elif ch in _AROMATIC_ORGANIC:
                self._add_atom(Atom(ch.upper(), aromatic=True), self.pos)
                self.pos += 1
            elif ch in _BOND_ORDERS:
                if self.pending_bond is not None:
                    raise SmilesParseError("consecutive bond symbols", self.pos)
                if self.prev is None:
                    raise SmilesParseError("bond symbol before any atom", self.pos)
                self.pending_bond = _BOND_ORDERS[ch]
                self.pending_bond_offset = self.pos
                self.pos += 1
            elif ch in "0123456789":
                self._ring_closure(int(ch), self.pos)
                self.pos += 1
            elif ch == "%":
                digits = s[self.pos + 1 : self.pos + 3]
                if len(digits) < 2 or not all(c in "0123456789" for c in digits):
                    raise SmilesParseError("% must be followed by two digits", self.pos)
                self._ring_closure(int(digits), self.pos)
                self.pos += 3
            elif ch == "(":
                if self.prev is None:
                    raise SmilesParseError("branch before any atom", self.pos)
                if self.pending_bond is not None:
                    raise SmilesParseError("bond symbol before branch", self.pending_bond_offset)
                self.stack.append((self.prev, self.pos, len(self.atoms)))
                self.pos += 1
            elif ch == ")":
                if not self.stack:
                    raise UnbalancedParen("unmatched closing parenthesis", self.pos)
                if self.pending_bond is not None:
                    raise SmilesParseError("dangling bond in branch", self.pending_bond_offset)
                anchor, _, count_at_open = self.stack.pop()
                if len(self.atoms) == count_at_open:
                    raise SmilesParseError("empty branch", self.pos)
                self.prev = anchor
                self.pos += 1
            elif ch == ".":
                if self.stack:
                    raise SmilesParseError("dot inside branch", self.pos)
                self._finish_component(self.pos)
                self.pos += 1
                self._reset_component(self.pos)
            elif ch == "]":
                raise SmilesParseError("unmatched closing bracket", self.pos)
            else:
                if ch.isalpha():
                    raise UnknownElement(f"unknown element {ch!r}", self.pos)
                raise SmilesParseError(f"unexpected character {ch!r}", self.pos)
        self._finish_component(self.pos)
        return self.graphs

    # -- atoms ---------------------------------------------------------

    def _add_atom(self, atom: Atom, offset: int) -> None:
        if atom.element not in DEFAULT_VALENCES:
            raise UnknownElement(f"unknown element {atom.element!r}", offset)
        index = len(self.atoms)
        self.atoms.append(atom)
        if self.prev is not None:
            order = self.pending_bond
            if order is None:
                order = 1.5 if (self.atoms[self.prev].aromatic and atom.aromatic) else 1.0
            self._add_bond(self.prev, index, order, offset)
        self.pending_bond = None
        self.prev = index

    def _bracket_atom(self) -> None:
        start = self.pos
        end = self.s.find("]", start)
        if end < 0:
            raise SmilesParseError("unclosed bracket atom", start)
        body = self.s[start + 1 : end]
        match = _BRACKET_RE.match(body)
        if not match or not body:
            raise SmilesParseError("malformed bracket atom", start)
        symbol = match.group("element")
        elem_offset = start + 1 + len(match.group("isotope") or "")
        aromatic = symbol.islower()
        canonical = symbol.capitalize() if aromatic else symbol
        if canonical not in DEFAULT_VALENCES or (
            aromatic and symbol not in _AROMATIC_ORGANIC
        ):
            raise UnknownElement(f"unknown element {symbol!r}", elem_offset)
        hcount = match.group("hcount")
        explicit_h = 0
        if hcount is not None:
            explicit_h = int(hcount[1:]) if len(hcount) > 1 else 1
        charge = _parse_charge(match.group("charge"))
        atom = Atom(canonical, aromatic=aromatic, formal_charge=charge, explicit_h=explicit_h)
        self._add_atom(atom, start)
        self.pos = end + 1

    # -- bonds and rings -----------------------------------------------

    def _add_bond(self, a: int, b: int, order: float, offset: int) -> None:
        if a == b:
            raise SmilesParseError("ring closure bonds an atom to itself", offset)
        pair = frozenset((a, b))
        if pair in self.bond_pairs:
            raise SmilesParseError("duplicate bond between one atom pair", offset)
        self.bond_pairs.add(pair)
        self.bonds.append(Bond(min(a, b), max(a, b), order))

    def _ring_closure(self, digit: int, offset: int) -> None:
        if self.prev is None:
            raise SmilesParseError("ring closure before any atom", offset)
        if digit in self.rings:
            other, open_order, _ = self.rings.pop(digit)
            order = self._resolve_ring_order(other, open_order, offset)
            self._add_bond(other, self.prev, order, offset)
        else:
            self.rings[digit] = (self.prev, self.pending_bond, offset)
        self.pending_bond = None

    def _resolve_ring_order(self, other: int, open_order: float | None, offset: int) -> float:
        close_order = self.pending_bond
        if open_order is not None and close_order is not None and open_order != close_order:
            raise SmilesParseError("conflicting ring closure bond orders", offset)
        order = open_order if open_order is not None else close_order
        if order is None:
            both_aromatic = self.atoms[other].aromatic and self.atoms[self.prev].aromatic
            order = 1.5 if both_aromatic else 1.0
        return order

    # -- component assembly ---------------------------------------------

    def _finish_component(self, end: int) -> None:
        if self.stack:
            raise UnbalancedParen("unclosed parenthesis", self.stack[0][1])
        if self.rings:
            first = min(off for _, _, off in self.rings.values())
            raise UnclosedRing("unclosed ring closure", first)
        if self.pending_bond is not None:
            raise SmilesParseError("dangling bond symbol", self.pending_bond_offset)
        if not self.atoms:
            raise SmilesParseError("empty component", max(self.component_start, end - 1))
        graph = MolecularGraph(
            atoms=self.atoms,
            bonds=self.bonds,
            source=self.s[self.component_start : end],
        )
        graph.valence_warning = _check_valences(graph)
        self.graphs.append(graph)

    # pos advancing guaranteed by every branch above; the loop terminates.


def _parse_charge(token: str | None) -> int:
    if not token:
        return 0
    if token.lstrip("+-"):
        return int(token)  # "+2" / "-3"
    # run form: "+", "++", "--", ...
    return len(token) if token[0] == "+" else -len(token)


def _check_valences(graph: MolecularGraph) -> bool:
    """True when any bare atom's bond orders exceed its default valence."""
    for i, atom in enumerate(graph.atoms):
        if atom.explicit_h is not None:
            continue
        if graph.bond_order_sum(i) > DEFAULT_VALENCES[atom.element]:
            return True
    return False
