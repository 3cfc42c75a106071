"""Shared embedding types: constraint sets, coordinate frames, sign rules.

Every solver emits an Embedding whose coordinates live in a unit frame
(bounding box max side 2, centered at the origin) unless the method's own
semantics pin the scale, as LSP's anchors do. Spectral methods share one
sign convention so independent solvers agree on output orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DegenerateData(ValueError):
    """All input points identical; no principal directions exist."""


class RankDeficient(ValueError):
    """Fewer positive kernel eigenvalues than requested dimensions."""


class InvalidConstraint(ValueError):
    """A ConstraintSet violates an index or pairing invariant."""


@dataclass(frozen=True)
class ConstraintSet:
    """Interactive constraints: pinned control points plus pairwise links.

    Control targets are expressed in embedding units of the state the set
    is applied to. The same unordered pair may not appear as both a
    must-link and a cannot-link; ridge must stay positive to keep the
    solve well-posed.
    """

    control_points: tuple[tuple[int, float, float], ...] = ()
    must_links: tuple[tuple[int, int], ...] = ()
    cannot_links: tuple[tuple[int, int], ...] = ()
    mu_cp: float = 100.0
    mu_ml: float = 1.0
    mu_cl: float = 1.0
    ridge: float = 1e-3

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "control_points",
            tuple((int(i), float(x), float(y)) for i, x, y in self.control_points))
        object.__setattr__(
            self, "must_links", tuple((int(i), int(j)) for i, j in self.must_links))
        object.__setattr__(
            self, "cannot_links", tuple((int(i), int(j)) for i, j in self.cannot_links))
        if min(self.mu_cp, self.mu_ml, self.mu_cl) < 0:
            raise InvalidConstraint("strengths must be non-negative")
        if not self.ridge > 0:
            raise InvalidConstraint("ridge must be positive")
        indices = [i for i, _, _ in self.control_points]
        if len(indices) != len(set(indices)):
            raise InvalidConstraint("at most one control entry per index")
        for i, j in self.must_links + self.cannot_links:
            if i == j:
                raise InvalidConstraint(f"degenerate link ({i}, {i})")
        overlap = {frozenset(p) for p in self.must_links} & {
            frozenset(p) for p in self.cannot_links}
        if overlap:
            pairs = sorted(tuple(sorted(p)) for p in overlap)
            raise InvalidConstraint(f"pairs marked both must and cannot: {pairs}")

    def validate_indices(self, n: int) -> None:
        for i, _, _ in self.control_points:
            if not 0 <= i < n:
                raise InvalidConstraint(f"control index {i} out of range for n={n}")
        for i, j in self.must_links + self.cannot_links:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidConstraint(f"link ({i}, {j}) out of range for n={n}")

    @property
    def is_empty(self) -> bool:
        return not (self.control_points or self.must_links or self.cannot_links)


@dataclass(frozen=True)
class Embedding:
    """Immutable 2-D embedding with an update counter and provenance."""

    coords: np.ndarray
    method: str
    version: int = 1
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 2:
            raise ValueError("coords must be a 2-D array")
        if not np.isfinite(coords).all():
            raise ValueError("embedding coordinates must be finite")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class Frame:
    """Affine map raw -> unit coords: box max side 2, centered at origin."""

    scale: float
    offset: np.ndarray

    def apply(self, coords: np.ndarray) -> np.ndarray:
        return self.scale * coords + self.offset


def fit_frame(coords: np.ndarray) -> Frame:
    """Fit the unit frame of a raw coordinate cloud.

    A degenerate cloud (single point) keeps scale 1 and is translated to
    the origin.
    """
    lows = coords.min(axis=0)
    highs = coords.max(axis=0)
    side = float((highs - lows).max())
    scale = 2.0 / side if side > 0 else 1.0
    offset = -scale * (highs + lows) / 2.0
    return Frame(scale=scale, offset=offset)


def column_signs(columns: np.ndarray) -> np.ndarray:
    """Per-column factor of +-1 making the largest-magnitude entry positive.

    Ties resolve to the lowest row index (argmax picks the first maximum).
    """
    signs = np.ones(columns.shape[1])
    for d in range(columns.shape[1]):
        pivot = int(np.argmax(np.abs(columns[:, d])))
        if columns[pivot, d] < 0:
            signs[d] = -1.0
    return signs


def fix_signs(columns: np.ndarray) -> np.ndarray:
    """Apply the column sign convention and return a new array."""
    return np.array(columns, dtype=float) * column_signs(columns)
