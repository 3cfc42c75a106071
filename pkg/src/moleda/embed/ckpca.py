"""Constrained kernel PCA with cached factorizations for interactive use.

A CkpcaState owns the centered kernel, its square, the coordinate frame
established by the unconstrained base solve, and the Cholesky factor of
the penalized system for the current constraint topology. Dragging a
control point changes only the right-hand side, so an update costs one
back-substitution against the cached factor.

Two solve branches exist. Without control points the constrained
directions come from the generalized eigenproblem maximizing
alpha^T M alpha / alpha^T (K_bar + ridge I) alpha with
M = (1/n) K_bar^2 + mu_cl K_bar L_cl K_bar - mu_ml K_bar L_ml K_bar,
normalized to alpha^T K_bar alpha = 1 so an empty set reproduces kpca
exactly. With control points the coefficients minimize a quadratic
anchored at the unconstrained solution alpha0:

  (1/n) (a - a0)^T K^2 (a - a0) + ridge (a - a0)^T K (a - a0)
  + mu_cp sum_c (k_c^T a - t_c)^2 + mu_ml sum (k_i - k_j)^T a)^2
  - mu_cl sum ((k_i - k_j)^T a)^2

so a satisfied control leaves the embedding stationary and the system
matrix is shared by both output dimensions. Indefiniteness from the
cannot-link term is handled by ridge escalation, never by dropping
constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh

from .base import ConstraintSet, Embedding, RankDeficient
from .base import column_signs, fit_frame
from .kernels import KernelMatrix
from .static import kpca_raw

EPSILON_START = 1e-8
EPSILON_LIMIT = 1e2


class SingularSystem(ValueError):
    """Ridge escalation exhausted; the penalized system stayed indefinite."""


class UnknownControl(ValueError):
    """Move requested for an index that has no control entry."""


@dataclass
class CkpcaState:
    """Single-writer solver state; emit coordinates via solve/move calls."""

    kernel: KernelMatrix
    ksq: np.ndarray
    scale: float
    offset: np.ndarray
    alpha0: np.ndarray
    alpha: np.ndarray
    constraints: ConstraintSet = field(default_factory=ConstraintSet)
    version: int = 0
    factor: tuple | None = None
    factor_key: tuple | None = None
    epsilon: float = 0.0
    base_rhs: np.ndarray | None = None
    base_rhs_ridge: float | None = None

    @property
    def n(self) -> int:
        return self.kernel.n

    def coords(self) -> np.ndarray:
        """Coordinates behind the last emitted embedding."""
        return self.kernel.values @ self.alpha + self.offset


def ckpca_state(kernel: KernelMatrix) -> CkpcaState:
    """Build solver state from a centered kernel.

    The unconstrained base solve fixes the state's coordinate frame; all
    later solves emit in that frame so drag targets stay meaningful.
    """
    if not kernel.centered:
        raise ValueError("ckpca requires a centered kernel")
    if kernel.n < 3:
        raise ValueError("ckpca requires at least 3 points")
    raw, lams = kpca_raw(kernel.values, 2)
    frame = fit_frame(raw)
    # K alpha = raw holds for alpha = v_d / sqrt(lambda_d) = raw / lambda_d;
    # folding the frame scale in makes K alpha + offset the framed embedding.
    alpha0 = frame.scale * raw / lams
    return CkpcaState(
        kernel=kernel,
        ksq=kernel.values @ kernel.values,
        scale=frame.scale,
        offset=np.array(frame.offset, dtype=float),
        alpha0=alpha0,
        alpha=alpha0.copy(),
    )


def ckpca_solve(state: CkpcaState, constraints: ConstraintSet | None = None) -> Embedding:
    """Full solve for `constraints` (default: the state's current set).

    Commits the new coefficients, factorization, and constraint set to the
    state only on success; SingularSystem leaves the state untouched.
    """
    cset = state.constraints if constraints is None else constraints
    cset.validate_indices(state.n)
    if cset.control_points:
        alpha, factor, eps = _solve_anchored(state, cset)
        state.factor = factor
        state.factor_key = _topology_key(cset)
        state.epsilon = eps
    else:
        alpha = _solve_spectral(state, cset)
        state.factor = None
        state.factor_key = None
        state.epsilon = 0.0
    state.constraints = cset
    state.alpha = alpha
    state.version += 1
    return _emit(state)


def ckpca_move_control(state: CkpcaState, index: int, new_x: float,
                       new_y: float) -> Embedding:
    """Drag one control point: refresh the right-hand side only.

    Requires an existing control entry for `index`. Reuses the cached
    factorization; falls back to a full solve if topology or strengths
    changed since it was computed.
    """
    cset = state.constraints
    if index not in {c[0] for c in cset.control_points}:
        raise UnknownControl(f"index {index} has no control entry")
    moved = tuple(
        (i, float(new_x), float(new_y)) if i == index else (i, x, y)
        for i, x, y in cset.control_points)
    new_cset = replace(cset, control_points=moved)
    if state.factor is None or state.factor_key != _topology_key(new_cset):
        return ckpca_solve(state, new_cset)
    columns = [c[0] for c in new_cset.control_points]
    kc = state.kernel.values[:, columns]
    state.alpha = _back_substitute(state, new_cset, state.factor, kc)
    state.constraints = new_cset
    state.version += 1
    return _emit(state)


def _emit(state: CkpcaState) -> Embedding:
    cset = state.constraints
    spec = state.kernel.spec
    provenance = {
        "kernel": None if spec is None else {"kind": spec.kind, "gamma": spec.gamma},
        "branch": "anchored" if cset.control_points else "spectral",
        "epsilon": state.epsilon,
        "mu_cp": cset.mu_cp,
        "mu_ml": cset.mu_ml,
        "mu_cl": cset.mu_cl,
        "ridge": cset.ridge,
        "n_controls": len(cset.control_points),
        "n_must_links": len(cset.must_links),
        "n_cannot_links": len(cset.cannot_links),
    }
    return Embedding(coords=state.coords(), method="ckpca",
                     version=state.version, provenance=provenance)


def _link_diffs(kbar: np.ndarray, links) -> np.ndarray:
    """Columns k_i - k_j for every link; D D^T equals K_bar L K_bar."""
    left = [i for i, _ in links]
    right = [j for _, j in links]
    return kbar[:, left] - kbar[:, right]


def _topology_key(cset: ConstraintSet) -> tuple:
    return (
        tuple(sorted(c[0] for c in cset.control_points)),
        tuple(sorted(cset.must_links)),
        tuple(sorted(cset.cannot_links)),
        cset.mu_cp, cset.mu_ml, cset.mu_cl, cset.ridge,
    )


def _solve_spectral(state: CkpcaState, cset: ConstraintSet) -> np.ndarray:
    """Zero-control branch: link-tilted generalized eigenproblem."""
    if not cset.must_links and not cset.cannot_links:
        # Exact reduction to the unconstrained base.
        return state.alpha0.copy()
    kbar = state.kernel.values
    n = state.n
    m = state.ksq / n
    if cset.cannot_links:
        diffs = _link_diffs(kbar, cset.cannot_links)
        m = m + cset.mu_cl * (diffs @ diffs.T)
    if cset.must_links:
        diffs = _link_diffs(kbar, cset.must_links)
        m = m - cset.mu_ml * (diffs @ diffs.T)
    m = (m + m.T) / 2.0
    b = kbar + cset.ridge * np.eye(n)
    _, vecs = eigh(m, b)
    top = vecs[:, [-1, -2]]
    norms = np.einsum("id,id->d", top, kbar @ top)
    if not np.isfinite(norms).all() or (norms <= 0).any():
        raise RankDeficient("constrained directions carry no kernel variance")
    alpha = top / np.sqrt(norms)
    alpha = alpha * column_signs(kbar @ alpha)
    return state.scale * alpha


def _solve_anchored(state: CkpcaState, cset: ConstraintSet):
    """Control-point branch: factor the shared system matrix, then solve."""
    kbar = state.kernel.values
    columns = [c[0] for c in cset.control_points]
    kc = kbar[:, columns]
    system = state.ksq / state.n + cset.ridge * kbar + cset.mu_cp * (kc @ kc.T)
    if cset.must_links:
        diffs = _link_diffs(kbar, cset.must_links)
        system = system + cset.mu_ml * (diffs @ diffs.T)
    if cset.cannot_links:
        diffs = _link_diffs(kbar, cset.cannot_links)
        system = system - cset.mu_cl * (diffs @ diffs.T)
    system = (system + system.T) / 2.0
    # Every term contains the centered kernel, so the system annihilates the
    # constant vector exactly. Deflate that direction with a rank-one shift:
    # right-hand sides are orthogonal to it, so the solution is untouched,
    # and the factorization stops depending on rounding at a zero pivot.
    pivot_scale = max(float(np.abs(np.diag(system)).max()), 1e-6)
    system = system + (pivot_scale / state.n) * np.ones_like(system)
    factor, eps = _factorize(system)
    alpha = _back_substitute(state, cset, factor, kc)
    return alpha, factor, eps


def _factorize(system: np.ndarray):
    """Cholesky with ridge escalation: epsilon doubles from 1e-8 to 1e+2."""
    eye = np.eye(system.shape[0])
    eps = 0.0
    while True:
        try:
            shifted = system if eps == 0.0 else system + eps * eye
            return cho_factor(shifted, lower=True), eps
        except np.linalg.LinAlgError:
            eps = EPSILON_START if eps == 0.0 else eps * 2.0
            if eps > EPSILON_LIMIT:
                raise SingularSystem(
                    f"system stayed indefinite up to ridge {EPSILON_LIMIT:g}"
                ) from None


def _back_substitute(state: CkpcaState, cset: ConstraintSet, factor,
                     kc: np.ndarray) -> np.ndarray:
    """Solve both output dimensions against the cached factor."""
    base = _base_rhs(state, cset.ridge)
    targets = np.array([[x, y] for _, x, y in cset.control_points])
    # Targets live in the emitted frame; the linear system is offset-free.
    shifted = targets - state.offset
    rhs = base + cset.mu_cp * (kc @ shifted)
    return cho_solve(factor, rhs)


def _base_rhs(state: CkpcaState, ridge: float) -> np.ndarray:
    """((1/n) K^2 + ridge K) alpha0, cached per ridge value."""
    if state.base_rhs is None or state.base_rhs_ridge != ridge:
        kbar = state.kernel.values
        state.base_rhs = (state.ksq / state.n) @ state.alpha0 + ridge * (
            kbar @ state.alpha0)
        state.base_rhs_ridge = ridge
    return state.base_rhs
