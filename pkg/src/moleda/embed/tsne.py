"""Exact t-SNE with the standard O(n^2) gradient.

The optimizer is the canonical update rule: momentum 0.5 switching to
0.8 at iteration 250, early exaggeration 12 on the first 250 iterations,
learning rate 200, and per-parameter adaptive gains (up 0.2 on sign
disagreement, down x0.8 otherwise, floored at 0.01). The KL divergence
after the exaggeration phase is compared with the final value on every
run; a violation of the descent property is an error, not a silent
degradation.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .base import Embedding, fit_frame

EXAGGERATION_PHASE = 250
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
GAIN_UP = 0.2
GAIN_DOWN = 0.8
GAIN_MIN = 0.01
ENTROPY_TOL = 1e-5
PROB_FLOOR = 1e-12
MAX_POINTS = 5000


class PerplexityTooLarge(ValueError):
    """Perplexity must stay below n/3."""


@dataclass(frozen=True)
class TsneParams:
    perplexity: float = 30.0
    iters: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    seed: int = 0


def _squared_distances(points: np.ndarray) -> np.ndarray:
    norms = np.einsum("ij,ij->i", points, points)
    sq = norms[:, None] + norms[None, :] - 2.0 * (points @ points.T)
    np.maximum(sq, 0.0, out=sq)
    return sq


def conditional_probabilities(sq_dists: np.ndarray,
                              perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-row Gaussian affinities with entropy matched to log(perplexity).

    Binary search on beta_i = 1/(2 sigma_i^2) until the Shannon entropy of
    row i (nats) is within 1e-5 of log(perplexity). Returns (P_conditional
    with zero diagonal, betas).
    """
    n = sq_dists.shape[0]
    target = float(np.log(perplexity))
    conditional = np.zeros((n, n))
    betas = np.ones(n)
    for i in range(n):
        mask = np.arange(n) != i
        dists = sq_dists[i, mask]
        shifted = dists - dists.min()
        beta, low, high = 1.0, 0.0, np.inf
        row = np.full(dists.shape, 1.0 / dists.shape[0])
        for _ in range(100):
            weights = np.exp(-beta * shifted)
            total = weights.sum()
            row = weights / total
            positive = row > 0
            entropy = float(-np.sum(row[positive] * np.log(row[positive])))
            diff = entropy - target
            if abs(diff) < ENTROPY_TOL:
                break
            if diff > 0:
                low = beta
                beta = beta * 2.0 if high == np.inf else (beta + high) / 2.0
            else:
                high = beta
                beta = (low + beta) / 2.0
        betas[i] = beta
        conditional[i, mask] = row
    return conditional, betas


def joint_probabilities(points: np.ndarray,
                        perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized affinities P = (P_cond + P_cond^T) / 2n, floored at 1e-12."""
    conditional, betas = conditional_probabilities(
        _squared_distances(points), perplexity)
    joint = (conditional + conditional.T) / (2.0 * points.shape[0])
    return np.maximum(joint, PROB_FLOOR), betas


def _student_q(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num = 1.0 / (1.0 + _squared_distances(coords))
    np.fill_diagonal(num, 0.0)
    q = np.maximum(num / num.sum(), PROB_FLOOR)
    return q, num


def _kl_divergence(p: np.ndarray, coords: np.ndarray) -> float:
    q, _ = _student_q(coords)
    mask = ~np.eye(p.shape[0], dtype=bool)
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def tsne(vectors, params: TsneParams | None = None) -> Embedding:
    """Embed feature vectors with exact t-SNE; deterministic given the seed."""
    params = params if params is not None else TsneParams()
    data = np.asarray(vectors, dtype=float)
    if data.ndim != 2:
        raise ValueError("vectors must form a 2-D array")
    n = data.shape[0]
    if not 4 <= n <= MAX_POINTS:
        raise ValueError(f"tsne supports 4 <= n <= {MAX_POINTS}, got {n}")
    if not params.perplexity < n / 3:
        raise PerplexityTooLarge(
            f"perplexity {params.perplexity} must be below n/3 = {n / 3:.2f}")
    joint, _ = joint_probabilities(data, params.perplexity)
    rng = np.random.RandomState(params.seed)
    coords = rng.normal(0.0, 1e-4, size=(n, 2))
    velocity = np.zeros_like(coords)
    gains = np.ones_like(coords)
    running = joint * params.early_exaggeration
    kl_after_exaggeration = None
    for iteration in range(params.iters):
        if iteration == EXAGGERATION_PHASE:
            running = joint
            kl_after_exaggeration = _kl_divergence(joint, coords)
        q, num = _student_q(coords)
        weighted = (running - q) * num
        gradient = 4.0 * (np.diag(weighted.sum(axis=1)) - weighted) @ coords
        momentum = MOMENTUM_EARLY if iteration < EXAGGERATION_PHASE else MOMENTUM_LATE
        gains = np.where(np.sign(gradient) != np.sign(velocity),
                         gains + GAIN_UP, gains * GAIN_DOWN)
        np.maximum(gains, GAIN_MIN, out=gains)
        velocity = momentum * velocity - params.learning_rate * gains * gradient
        coords = coords + velocity
        coords = coords - coords.mean(axis=0)
    kl_final = _kl_divergence(joint, coords)
    if kl_after_exaggeration is not None and kl_final > kl_after_exaggeration:
        raise RuntimeError(
            f"descent violated: final KL {kl_final:.6f} exceeds "
            f"post-exaggeration KL {kl_after_exaggeration:.6f}")
    frame = fit_frame(coords)
    provenance = {
        "params": asdict(params),
        "kl_after_exaggeration": kl_after_exaggeration,
        "kl_final": kl_final,
        "frame_scale": frame.scale,
    }
    return Embedding(coords=frame.apply(coords), method="tsne", version=1,
                     provenance=provenance)
