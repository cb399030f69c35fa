"""Training-objective formulas as pure numeric functions.

Nothing here touches a network: embeddings and predictions come in as
plain vectors so every formula can be checked against scalar arithmetic.
"""

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_LAMBDA = 0.80
DEFAULT_EPSILON = 1e-12


@dataclass(frozen=True)
class LossParams:
    """Bundle of objective knobs: temperature, mixing weight, negative count."""

    tau: float = 1.0
    lam: float = DEFAULT_LAMBDA
    k: int = 1
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"temperature must be positive, got {self.tau}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")


def _as_embedding(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValueError(f"embedding must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("embedding contains non-finite values")
    return arr


def cosine_sim(a, b) -> float:
    """Cosine similarity dot(a, b) / (|a| * |b|), clipped into [-1, 1]."""
    a = _as_embedding(a)
    b = _as_embedding(b)
    if a.shape != b.shape:
        raise ValueError(f"embedding dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for zero-norm embeddings")
    return min(1.0, max(-1.0, float(a @ b) / (na * nb)))


def contrastive_loss(z_query, z_pos, z_negs, tau: float) -> float:
    """Softmax-style contrastive loss of a query against one positive and k negatives.

    -log of the positive pair's share of pooled exp(sim/tau) terms. The
    positive term is included in the pool, so the result is a proper
    -log-probability and never negative; it equals log(1 + k) when every
    similarity is the same.
    """
    if tau <= 0:
        raise ValueError(f"temperature must be positive, got {tau}")
    if len(z_negs) == 0:
        raise ValueError("at least one negative sample is required")
    s_pos = cosine_sim(z_query, z_pos) / tau
    scores = [s_pos] + [cosine_sim(z_query, z) / tau for z in z_negs]
    peak = max(scores)
    log_denom = peak + math.log(math.fsum(math.exp(s - peak) for s in scores))
    return log_denom - s_pos


def bce_loss(y, y_hat, epsilon: float = DEFAULT_EPSILON) -> float:
    """Summed binary cross-entropy over classes.

    Predictions are clamped into [epsilon, 1 - epsilon] before the logs so
    saturated values cannot produce -log 0.
    """
    y = np.asarray(y, dtype=np.float64)
    yh = np.asarray(y_hat, dtype=np.float64)
    if y.ndim != 1 or yh.ndim != 1:
        raise ValueError("labels and predictions must be 1-D vectors")
    if y.shape != yh.shape:
        raise ValueError(f"label/prediction lengths differ: {y.shape[0]} vs {yh.shape[0]}")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("ground-truth labels must be 0 or 1")
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    yh = np.clip(yh, epsilon, 1.0 - epsilon)
    terms = -y * np.log(yh) - (1.0 - y) * np.log(1.0 - yh)
    return float(terms.sum())


def total_loss(ce: float, con: float, lam: float = DEFAULT_LAMBDA) -> float:
    """Mix of classification and contrastive losses: lam*ce + (1-lam)*con."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return lam * ce + (1.0 - lam) * con
