"""Per-neuron kernel logistic regression in the dual.

Each neuron ``i`` owns a dual vector ``alpha[:, i]`` over the stored patterns,
fit by full-batch gradient descent on the L2-regularised negative
log-likelihood of its target bits. All neurons share one Gram matrix, so the
trainer runs them as columns of a single matrix iteration.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import expit

from .kernel import KernelParams, PatternSet, gram_matrix

LOG_CLAMP = 1e-12


class TrainingDiverged(FloatingPointError):
    def __init__(self, neuron: int):
        super().__init__(f"training diverged (non-finite dual variables) for neuron {neuron}")
        self.neuron = neuron


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    weight_decay: float = 0.01
    iterations: int = 500

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not self.weight_decay >= 0:
            raise ValueError("weight_decay must be non-negative")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError("iterations must be a positive integer")


@dataclass(frozen=True)
class DualWeights:
    """A trained memory: stored patterns plus their P x N dual variables."""

    alpha: np.ndarray
    patterns: PatternSet
    params: KernelParams
    config: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=np.float64)
        if alpha.shape != self.patterns.patterns.shape:
            raise ValueError(
                f"alpha shape {alpha.shape} does not match patterns {self.patterns.patterns.shape}"
            )
        if not np.all(np.isfinite(alpha)):
            raise ValueError("alpha contains non-finite entries")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def n(self) -> int:
        return self.patterns.n

    @property
    def p(self) -> int:
        return self.patterns.p

    @cached_property
    def neuron_weights(self) -> np.ndarray:
        """``alpha.T`` as a contiguous N x P array (row ``i`` feeds neuron ``i``)."""
        return np.ascontiguousarray(self.alpha.T)

    @cached_property
    def pattern_columns(self) -> np.ndarray:
        """Stored patterns transposed to N x P int64, for per-neuron access."""
        return np.ascontiguousarray(self.patterns.patterns.T, dtype=np.int64)

    @cached_property
    def kernel_table(self) -> np.ndarray:
        return self.params.table(self.n)


def sigmoid(z):
    return expit(z)


def target_bits(ps: PatternSet) -> np.ndarray:
    """Map ±1 patterns to {0, 1} targets, shape P x N."""
    return (ps.patterns.astype(np.float64) + 1.0) / 2.0


def klr_loss(alpha_i, gram, y_i, lam: float) -> float:
    alpha_i = np.asarray(alpha_i, dtype=np.float64)
    y_i = np.asarray(y_i, dtype=np.float64)
    h = gram @ alpha_i
    prob = sigmoid(h)
    nll = -np.sum(
        y_i * np.log(np.maximum(prob, LOG_CLAMP))
        + (1.0 - y_i) * np.log(np.maximum(1.0 - prob, LOG_CLAMP))
    )
    loss = float(nll + 0.5 * lam * alpha_i @ h)
    if not np.isfinite(loss):
        raise FloatingPointError("KLR loss is not finite")
    return loss


def klr_gradient(alpha_i, gram, y_i, lam: float) -> np.ndarray:
    """Gradient ``K (sigmoid(K a) - y) + lam K a`` of :func:`klr_loss`.

    Accepts a single dual vector or a P x k matrix of them (one per column).
    """
    alpha_i = np.asarray(alpha_i, dtype=np.float64)
    residual = sigmoid(gram @ alpha_i) - y_i + lam * alpha_i
    grad = gram @ residual
    if not np.all(np.isfinite(grad)):
        raise FloatingPointError("KLR gradient is not finite")
    return grad


def _descend(gram: np.ndarray, targets: np.ndarray, cfg: TrainConfig) -> np.ndarray:
    # targets: P x k; columns are independent problems sharing the Gram matrix
    alpha = np.zeros_like(targets, dtype=np.float64)
    step, lam = cfg.learning_rate, cfg.weight_decay
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(cfg.iterations):
            residual = sigmoid(gram @ alpha) - targets + lam * alpha
            alpha -= step * (gram @ residual)
    return alpha


def train_neuron(gram, y_i, cfg: TrainConfig = TrainConfig(), neuron: int = 0) -> np.ndarray:
    """Dual vector of one neuron after ``cfg.iterations`` gradient steps from zero."""
    gram = np.asarray(gram, dtype=np.float64)
    y_i = np.asarray(y_i, dtype=np.float64)
    alpha = _descend(gram, y_i[:, None], cfg)[:, 0]
    if not np.all(np.isfinite(alpha)):
        raise TrainingDiverged(neuron)
    return alpha


def train_network(
    ps: PatternSet, params: KernelParams = KernelParams(), cfg: TrainConfig = TrainConfig()
) -> DualWeights:
    """Fit every neuron's dual vector on a shared Gram matrix."""
    gram = gram_matrix(ps, params)
    alpha = _descend(gram, target_bits(ps), cfg)
    bad = np.flatnonzero(~np.all(np.isfinite(alpha), axis=0))
    if bad.size:
        raise TrainingDiverged(int(bad[0]))
    return DualWeights(alpha=alpha, patterns=ps, params=params, config=cfg)
