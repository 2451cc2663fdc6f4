"""Bipolar patterns and the RBF kernel over them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_bipolar(x, n: int | None = None) -> np.ndarray:
    """Validate ``x`` as a {-1, +1} vector (or matrix of row vectors).

    Returns an int8 copy. Raises ``ValueError`` on any other entry or when the
    trailing dimension differs from ``n``.
    """
    arr = np.asarray(x)
    if arr.ndim not in (1, 2):
        raise ValueError(f"expected a vector or a matrix of row vectors, got shape {arr.shape}")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError("bipolar entries must be exactly -1 or +1")
    if n is not None and arr.shape[-1] != n:
        raise ValueError(f"expected length {n}, got {arr.shape[-1]}")
    return arr.astype(np.int8)


def hamming(x, y) -> int:
    x, y = np.asarray(x), np.asarray(y)
    _check_same_length(x, y)
    return int(np.count_nonzero(x != y))


def squared_distance(x, y) -> float:
    """Squared Euclidean distance between two bipolar vectors.

    Uses ``4 * hamming(x, y)``, which is exact for ±1 entries.
    """
    return 4.0 * hamming(x, y)


@dataclass(frozen=True)
class KernelParams:
    gamma: float = 0.1

    def __post_init__(self):
        if not (self.gamma > 0 and np.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma}")

    def table(self, n: int) -> np.ndarray:
        """Kernel value for every Hamming distance 0..n."""
        return np.exp(-self.gamma * (4.0 * np.arange(n + 1, dtype=np.float64)))


def rbf_kernel(x, y, params: KernelParams) -> float:
    return float(np.exp(-params.gamma * squared_distance(x, y)))


@dataclass(frozen=True)
class PatternSet:
    """``P`` stored bipolar patterns of length ``n``, one per row."""

    patterns: np.ndarray

    def __post_init__(self):
        arr = as_bipolar(self.patterns)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"patterns must be a non-empty P x N matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "patterns", arr)

    @property
    def n(self) -> int:
        return self.patterns.shape[1]

    @property
    def p(self) -> int:
        return self.patterns.shape[0]

    @classmethod
    def random(cls, n: int, p: int, rng: np.random.Generator) -> "PatternSet":
        """i.i.d. uniform ±1 patterns."""
        bits = rng.integers(0, 2, size=(p, n), dtype=np.int8)
        return cls(2 * bits - 1)

    def hamming_to(self, s) -> np.ndarray:
        """Hamming distance from ``s`` to every stored pattern (int64, length P)."""
        s = np.asarray(s)
        _check_same_length(s, self.patterns[0])
        dots = self.patterns.astype(np.int64) @ s.astype(np.int64)
        return (self.n - dots) // 2


def gram_matrix(ps: PatternSet, params: KernelParams) -> np.ndarray:
    """P x P matrix of kernel values between stored patterns.

    Each entry is computed once from an integer distance and mirrored, so the
    result is exactly symmetric with a unit diagonal.
    """
    xi = ps.patterns.astype(np.int64)
    dist = (ps.n - xi @ xi.T) // 2
    iu = np.triu_indices(ps.p)
    gram = np.empty((ps.p, ps.p), dtype=np.float64)
    vals = params.table(ps.n)[dist[iu]]
    gram[iu] = vals
    gram[iu[1], iu[0]] = vals
    return gram


def _check_same_length(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} != {y.shape[-1]}")


def overlap(a, b) -> float:
    """Normalised dot product ``(1/N) sum_i a_i b_i`` of two bipolar vectors."""
    a, b = np.asarray(a), np.asarray(b)
    _check_same_length(a, b)
    return float(np.dot(a.astype(np.int64), b.astype(np.int64))) / a.shape[-1]
