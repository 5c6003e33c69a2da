"""Randomized measurement masking with unbiased rescaling.

At every step each state coordinate is observed independently with its
probability p_i; observed coordinates are scaled by 1/p_i so the masked
state is an unbiased estimate of the true state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import streams
from .errors import DimensionError, InvalidInputError


@dataclass(frozen=True)
class Mask:
    """One realization of the measurement mask.

    scale[i] is 1/p_i where active, else 0, so E[scale[i]] = 1.
    """

    active: np.ndarray
    scale: np.ndarray


@dataclass(frozen=True)
class MaskSampler:
    """Deterministic Bernoulli mask source.

    Masks are a pure function of (seed, stream_id, step, coordinate), so
    identical keys reproduce identical sequences under any execution
    order.  Probabilities of exactly 1 bypass the random draw.
    """

    probs: np.ndarray
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidInputError("probs must be a nonempty vector")
        if np.any(probs <= 0.0) or np.any(probs > 1.0):
            raise InvalidInputError("every probability must lie in (0, 1]")
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return self.probs.size

    def sample(self, k: int) -> Mask:
        """Mask for time step k."""
        if k < 0:
            raise InvalidInputError("step index must be nonnegative")
        u = streams.uniforms(self.seed, (streams.LABEL_MASK, self.stream_id, k),
                             self.n)
        active = (u < self.probs) | (self.probs >= 1.0)
        scale = np.where(active, 1.0 / self.probs, 0.0)
        return Mask(active=active, scale=scale)

    def sample_block(self, k0: int, count: int) -> np.ndarray:
        """Scale vectors for steps k0 .. k0+count-1, shape (count, n).

        Row j is identical to ``sample(k0 + j).scale``.
        """
        if k0 < 0 or count < 0:
            raise InvalidInputError("step range must be nonnegative")
        rows = np.arange(k0, k0 + count, dtype=np.uint64)
        u = streams.uniform_block(self.seed, (streams.LABEL_MASK, self.stream_id),
                                  rows, self.n)
        active = (u < self.probs[None, :]) | (self.probs[None, :] >= 1.0)
        return np.where(active, 1.0 / self.probs[None, :], 0.0)


def sample_mask(sampler: MaskSampler, k: int) -> Mask:
    """Functional alias for ``sampler.sample(k)``."""
    return sampler.sample(k)


def second_moment_matrix(L, probs) -> np.ndarray:
    """Closed form of E[C' L'L C] over the random mask C.

    Equals L'L + Diag(s_i (1/p_i - 1)) with s_i the i-th diagonal entry
    of L'L; off-diagonal terms are unchanged because distinct
    coordinates are masked independently and the rescaling is unbiased.
    """
    L = np.asarray(L, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise DimensionError(f"L must be square, got {L.shape}")
    if probs.shape != (L.shape[1],):
        raise DimensionError("probs length must match L")
    if np.any(probs <= 0.0) or np.any(probs > 1.0):
        raise InvalidInputError("every probability must lie in (0, 1]")
    G = L.T @ L
    return G + np.diag(np.diag(G) * (1.0 / probs - 1.0))


def expected_sparsity(probs, weights=None) -> float:
    """Expected (weighted) number of active sensors per step: sum w_i p_i."""
    probs = np.asarray(probs, dtype=float)
    if weights is None:
        weights = np.ones_like(probs)
    weights = np.asarray(weights, dtype=float)
    if probs.shape != weights.shape:
        raise DimensionError(
            f"probs {probs.shape} and weights {weights.shape} differ")
    return float(weights @ probs)
