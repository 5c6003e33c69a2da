"""Dense linear-algebra primitives used throughout the toolkit.

All operations are pure functions on ndarray inputs and are safe to call
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvalidInputError, RankDeficiencyError

# Dense SVD below this order, power iteration on M'M above it.
_SVD_MAX_ORDER = 256
_POWER_TOL = 1e-12
_POWER_MAX_ITER = 10_000


def _as_matrix(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got ndim={M.ndim}")
    if M.shape[0] == 0 or M.shape[1] == 0:
        raise InvalidInputError(f"{name} has a zero dimension: {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return M


def spectral_norm(M) -> float:
    """Largest singular value of M.

    Uses a dense SVD up to order 256 and power iteration on M'M beyond
    that (deterministic all-ones start, tolerance 1e-12).
    """
    M = _as_matrix(M, "M")
    if max(M.shape) <= _SVD_MAX_ORDER:
        return float(np.linalg.svd(M, compute_uv=False)[0])
    return float(np.sqrt(sym_top_eig(M.T @ M)))


def sym_top_eig(G: np.ndarray, v0: np.ndarray | None = None) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    `v0` optionally warm-starts the iteration; falls back to a dense
    solve if the iteration does not settle within the cap.
    """
    n = G.shape[0]
    if n <= _SVD_MAX_ORDER:
        return float(scipy.linalg.eigh(G, eigvals_only=True,
                                       subset_by_index=[n - 1, n - 1])[0])
    v = np.ones(n) / np.sqrt(n) if v0 is None else v0 / np.linalg.norm(v0)
    lam = 0.0
    for _ in range(_POWER_MAX_ITER):
        u = G @ v
        nl = float(np.linalg.norm(u))
        if nl == 0.0:
            return 0.0
        v = u / nl
        if abs(nl - lam) <= _POWER_TOL * max(nl, 1.0):
            return nl
        lam = nl
    return float(scipy.linalg.eigh(G, eigvals_only=True,
                                   subset_by_index=[n - 1, n - 1])[0])


@dataclass(frozen=True)
class ProjectedDynamics:
    """Open-loop dynamics projected onto the complement of range(B).

    projector : P = I - B (B'B)^(-1) B', symmetric idempotent
    projected : P A
    residual_norm : largest singular value of P A (the quantity that
        must be strictly below 1 for gain synthesis to succeed)
    """

    projector: np.ndarray
    projected: np.ndarray
    residual_norm: float


def projected_dynamics(A, B) -> ProjectedDynamics:
    """Compute P = I - B(B'B)^(-1)B', PA, and ||PA||.

    (B'B)^(-1) is applied through a Cholesky solve; a condition number
    above 1e12 raises RankDeficiencyError.
    """
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimensionError(f"A must be square, got {A.shape}")
    if B.shape[0] != n:
        raise DimensionError(f"B has {B.shape[0]} rows, expected {n}")
    BtB = B.T @ B
    sv = np.linalg.svd(BtB, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] == 0.0 or sv[0] / sv[-1] > 1e12:
        raise RankDeficiencyError(
            "B'B is numerically singular (condition number > 1e12); "
            "B must have full column rank")
    c, low = scipy.linalg.cho_factor(BtB)
    P = np.eye(n) - B @ scipy.linalg.cho_solve((c, low), B.T)
    P = 0.5 * (P + P.T)
    PA = P @ A
    return ProjectedDynamics(P, PA, spectral_norm(PA))


def rank_of(M, tol: float = 1e-10) -> int:
    """Number of singular values above tol times the largest one."""
    M = _as_matrix(M, "M")
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def is_positive_definite(M) -> bool:
    """True iff the symmetrized matrix admits a Cholesky factorization."""
    M = _as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"M must be square, got {M.shape}")
    S = 0.5 * (M + M.T)
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        return False
    return True
