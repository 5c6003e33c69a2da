"""Gain and sparsification-probability synthesis.

Given a plant x(k+1) = A x(k) + B u(k) whose input matrix has full column
rank and whose dynamics projected off range(B) are a strict contraction,
this module designs a feedback gain K together with Bernoulli measurement
probabilities (one shared value, or one per state coordinate) such that
the closed loop under randomized masked measurement is mean-square stable.

Feasible gains are drawn from the one-parameter family

    K(t) = -t (B'B)^(-1) B' A,        t in [0, 1],

for which ||A + B K(t)|| decreases monotonically from ||A|| to the
projected residual norm as t goes 0 -> 1.  Per spectral-norm-squared
target gamma, the smallest t meeting the target is found by bisection;
an LMI feasibility check (`lmi_feasible`) provides an independent
certificate of the same condition through a Schur-complement test.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import linops
from .errors import (
    AssumptionError,
    DimensionError,
    InfeasibilityError,
    InvalidInputError,
)

log = logging.getLogger(__name__)

DEFAULT_DELTA = 0.01
DEFAULT_P_FLOOR = 1e-4
DEFAULT_EPS_P = 1e-4
#: Default certified per-step contraction target for returned plans.  With
#: the default simulation horizon of 200 steps, a contraction of 0.96
#: guarantees the mean-square norm falls below 1e-3 of its initial value
#: within the horizon (0.96**200 < 1e-3).  Pass None to return the bare
#: stability threshold plus eps_p instead.
DEFAULT_DECAY_TARGET = 0.96

_NORM_MARGIN = 1e-9       # strict margin between ||A+BK||^2 and gamma
_DEGENERATE_TOL = 1e-14   # column energy below this counts as zero


@dataclass
class Plant:
    """A discrete-time linear plant with cached structural facts."""

    A: np.ndarray
    B: np.ndarray
    name: str | None = None
    weights: np.ndarray | None = None
    input_rank: int = 0
    residual_norm: float = 0.0
    meta: dict | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def assumptions_ok(self) -> bool:
        report = check_assumptions(self)
        return report.rank_ok and report.spectral_ok


def make_plant(A, B, name: str | None = None, weights=None) -> Plant:
    """Validate (A, B) and build a Plant with cached rank and residual norm."""
    A = linops._as_matrix(A, "A")
    B = linops._as_matrix(B, "B")
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimensionError(f"A must be square, got {A.shape}")
    if B.shape[0] != n:
        raise DimensionError(f"B must have {n} rows, got {B.shape[0]}")
    if not 1 <= B.shape[1] <= n:
        raise DimensionError(f"B must have between 1 and {n} columns, got {B.shape[1]}")
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (n,):
            raise DimensionError(f"weights must have length {n}")
    rank = linops.rank_of(B)
    if rank == B.shape[1]:
        residual = linops.projected_dynamics(A, B).residual_norm
    else:
        residual = float("inf")
    return Plant(A=A, B=B, name=name, weights=weights,
                 input_rank=rank, residual_norm=residual)


@dataclass(frozen=True)
class AssumptionReport:
    rank_ok: bool
    residual_norm: float
    spectral_ok: bool


def check_assumptions(plant: Plant) -> AssumptionReport:
    """Verdicts for the two structural requirements of gain synthesis:
    full column rank of B, and projected residual norm strictly below 1."""
    rank_ok = plant.input_rank == plant.m
    spectral_ok = bool(rank_ok and plant.residual_norm < 1.0 - 1e-9)
    return AssumptionReport(rank_ok, plant.residual_norm, spectral_ok)


def lmi_feasible(A, B, K, gamma: float) -> bool:
    """Schur-complement feasibility certificate.

    Tests positive definiteness of ``[[gamma*I, D'], [D, I]]`` with
    D = A + B K, which holds exactly when ||A + B K||^2 < gamma.
    """
    A = linops._as_matrix(A, "A")
    B = linops._as_matrix(B, "B")
    K = linops._as_matrix(K, "K")
    n = A.shape[0]
    if A.shape[1] != n or B.shape[0] != n or K.shape != (B.shape[1], n):
        raise DimensionError(
            f"inconsistent shapes A{A.shape} B{B.shape} K{K.shape}")
    if gamma <= 0:
        raise InvalidInputError("gamma must be positive")
    D = A + B @ K
    block = np.block([[gamma * np.eye(n), D.T], [D, np.eye(n)]])
    return linops.is_positive_definite(block)


@dataclass(frozen=True)
class GainCertificate:
    """A feedback gain plus the facts needed to price sparsification.

    closed_norm_sq is ||A + B K||^2 (strictly below `gamma`), and
    col_energy[i] is the squared two-norm of column i of B K, the
    coordinate's leverage on the loop.
    """

    K: np.ndarray
    gamma: float
    t: float
    closed_loop: np.ndarray
    closed_norm_sq: float
    col_energy: np.ndarray
    col_energy_max: float

    @property
    def n(self) -> int:
        return self.closed_loop.shape[0]


class _FamilyEvaluator:
    """Evaluates ||A + B K(t)||^2 cheaply across many t.

    Uses the orthogonal split A + B K(t) = PA + (1-t)(I-P)A, whose Gram
    matrix is G1 + (1-t)^2 G2 with both Grams precomputed; the top
    eigenvalue is found by warm-started power iteration for large plants.
    """

    def __init__(self, plant: Plant):
        A, B = plant.A, plant.B
        BtB = B.T @ B
        c, low = scipy.linalg.cho_factor(BtB)
        self.base_gain = scipy.linalg.cho_solve((c, low), B.T @ A)  # (B'B)^-1 B'A
        self.removable = B @ self.base_gain                         # (I-P)A
        residual = A - self.removable                               # PA
        self.G1 = residual.T @ residual
        self.G2 = self.removable.T @ self.removable
        self.col_energy_unit = np.sum(self.removable ** 2, axis=0)  # s at t=1
        self._warm = np.ones(plant.n) / np.sqrt(plant.n)
        self.A = A

    def norm_sq(self, t: float) -> float:
        G = self.G1 + (1.0 - t) ** 2 * self.G2
        n = G.shape[0]
        if n <= 256:
            return float(scipy.linalg.eigh(
                G, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0])
        lam = linops.sym_top_eig(G, v0=self._warm)
        # refresh the warm start for the next nearby t
        u = G @ self._warm
        nu = np.linalg.norm(u)
        if nu > 0:
            self._warm = u / nu
        return lam

    def certificate(self, plant: Plant, t: float, gamma: float) -> GainCertificate:
        K = -t * self.base_gain
        D = plant.A - t * self.removable
        s = t * t * self.col_energy_unit
        return GainCertificate(
            K=K, gamma=float(gamma), t=float(t), closed_loop=D,
            closed_norm_sq=self.norm_sq(t), col_energy=s,
            col_energy_max=float(s.max()))


def _evaluator(plant: Plant) -> _FamilyEvaluator:
    ev = plant._cache.get("family")
    if ev is None:
        ev = _FamilyEvaluator(plant)
        plant._cache["family"] = ev
    return ev


def family_certificate(plant: Plant, t: float,
                       gamma: float | None = None) -> GainCertificate:
    """Certificate for a chosen family parameter t (introspection helper).

    When `gamma` is omitted it is set just above the achieved norm, so
    the certificate is self-consistent but carries no slack.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError("t must lie in [0, 1]")
    ev = _evaluator(plant)
    if gamma is None:
        gamma = ev.norm_sq(t) + _NORM_MARGIN
    return ev.certificate(plant, t, gamma)


def family_norm(plant: Plant, t: float) -> float:
    """||A + B K(t)|| along the constructive gain family."""
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError("t must lie in [0, 1]")
    return float(np.sqrt(_evaluator(plant).norm_sq(t)))


def gain_for_gamma(plant: Plant, gamma: float, t_tol: float = 1e-9) -> GainCertificate:
    """Smallest-t gain in the constructive family meeting ||A+BK||^2 < gamma.

    Bisection exploits that t -> ||A + B K(t)|| is nonincreasing.  The
    returned certificate keeps a margin of at least 1e-9 between
    closed_norm_sq and gamma, and satisfies ``lmi_feasible``.
    """
    report = check_assumptions(plant)
    if not (report.rank_ok and report.spectral_ok):
        raise AssumptionError(
            f"plant fails assumptions: rank_ok={report.rank_ok}, "
            f"residual_norm={report.residual_norm:.6g}")
    a_sq = plant.residual_norm ** 2
    if not a_sq + 1e-12 < gamma <= 1.0 + 1e-12:
        raise InfeasibilityError(
            f"gamma={gamma:.6g} outside feasible range "
            f"({a_sq:.6g}, 1]; residual norm squared is {a_sq:.6g}")
    ev = _evaluator(plant)
    bound = gamma - _NORM_MARGIN

    if ev.norm_sq(0.0) <= bound:
        return ev.certificate(plant, 0.0, gamma)
    if ev.norm_sq(1.0) > bound:
        raise InfeasibilityError(
            f"gamma={gamma:.6g} too close to the family limit "
            f"{a_sq:.6g}: no t in [0,1] meets it with margin")
    lo, hi = 0.0, 1.0
    while hi - lo > t_tol:
        mid = 0.5 * (lo + hi)
        if ev.norm_sq(mid) <= bound:
            hi = mid
        else:
            lo = mid
    return ev.certificate(plant, hi, gamma)


def _second_moment_gain(cert: GainCertificate, probs: np.ndarray) -> float:
    D = cert.closed_loop
    G = D.T @ D + np.diag(cert.col_energy * (1.0 / probs - 1.0))
    return linops.sym_top_eig(0.5 * (G + G.T))


def contraction_uniform(cert: GainCertificate, p: float) -> float:
    """One-step bound on the growth of E||x||^2 under shared probability p:
    the spectral norm of D'D + ((1-p)/p) Diag(col_energy)."""
    if not 0.0 < p <= 1.0:
        raise InvalidInputError(f"p must lie in (0, 1], got {p}")
    return _second_moment_gain(cert, np.full(cert.n, float(p)))


def contraction_adaptive(cert: GainCertificate, probs) -> float:
    """Per-coordinate analogue of `contraction_uniform`."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (cert.n,):
        raise DimensionError(f"probs must have length {cert.n}")
    if np.any(probs <= 0.0) or np.any(probs > 1.0):
        raise InvalidInputError("every probability must lie in (0, 1]")
    return _second_moment_gain(cert, probs)


def degenerate_coordinates(cert: GainCertificate) -> np.ndarray:
    """Mask of coordinates with (numerically) zero feedback leverage."""
    return cert.col_energy < _DEGENERATE_TOL


def _threshold(closed_norm_sq: float, energy: float, p_floor: float,
               budget: float = 1.0) -> float:
    # 1 / (1 + (budget - ||D||^2) / s); p_floor when the coordinate has
    # no leverage, 1.0 when the budget is already spent by ||D||^2.
    if energy < _DEGENERATE_TOL:
        return p_floor
    if budget <= closed_norm_sq:
        return 1.0
    return 1.0 / (1.0 + (budget - closed_norm_sq) / energy)


def threshold_uniform(cert: GainCertificate, p_floor: float = DEFAULT_P_FLOOR) -> float:
    """Minimal shared probability above which the contraction bound dips
    below 1.  Returns p_floor for a gain with no feedback leverage."""
    if cert.closed_norm_sq >= 1.0:
        raise InvalidInputError(
            f"certificate has ||A+BK||^2 = {cert.closed_norm_sq:.6g} >= 1")
    return _threshold(cert.closed_norm_sq, cert.col_energy_max, p_floor)


def threshold_adaptive(cert: GainCertificate,
                       p_floor: float = DEFAULT_P_FLOOR) -> np.ndarray:
    """Per-coordinate minimal probabilities (p_floor where leverage is zero)."""
    if cert.closed_norm_sq >= 1.0:
        raise InvalidInputError(
            f"certificate has ||A+BK||^2 = {cert.closed_norm_sq:.6g} >= 1")
    return np.array([_threshold(cert.closed_norm_sq, s, p_floor)
                     for s in cert.col_energy])


@dataclass(frozen=True)
class SparsificationPlan:
    """A synthesized gain plus operating probabilities and certificates."""

    cert: GainCertificate
    mode: str                      # "uniform" | "adaptive"
    weights: np.ndarray
    expected_sparsity: float
    contraction: float
    degenerate: np.ndarray         # per-coordinate zero-leverage flags
    p_floor: float
    eps_p: float
    decay_target: float | None
    p_star: float | None = None
    p_vec: np.ndarray | None = None
    threshold: float | None = None
    thresholds: np.ndarray | None = None

    @property
    def probabilities(self) -> np.ndarray:
        if self.mode == "uniform":
            return np.full(self.cert.n, self.p_star)
        return np.asarray(self.p_vec)

    @property
    def is_degenerate(self) -> bool:
        return bool(np.all(self.degenerate))


def _gamma_grid(plant: Plant, delta: float, gamma_grid: str) -> list[float]:
    a = plant.residual_norm
    if not 0.0 < delta:
        raise InvalidInputError("delta must be positive")
    if gamma_grid == "residual":
        start = a
    elif gamma_grid == "full":
        # also cover (a^2, a), where the family remains feasible
        start = a * a + 1e-9
    else:
        raise InvalidInputError(f"unknown gamma_grid mode {gamma_grid!r}")
    grid = list(np.arange(start, 1.0, delta))
    if not grid or grid[-1] < 1.0 - 1e-12:
        grid.append(1.0)
    grid = [float(g) for g in grid if g > a * a + 1e-12]
    if gamma_grid == "residual" and a * a + 1e-12 < a - delta:
        log.debug("gamma grid starts at %.6g although values down to %.6g "
                  "are feasible for the gain family", a, a * a)
    return grid


def _operating_probability(closed_norm_sq: float, energy: float, p_floor: float,
                           eps_p: float, decay_target: float | None) -> float:
    """Threshold plus safety margin, raised to meet the decay target."""
    if energy < _DEGENERATE_TOL:
        return p_floor
    p = _threshold(closed_norm_sq, energy, p_floor) + eps_p
    if decay_target is not None:
        p = max(p, _threshold(closed_norm_sq, energy, p_floor, budget=decay_target))
    return min(p, 1.0)


def _sweep(plant: Plant, delta: float, gamma_grid: str):
    """Yield (gamma, certificate) over the feasible grid points."""
    report = check_assumptions(plant)
    if not (report.rank_ok and report.spectral_ok):
        raise AssumptionError(
            f"plant fails assumptions: rank_ok={report.rank_ok}, "
            f"residual_norm={report.residual_norm:.6g}")
    grid = _gamma_grid(plant, delta, gamma_grid)
    found = False
    for gamma in grid:
        try:
            cert = gain_for_gamma(plant, gamma)
        except InfeasibilityError:
            continue
        found = True
        yield gamma, cert
    if not found:
        raise InfeasibilityError(
            f"no feasible gamma on the grid {grid[:3]}...{grid[-1:]} "
            f"(residual norm {plant.residual_norm:.6g})")


def design_uniform(plant: Plant, delta: float = DEFAULT_DELTA,
                   p_floor: float = DEFAULT_P_FLOOR,
                   eps_p: float = DEFAULT_EPS_P,
                   decay_target: float | None = DEFAULT_DECAY_TARGET,
                   gamma_grid: str = "residual") -> SparsificationPlan:
    """Sweep the contraction target and return the plan with the smallest
    shared measurement probability.

    Each grid point gamma gets the smallest-t gain meeting it; the
    operating probability is the stability threshold plus eps_p, raised
    further (when decay_target is set) so the certified contraction is at
    most decay_target.  Ties in the objective resolve to the smallest
    gamma.  Raises on assumption failure or an empty feasible grid.
    """
    if not 0.0 < p_floor < 1.0:
        raise InvalidInputError("p_floor must lie in (0, 1)")
    best = None
    for gamma, cert in _sweep(plant, delta, gamma_grid):
        smax = cert.col_energy_max
        p = _operating_probability(cert.closed_norm_sq, smax,
                                   p_floor, eps_p, decay_target)
        if best is None or p < best[0]:
            best = (p, gamma, cert)
    p_star, gamma, cert = best
    degenerate = degenerate_coordinates(cert)
    contraction = contraction_uniform(cert, p_star)
    return SparsificationPlan(
        cert=cert, mode="uniform", weights=np.ones(plant.n),
        expected_sparsity=p_star * plant.n, contraction=contraction,
        degenerate=degenerate, p_floor=p_floor, eps_p=eps_p,
        decay_target=decay_target, p_star=p_star,
        threshold=threshold_uniform(cert, p_floor))


def design_adaptive(plant: Plant, weights=None, delta: float = DEFAULT_DELTA,
                    p_floor: float = DEFAULT_P_FLOOR,
                    eps_p: float = DEFAULT_EPS_P,
                    decay_target: float | None = DEFAULT_DECAY_TARGET,
                    gamma_grid: str = "residual") -> SparsificationPlan:
    """Per-coordinate sweep: minimizes the weighted expected number of
    active sensors sum_i w_i p_i over the same gamma grid."""
    if not 0.0 < p_floor < 1.0:
        raise InvalidInputError("p_floor must lie in (0, 1)")
    if weights is None:
        weights = np.ones(plant.n)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (plant.n,):
        raise DimensionError(f"weights must have length {plant.n}")
    if np.any(weights <= 0.0):
        raise InvalidInputError("weights must all be positive")
    best = None
    for gamma, cert in _sweep(plant, delta, gamma_grid):
        p_vec = np.array([
            _operating_probability(cert.closed_norm_sq, s, p_floor,
                                   eps_p, decay_target)
            for s in cert.col_energy])
        es = float(weights @ p_vec)
        if best is None or es < best[0]:
            best = (es, gamma, cert, p_vec)
    es, gamma, cert, p_vec = best
    return SparsificationPlan(
        cert=cert, mode="adaptive", weights=weights,
        expected_sparsity=es,
        contraction=contraction_adaptive(cert, p_vec),
        degenerate=degenerate_coordinates(cert), p_floor=p_floor,
        eps_p=eps_p, decay_target=decay_target, p_vec=p_vec,
        thresholds=threshold_adaptive(cert, p_floor))
