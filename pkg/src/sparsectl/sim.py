"""Closed-loop Monte Carlo simulation under randomized measurement masking.

Trajectories are independent work units keyed by their index: masks come
from counter-based streams with stream_id = trajectory index and initial
states from a separate labeled stream, so an ensemble is bit-reproducible
for any thread count.  Cross-trajectory statistics are reduced in index
order with compensated summation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .errors import DimensionError, InvalidInputError
from .sparsify import Mask
from .synth import (GainCertificate, Plant, SparsificationPlan,
                    contraction_uniform)

#: Trajectories are simulated in fixed-size batches so the arithmetic
#: (and therefore the result, bit for bit) is independent of how many
#: worker threads the batches are spread over.
_CHUNK = 64

_DIVERGENCE_CUTOFF = 1e150   # freeze a trajectory once ||x|| passes this


@dataclass(frozen=True)
class SimConfig:
    steps: int = 200
    runs: int = 100
    init_sigma: float = 100.0
    master_seed: int = 0
    record_components: tuple[int, ...] | None = None
    threads: int = 1

    def __post_init__(self):
        if self.steps < 1 or self.runs < 1:
            raise InvalidInputError("steps and runs must both be >= 1")
        if self.init_sigma < 0:
            raise InvalidInputError("init_sigma must be nonnegative")
        if self.threads < 1:
            raise InvalidInputError("threads must be >= 1")


@dataclass(frozen=True)
class EnsembleStats:
    """Per-step ensemble statistics over k = 0 .. steps.

    Row 0 reflects the sampled initial conditions only.
    """

    runs: int
    steps: int
    mean_state: np.ndarray      # (steps+1, n)
    mean_sq_norm: np.ndarray    # (steps+1,)
    std_sq_norm: np.ndarray     # (steps+1,)
    mean_active: np.ndarray     # (steps+1,)
    diverged_runs: int
    record_components: tuple[int, ...] | None = None

    @property
    def component_means(self) -> np.ndarray | None:
        if self.record_components is None:
            return None
        return self.mean_state[:, list(self.record_components)]


@dataclass(frozen=True)
class DecayReport:
    """Empirical decay verdict against a certified contraction bound."""

    empirical_ratios: np.ndarray   # (steps,), NaN where the base is ~0
    ratio_se: np.ndarray           # (steps,), delta-method standard errors
    bound: float
    verdict: str                   # "converged" | "diverged" | "inconclusive"
    threshold_step: int | None
    tol_rel: float


def step(plant: Plant, K: np.ndarray, mask: Mask, x: np.ndarray) -> np.ndarray:
    """One closed-loop step x -> A x + B K (scale * x).

    The masked state is formed first, so the cost is O(n^2 + n m) and the
    dense product A + B K C is never materialized.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (plant.n,):
        raise DimensionError(f"x must have length {plant.n}")
    return plant.A @ x + plant.B @ (K @ (mask.scale * x))


class _Kahan:
    """Compensated elementwise accumulator."""

    def __init__(self, shape):
        self.total = np.zeros(shape)
        self._c = np.zeros(shape)

    def add(self, arr):
        y = arr - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t


def _simulate_chunk(A, B, K, probs, cfg: SimConfig, mask_seed: int,
                    traj_ids: np.ndarray):
    """Simulate one batch of trajectories; returns per-chunk partials."""
    n = A.shape[0]
    rows = traj_ids.astype(np.uint64)
    X = cfg.init_sigma * streams.normal_block(
        cfg.master_seed, (streams.LABEL_INIT,), rows, n)
    all_on = bool(np.all(probs >= 1.0))
    mask_keys = streams.extend_keys(
        streams.chain_key(mask_seed, (streams.LABEL_MASK,)), rows)

    steps = cfg.steps
    Q = np.empty((len(rows), steps + 1))
    state_sum = np.empty((steps + 1, n))
    active_sum = np.empty(steps + 1)
    frozen = np.zeros(len(rows), dtype=bool)
    cutoff_sq = _DIVERGENCE_CUTOFF ** 2

    with np.errstate(over="ignore"):
        for k in range(steps + 1):
            Q[:, k] = np.einsum("ij,ij->i", X, X)
            state_sum[k] = X.sum(axis=0)
            if all_on:
                scale = np.ones_like(X)
                active_sum[k] = len(rows) * n
            else:
                u = streams.uniforms_for_keys(
                    streams.extend_keys(mask_keys, k), n)
                active = (u < probs[None, :]) | (probs[None, :] >= 1.0)
                scale = np.where(active, 1.0 / probs[None, :], 0.0)
                active_sum[k] = np.count_nonzero(active)
            if k == steps:
                break
            X_next = X @ A.T + ((scale * X) @ K.T) @ B.T
            norm_sq = np.einsum("ij,ij->i", X_next, X_next)
            bad = ~np.isfinite(norm_sq) | (norm_sq > cutoff_sq)
            frozen |= bad
            if frozen.any():
                X_next[frozen] = X[frozen]
            X = X_next
    return Q, state_sum, active_sum, frozen


def _fsum_column(col: np.ndarray) -> float:
    return math.fsum(col.tolist())


def _column_std(Q: np.ndarray, means: np.ndarray) -> np.ndarray:
    """Sample standard deviation per step, scaled against overflow."""
    runs, cols = Q.shape
    std = np.zeros(cols)
    if runs < 2:
        return std
    for k in range(cols):
        d = Q[:, k] - means[k]
        s = float(np.max(np.abs(d)))
        if s == 0.0:
            continue
        z = d / s
        std[k] = s * math.sqrt(math.fsum((z * z).tolist()) / (runs - 1))
    return std


def _run(A, B, K, probs, cfg: SimConfig, mask_seed: int) -> EnsembleStats:
    n = A.shape[0]
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (n,):
        raise DimensionError(f"probs must have length {n}")
    if np.any(probs <= 0.0) or np.any(probs > 1.0):
        raise InvalidInputError("every probability must lie in (0, 1]")

    chunks = [np.arange(lo, min(lo + _CHUNK, cfg.runs))
              for lo in range(0, cfg.runs, _CHUNK)]
    if cfg.threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(
                lambda ids: _simulate_chunk(A, B, K, probs, cfg, mask_seed, ids),
                chunks))
    else:
        parts = [_simulate_chunk(A, B, K, probs, cfg, mask_seed, ids)
                 for ids in chunks]

    # index-ordered compensated reduction across chunks
    state_acc = _Kahan((cfg.steps + 1, n))
    active_acc = _Kahan(cfg.steps + 1)
    Q = np.empty((cfg.runs, cfg.steps + 1))
    diverged = 0
    row = 0
    for (Qc, ssum, asum, frozen), ids in zip(parts, chunks):
        Q[row:row + len(ids)] = Qc
        state_acc.add(ssum)
        active_acc.add(asum)
        diverged += int(np.count_nonzero(frozen))
        row += len(ids)

    mean_sq = np.array([_fsum_column(Q[:, k]) / cfg.runs
                        for k in range(cfg.steps + 1)])
    std_sq = _column_std(Q, mean_sq)
    return EnsembleStats(
        runs=cfg.runs, steps=cfg.steps,
        mean_state=state_acc.total / cfg.runs,
        mean_sq_norm=mean_sq, std_sq_norm=std_sq,
        mean_active=active_acc.total / cfg.runs,
        diverged_runs=diverged,
        record_components=cfg.record_components)


def run_ensemble(plant: Plant, plan: SparsificationPlan, cfg: SimConfig,
                 probs=None) -> EnsembleStats:
    """Monte Carlo ensemble of the closed loop under the plan's gain.

    Initial states are zero-mean Gaussian with standard deviation
    cfg.init_sigma, independent per coordinate; trajectory i uses mask
    stream i.  `probs` overrides the plan's probabilities (same gain).
    """
    if plan.cert.K.shape != (plant.m, plant.n):
        raise DimensionError("plan gain shape does not match the plant")
    if probs is None:
        probs = plan.probabilities
    else:
        probs = np.asarray(probs, dtype=float) * np.ones(plant.n)
    return _run(plant.A, plant.B, plan.cert.K, probs, cfg, cfg.master_seed)


def decay_report(stats: EnsembleStats, contraction: float,
                 tol_rel: float = 1e-3) -> DecayReport:
    """Judge convergence of the mean-square norm against its initial value.

    converged: fell below tol_rel * initial at some step (threshold_step);
    diverged: final value exceeds 10x the initial; else inconclusive.
    """
    if contraction < 0:
        raise InvalidInputError("contraction must be nonnegative")
    m = stats.mean_sq_norm
    steps = stats.steps
    ratios = np.full(steps, np.nan)
    se = np.full(steps, np.nan)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            if m[k] < 1e-12:
                continue
            r = m[k + 1] / m[k]
            ratios[k] = r
            # conservative delta method (positive covariance term dropped)
            v = (stats.std_sq_norm[k + 1] ** 2
                 + r * r * stats.std_sq_norm[k] ** 2) / m[k] ** 2
            se[k] = math.sqrt(v / stats.runs) if np.isfinite(v) else np.inf

    if m[0] == 0.0:
        return DecayReport(ratios, se, contraction, "converged", 0, tol_rel)
    crossed = np.nonzero(m < tol_rel * m[0])[0]
    threshold_step = int(crossed[0]) if crossed.size else None
    if threshold_step is not None:
        verdict = "converged"
    elif m[steps] > 10.0 * m[0]:
        verdict = "diverged"
    else:
        verdict = "inconclusive"
    return DecayReport(ratios, se, contraction, verdict, threshold_step, tol_rel)


@dataclass(frozen=True)
class SweepEntry:
    p: float
    stats: EnsembleStats
    report: DecayReport


def sweep_p(plant: Plant, cert: GainCertificate, p_list, cfg: SimConfig,
            tol_rel: float = 1e-3) -> list[SweepEntry]:
    """One ensemble per probability, with common random numbers.

    All entries share the initial-state draws; mask streams are keyed
    additionally by the position of p in the list.
    """
    entries = []
    for idx, p in enumerate(p_list):
        p = float(p)
        if not 0.0 < p <= 1.0:
            raise InvalidInputError(f"p entries must lie in (0, 1], got {p}")
        mask_seed = streams.derive_seed(cfg.master_seed, streams.LABEL_SWEEP, idx)
        probs = np.full(plant.n, p)
        stats = _run(plant.A, plant.B, cert.K, probs, cfg, mask_seed)
        report = decay_report(stats, contraction_uniform(cert, p), tol_rel)
        entries.append(SweepEntry(p=p, stats=stats, report=report))
    return entries
