"""Acceptance suite: one test per criterion, each printing a pass line
with its runtime against the stated budget (run with -s to see them)."""

import math
import time

import numpy as np
import pytest

from sparsectl import (SimConfig, contraction_uniform, converter,
                       decay_report, design_adaptive, design_uniform,
                       interconnected_chain, lmi_feasible, power_grid,
                       run_ensemble, second_moment_matrix)
from sparsectl.cli import main

from conftest import random_plant
from test_sparsify import enumerate_second_moment


class _Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, *_):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        print(f"ACCEPTANCE {status}: {self.name} "
              f"[{elapsed:.1f}s of {self.seconds:.0f}s budget]")
        assert elapsed < self.seconds, f"{self.name} exceeded runtime budget"
        return False


def test_second_moment_identity():
    rng = np.random.default_rng(1001)
    with _Budget("second-moment identity (exhaustive, n=2..8)", 10):
        for n in range(2, 9):
            for _ in range(50):
                L = rng.normal(size=(n, n)) / math.sqrt(n)
                probs = rng.uniform(0.1, 1.0, size=n)
                expected = enumerate_second_moment(L, probs)
                got = second_moment_matrix(L, probs)
                assert np.linalg.norm(got - expected) <= 1e-12


def test_schur_equivalence():
    rng = np.random.default_rng(1002)
    with _Budget("Schur equivalence (1000 random systems)", 30):
        checked = 0
        disagreements = 0
        while checked < 1000:
            n = int(rng.integers(2, 7))
            m = int(rng.integers(1, n + 1))
            A = rng.normal(size=(n, n)) / math.sqrt(n)
            B = rng.normal(size=(n, m)) / math.sqrt(n)
            K = rng.normal(size=(m, n)) / math.sqrt(n)
            dns = float(np.linalg.svd(A + B @ K, compute_uv=False)[0]) ** 2
            gamma = dns * float(np.exp(rng.uniform(-0.7, 0.7)))
            if gamma <= 0 or abs(dns - gamma) <= 1e-6:
                continue
            checked += 1
            if lmi_feasible(A, B, K, gamma) != (dns < gamma):
                disagreements += 1
        assert disagreements == 0


def test_uniform_and_adaptive_soundness():
    rng = np.random.default_rng(1003)
    with _Budget("contraction soundness (200 random plants)", 120):
        for _ in range(200):
            plant = random_plant(rng, n=int(rng.integers(2, 7)))
            uni = design_uniform(plant, delta=0.02)
            assert uni.contraction < 1.0
            assert 0.0 < uni.p_star <= 1.0
            ada = design_adaptive(plant, delta=0.02)
            assert ada.contraction < 1.0
            assert np.all(ada.p_vec <= uni.p_star + uni.eps_p + 1e-12)


def test_converter_end_to_end():
    with _Budget("converter end-to-end", 60):
        plant = converter()
        plan = design_uniform(plant)
        assert 0.73 <= plan.p_star <= 0.85
        cfg = SimConfig(steps=200, runs=100, init_sigma=100.0, master_seed=7)
        stats = run_ensemble(plant, plan, cfg)
        report = decay_report(stats, plan.contraction)
        assert report.verdict == "converged"
        assert report.threshold_step is not None
        assert report.threshold_step <= 200
        stats_low = run_ensemble(plant, plan, cfg, probs=np.full(3, 0.4))
        report_low = decay_report(stats_low,
                                  contraction_uniform(plan.cert, 0.4))
        assert report_low.verdict == "diverged"


def test_adaptive_converter():
    with _Budget("adaptive converter probabilities", 60):
        plan = design_adaptive(converter())
        p = plan.p_vec
        assert p[2] > p[0] and p[2] > p[1]
        assert abs(p[2] - 0.794) <= 0.08
        assert p[0] < 0.15 and p[1] < 0.15


def test_decay_bound():
    with _Budget("contraction bound vs empirical ratios", 120):
        plant = converter()
        plan = design_uniform(plant)
        p = plan.p_star + 0.05
        f = contraction_uniform(plan.cert, p)
        cfg = SimConfig(steps=51, runs=1000, init_sigma=100.0, master_seed=23)
        stats = run_ensemble(plant, plan, cfg, probs=np.full(3, p))
        report = decay_report(stats, f)
        window = 5
        ratios = report.empirical_ratios[:50]
        ses = report.ratio_se[:50]
        for k in range(50 - window + 1):
            r = ratios[k:k + window]
            s = ses[k:k + window]
            if np.any(np.isnan(r)):
                continue
            assert r.mean() <= f + 4.0 * s.mean()


def test_expectation_dynamics():
    with _Budget("expectation dynamics (2000-run mean state)", 120):
        plant = converter()
        plan = design_uniform(plant)
        runs = 2000
        cfg = SimConfig(steps=20, runs=runs, init_sigma=100.0, master_seed=29)
        stats = run_ensemble(plant, plan, cfg)
        D = plant.A + plant.B @ plan.cert.K
        tol = 5.0 / math.sqrt(runs) * math.sqrt(stats.mean_sq_norm[0])
        ref = stats.mean_state[0].copy()
        for k in range(1, 21):
            ref = D @ ref
            assert np.linalg.norm(stats.mean_state[k] - ref) <= tol


def test_grid_scaling_trend():
    with _Budget("grid scaling trend (n = 50, 100, 200)", 600):
        results = []
        for nodes in (50, 100, 200):
            plant = power_grid(nodes, dk=0.2, param_seed=7)
            plan = design_uniform(plant)
            results.append((nodes, plan.p_star, plan.expected_sparsity))
        for nodes, p_star, es in results:
            assert 3.0 <= es <= 8.0, (nodes, es)
            assert es == pytest.approx(p_star * 2 * nodes, rel=1e-12)
        p_values = [r[1] for r in results]
        assert p_values[0] >= p_values[1] >= p_values[2]


def test_chain_end_to_end():
    with _Budget("interconnected chain end-to-end", 120):
        plant = interconnected_chain(20)
        plan = design_uniform(plant)
        assert 0.75 <= plan.p_star <= 0.87
        cfg = SimConfig(steps=200, runs=100, init_sigma=100.0, master_seed=31)
        stats = run_ensemble(plant, plan, cfg)
        report = decay_report(stats, plan.contraction)
        assert report.verdict == "converged"


def test_cli_thread_determinism(tmp_path):
    with _Budget("CLI byte determinism across thread counts", 60):
        plan_path = tmp_path / "plan.json"
        assert main(["synth", "builtin:converter",
                     "--out", str(plan_path)]) == 0
        outputs = []
        for threads in ("1", "8"):
            out = tmp_path / f"run_t{threads}.csv"
            rc = main(["simulate", "builtin:converter",
                       "--plan", str(plan_path), "--seed", "1234",
                       "--threads", threads, "--record", "0,1,2",
                       "--out", str(out)])
            assert rc == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
