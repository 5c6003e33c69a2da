"""File formats: plan JSON, run manifests, and the per-step CSV schema.

CSV schema (version 1, stable across commands):

    k,mean_sq_norm,std_sq_norm,active_sensors_mean[,x_mean_<i>...]

Floats are serialized with 17 significant digits so values round-trip
losslessly.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import DimensionError, PlantFormatError
from .models import plant_sha256
from .sim import EnsembleStats
from .streams import GENERATOR_NAME
from .synth import (GainCertificate, Plant, SparsificationPlan,
                    contraction_adaptive, contraction_uniform)

CSV_SCHEMA_VERSION = 1


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def plan_to_dict(plan: SparsificationPlan, plant: Plant) -> dict:
    cert = plan.cert
    doc = {
        "format": "sparsectl-plan",
        "version": 1,
        "mode": plan.mode,
        "n": cert.n,
        "m": cert.K.shape[0],
        "K": [repr(float(v)) for v in cert.K.ravel(order="C")],
        "gamma": cert.gamma,
        "t": cert.t,
        "closed_norm_sq": cert.closed_norm_sq,
        "col_energy": cert.col_energy.tolist(),
        "weights": plan.weights.tolist(),
        "expected_sparsity": plan.expected_sparsity,
        "contraction": plan.contraction,
        "degenerate": plan.degenerate.tolist(),
        "p_floor": plan.p_floor,
        "eps_p": plan.eps_p,
        "decay_target": plan.decay_target,
        "generator": GENERATOR_NAME,
        "plant_sha256": plant_sha256(plant),
        "plant_name": plant.name,
    }
    if plan.mode == "uniform":
        doc["p_star"] = plan.p_star
        doc["threshold"] = plan.threshold
    else:
        doc["p_vec"] = plan.p_vec.tolist()
        doc["thresholds"] = plan.thresholds.tolist()
    return doc


def save_plan(plan: SparsificationPlan, plant: Plant, path,
              manifest_path=None) -> None:
    doc = plan_to_dict(plan, plant)
    if manifest_path is not None:
        doc["manifest"] = str(manifest_path)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_plan_file(path) -> dict:
    """Read and minimally validate a plan document (IO/parse errors only)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise PlantFormatError(f"cannot read plan file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PlantFormatError(f"plan file {path} is not valid JSON: {exc}") from exc
    if doc.get("format") != "sparsectl-plan":
        raise PlantFormatError(f"{path} is not a sparsectl plan file")
    return doc


def bind_plan(doc: dict, plant: Plant) -> SparsificationPlan:
    """Rebuild a plan against `plant`, rejecting stale pairings by hash."""
    if doc["n"] != plant.n or doc["m"] != plant.m:
        raise DimensionError(
            f"plan is {doc['m']}x{doc['n']} but plant is {plant.m}x{plant.n}")
    if doc["plant_sha256"] != plant_sha256(plant):
        raise DimensionError(
            "plan was synthesized for a different plant (hash mismatch)")
    K = np.array([float(v) for v in doc["K"]]).reshape(doc["m"], doc["n"])
    D = plant.A + plant.B @ K
    cert = GainCertificate(
        K=K, gamma=doc["gamma"], t=doc["t"], closed_loop=D,
        closed_norm_sq=doc["closed_norm_sq"],
        col_energy=np.asarray(doc["col_energy"], dtype=float),
        col_energy_max=float(max(doc["col_energy"])))
    common = dict(
        cert=cert, mode=doc["mode"],
        weights=np.asarray(doc["weights"], dtype=float),
        expected_sparsity=doc["expected_sparsity"],
        contraction=doc["contraction"],
        degenerate=np.asarray(doc["degenerate"], dtype=bool),
        p_floor=doc["p_floor"], eps_p=doc["eps_p"],
        decay_target=doc["decay_target"])
    if doc["mode"] == "uniform":
        return SparsificationPlan(p_star=doc["p_star"],
                                  threshold=doc["threshold"], **common)
    return SparsificationPlan(
        p_vec=np.asarray(doc["p_vec"], dtype=float),
        thresholds=np.asarray(doc["thresholds"], dtype=float), **common)


def load_plan(path, plant: Plant) -> SparsificationPlan:
    return bind_plan(read_plan_file(path), plant)


def plan_contraction(plan: SparsificationPlan, probs: np.ndarray) -> float:
    """Contraction bound of the plan's gain at override probabilities."""
    if np.all(probs == probs[0]):
        return contraction_uniform(plan.cert, float(probs[0]))
    return contraction_adaptive(plan.cert, probs)


def write_stats_csv(stats: EnsembleStats, path) -> None:
    header = ["k", "mean_sq_norm", "std_sq_norm", "active_sensors_mean"]
    recorded = stats.record_components or ()
    header += [f"x_mean_{i}" for i in recorded]
    lines = [",".join(header)]
    for k in range(stats.steps + 1):
        row = [str(k), _fmt(stats.mean_sq_norm[k]), _fmt(stats.std_sq_norm[k]),
               _fmt(stats.mean_active[k])]
        row += [_fmt(stats.mean_state[k, i]) for i in recorded]
        lines.append(",".join(row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_stats_csv(path) -> dict[str, np.ndarray]:
    """Parse a stats CSV back into columns (used by tests and demos)."""
    with open(path) as fh:
        rows = [line.strip().split(",") for line in fh if line.strip()]
    header, data = rows[0], rows[1:]
    cols = {name: np.array([float(r[j]) for r in data])
            for j, name in enumerate(header)}
    return cols


@dataclass
class ManifestWriter:
    """Collects the resolved configuration of one CLI run."""

    command: list[str]
    config: dict
    started: float = 0.0

    def __post_init__(self):
        self.started = time.time()
        self.outputs: list[str] = []

    def add_output(self, path) -> None:
        self.outputs.append(str(path))

    def write(self, path) -> None:
        doc = {
            "format": "sparsectl-manifest",
            "version": 1,
            "csv_schema_version": CSV_SCHEMA_VERSION,
            "toolkit_version": __version__,
            "generator": GENERATOR_NAME,
            "command": self.command,
            "config": self.config,
            "duration_s": time.time() - self.started,
            "outputs": self.outputs,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
