"""Builtin benchmark plants and plant-file IO.

Three generator families, all satisfying the synthesis assumptions
(full-column-rank input, projected residual norm below 1):

* ``converter``        -- a 3-state, 2-input grid-forming converter with an
  unstable open loop (spectral radius 2).
* ``power_grid``       -- a damped swing-style network of n nodes (state
  dimension 2n) with one shared input; unstable through a common
  frequency mode that the input can cancel, which is what makes very
  small measurement probabilities sufficient at scale.
* ``interconnected_chain`` -- N coupled two-state subsystems on a line,
  block-tridiagonal, one input per subsystem.

Plants round-trip through a JSON file schema with fields
``n, m, A, B`` (row-major entry lists) plus optional ``name`` and
``weights``.  Builtin model URIs: ``builtin:converter``,
``builtin:grid?nodes=100&dk=0.2&seed=7``, ``builtin:chain?N=20``.
"""

from __future__ import annotations

import hashlib
import json
import urllib.parse
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .errors import InvalidInputError, PlantFormatError
from .synth import Plant, make_plant


def converter() -> Plant:
    """Grid-forming converter benchmark: 3 states, 2 inputs, rho(A) = 2."""
    A = np.array([[0.0, 0.0, 0.1017],
                  [0.0, 0.0, 0.025],
                  [0.0, 0.0, 2.0]])
    B = np.array([[1.0, 0.005],
                  [0.0, 1.5095],
                  [314.1593, 0.0]])
    return make_plant(A, B, name="converter")


def power_grid(nodes: int, dk: float = 0.2, param_seed: int = 7,
               coupling: float | None = None, theta_leak: float = 2.0,
               freq_gain: float = 1.8, b_theta: float = 0.0,
               b_omega: float = 1.0, inertia=None, damping=None) -> Plant:
    """Damped swing-style network with one shared frequency input.

    Node i carries a phase angle and a frequency deviation; the state is
    the interleaved vector [phase_1, freq_1, ..., phase_n, freq_n].  With
    inertia m_i ~ U[0.5, 2.0) and damping d_i ~ U[0.5, 1.0) drawn from
    `param_seed`, the update is

        phase_i+ = (1 - theta_leak*dk) * phase_i + dk * freq_i
        freq_i+  = (dk/m_i) * sum_{j!=i} k_ij (phase_j - phase_i)
                   + (freq_gain * a_i / n) * sum_j freq_j

    with a_i = 1 - (d_i/m_i)*dk and uniform coupling k_ij = 1/(n-1)
    unless `coupling` overrides it.  The leaky phase keeps the local
    blocks contractive while the shared frequency mode (spectral radius
    about freq_gain * mean(a_i) > 1) makes the open loop genuinely
    unstable; the input column b (b_theta on phases, b_omega on
    frequencies) spans that mode, so a rank-one correction restores
    stability and the required per-coordinate feedback energy shrinks
    like 1/n.  All generated parameters are stored in ``plant.meta``.
    """
    if nodes < 2:
        raise InvalidInputError("power_grid requires at least 2 nodes")
    if dk <= 0:
        raise InvalidInputError("dk must be positive")
    n = nodes
    if inertia is None:
        inertia = 0.5 + 1.5 * streams.uniforms(param_seed,
                                               (streams.LABEL_PARAM, 0), n)
    if damping is None:
        damping = 0.5 + 0.5 * streams.uniforms(param_seed,
                                               (streams.LABEL_PARAM, 1), n)
    inertia = np.asarray(inertia, dtype=float)
    damping = np.asarray(damping, dtype=float)
    if inertia.shape != (n,) or damping.shape != (n,):
        raise InvalidInputError("inertia and damping must have one entry per node")
    kij = 1.0 / (n - 1) if coupling is None else float(coupling)
    k_total = kij * (n - 1)
    alpha = 1.0 - (damping / inertia) * dk

    A = np.zeros((2 * n, 2 * n))
    ph = np.arange(0, 2 * n, 2)
    fr = ph + 1
    A[ph, ph] = 1.0 - theta_leak * dk
    A[ph, fr] = dk
    for i in range(n):
        A[fr[i], ph] = (kij / inertia[i]) * dk
        A[fr[i], ph[i]] = -(k_total / inertia[i]) * dk
    A[np.ix_(fr, fr)] = np.repeat(
        (freq_gain * alpha / n)[:, None], n, axis=1)
    B = np.zeros((2 * n, 1))
    B[ph, 0] = b_theta
    B[fr, 0] = b_omega

    plant = make_plant(A, B, name=f"grid-{n}")
    plant.meta = {
        "kind": "grid", "nodes": n, "dk": dk, "param_seed": int(param_seed),
        "coupling": kij, "theta_leak": theta_leak, "freq_gain": freq_gain,
        "b_theta": b_theta, "b_omega": b_omega,
        "inertia": inertia.tolist(), "damping": damping.tolist(),
        "generator": streams.GENERATOR_NAME,
    }
    return plant


_CHAIN_A = np.array([[1.0, 0.890], [0.890, 1.0]])
_CHAIN_E = np.array([[0.0890, 0.0], [0.0, 0.0890]])
_CHAIN_B = np.array([[3.5600], [1.7800]])


def interconnected_chain(N: int) -> Plant:
    """N two-state subsystems on a line: block-tridiagonal A, one input each."""
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    A = np.zeros((2 * N, 2 * N))
    B = np.zeros((2 * N, N))
    for i in range(N):
        A[2 * i:2 * i + 2, 2 * i:2 * i + 2] = _CHAIN_A
        if i + 1 < N:
            A[2 * i:2 * i + 2, 2 * i + 2:2 * i + 4] = _CHAIN_E
            A[2 * i + 2:2 * i + 4, 2 * i:2 * i + 2] = _CHAIN_E
        B[2 * i:2 * i + 2, i:i + 1] = _CHAIN_B
    plant = make_plant(A, B, name=f"chain-{N}")
    plant.meta = {"kind": "chain", "N": N}
    return plant


def plant_sha256(plant: Plant) -> str:
    """Content hash binding plans to the exact plant they were built for."""
    h = hashlib.sha256()
    h.update(f"{plant.n}x{plant.m}".encode())
    h.update(np.ascontiguousarray(plant.A, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(plant.B, dtype="<f8").tobytes())
    return h.hexdigest()


def save_plant(plant: Plant, path) -> None:
    """Write the plant to the JSON file schema (bit-exact round trip)."""
    doc = {
        "format": "sparsectl-plant",
        "version": 1,
        "n": plant.n,
        "m": plant.m,
        "A": [repr(float(v)) for v in plant.A.ravel(order="C")],
        "B": [repr(float(v)) for v in plant.B.ravel(order="C")],
    }
    if plant.name is not None:
        doc["name"] = plant.name
    if plant.weights is not None:
        doc["weights"] = [repr(float(v)) for v in plant.weights]
    if getattr(plant, "meta", None) is not None:
        doc["meta"] = plant.meta
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _parse_float_list(values, count: int, fieldname: str, ncols: int) -> np.ndarray:
    if not isinstance(values, list) or len(values) != count:
        got = len(values) if isinstance(values, list) else type(values).__name__
        raise PlantFormatError(
            f"field '{fieldname}' must be a list of {count} numbers, got {got}")
    out = np.empty(count)
    for idx, v in enumerate(values):
        try:
            out[idx] = float(v)
        except (TypeError, ValueError):
            raise PlantFormatError(
                f"field '{fieldname}' entry {idx} is not a number: {v!r}") from None
        if not np.isfinite(out[idx]):
            raise PlantFormatError(
                f"field '{fieldname}' has a non-finite entry at row "
                f"{idx // ncols}, column {idx % ncols}")
    return out


def load_plant(path) -> Plant:
    """Load and validate a plant file; errors name the offending field."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise PlantFormatError(f"cannot read plant file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PlantFormatError(f"plant file {path} is not valid JSON: {exc}") from exc
    for key in ("n", "m", "A", "B"):
        if key not in doc:
            raise PlantFormatError(f"plant file is missing field '{key}'")
    n, m = doc["n"], doc["m"]
    if not (isinstance(n, int) and isinstance(m, int) and 1 <= m <= n):
        raise PlantFormatError(f"fields 'n'/'m' invalid: n={n!r}, m={m!r}")
    A = _parse_float_list(doc["A"], n * n, "A", n).reshape(n, n)
    B = _parse_float_list(doc["B"], n * m, "B", m).reshape(n, m)
    weights = None
    if "weights" in doc:
        weights = _parse_float_list(doc["weights"], n, "weights", n)
    plant = make_plant(A, B, name=doc.get("name"), weights=weights)
    plant.meta = doc.get("meta")
    return plant


@dataclass(frozen=True)
class ModelSpec:
    """A resolvable plant source: a builtin generator or a file path."""

    kind: str                      # "converter" | "grid" | "chain" | "file"
    params: dict = field(default_factory=dict)

    def resolve(self) -> Plant:
        if self.kind == "converter":
            return converter()
        if self.kind == "grid":
            return power_grid(**self.params)
        if self.kind == "chain":
            return interconnected_chain(**self.params)
        return load_plant(self.params["path"])


def parse_model_uri(uri: str) -> ModelSpec:
    """Parse ``builtin:...`` URIs; anything else is a plant file path."""
    if not uri.startswith("builtin:"):
        return ModelSpec(kind="file", params={"path": uri})
    rest = uri[len("builtin:"):]
    name, _, query = rest.partition("?")
    args = {k: v[-1] for k, v in urllib.parse.parse_qs(query).items()}
    if name == "converter":
        if args:
            raise InvalidInputError("builtin:converter takes no parameters")
        return ModelSpec(kind="converter")
    if name == "grid":
        params = {}
        try:
            if "nodes" in args:
                params["nodes"] = int(args.pop("nodes"))
            if "dk" in args:
                params["dk"] = float(args.pop("dk"))
            if "seed" in args:
                params["param_seed"] = int(args.pop("seed"))
            for key in ("coupling", "theta_leak", "freq_gain", "b_theta", "b_omega"):
                if key in args:
                    params[key] = float(args.pop(key))
        except ValueError as exc:
            raise InvalidInputError(f"bad grid parameter: {exc}") from exc
        if args:
            raise InvalidInputError(f"unknown grid parameters: {sorted(args)}")
        if "nodes" not in params:
            raise InvalidInputError("builtin:grid requires nodes=<count>")
        return ModelSpec(kind="grid", params=params)
    if name == "chain":
        try:
            N = int(args.pop("N"))
        except KeyError:
            raise InvalidInputError("builtin:chain requires N=<count>") from None
        except ValueError as exc:
            raise InvalidInputError(f"bad chain parameter: {exc}") from exc
        if args:
            raise InvalidInputError(f"unknown chain parameters: {sorted(args)}")
        return ModelSpec(kind="chain", params={"N": N})
    raise InvalidInputError(f"unknown builtin model '{name}'")
