"""Counter-based random streams.

Every random quantity in the toolkit is a pure function of a 64-bit seed
plus a tuple of key words (stream id, time step, ...) and a draw index.
This makes ensembles reproducible under any execution order or thread
count: there is no generator state to share or advance.

The construction chains the splitmix64 finalizer over the key words and
then over the draw index, which gives a counter-based generator with a
2**64 counter space per key.  The generator name is exported so output
metadata can pin it.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "splitmix64-chain"

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX_A = _U64(0xBF58476D1CE4E5B9)
_MIX_B = _U64(0x94D049BB133111EB)

# Key-word labels for the independent sub-streams.
LABEL_MASK = 0x6D61736B      # measurement masks
LABEL_INIT = 0x696E6974      # initial-state draws
LABEL_PARAM = 0x7061726D     # benchmark-model parameters
LABEL_SWEEP = 0x73776570     # per-parameter sub-seeds in sweeps


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _MIX_A
    z = (z ^ (z >> _U64(27))) * _MIX_B
    return z ^ (z >> _U64(31))


def _key(seed: int, words: tuple) -> np.uint64:
    with np.errstate(over="ignore"):
        h = _mix(np.asarray(seed, dtype=np.uint64) + _GOLDEN)
        for w in words:
            h = _mix(h ^ np.asarray(w, dtype=np.uint64))
    return h


def derive_seed(seed: int, *words: int) -> int:
    """Derive a sub-seed from a seed and key words (for nested streams)."""
    return int(_key(seed, words))


def chain_key(seed: int, words: tuple) -> np.uint64:
    """Key for (seed, *words); extendable with `extend_keys`."""
    return _key(seed, words)


def extend_keys(keys, word) -> np.ndarray:
    """Mix one more key word into one key or an array of keys."""
    with np.errstate(over="ignore"):
        return _mix(np.asarray(keys, dtype=np.uint64) ^ np.asarray(word, dtype=np.uint64))


def uniforms_for_keys(keys: np.ndarray, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for each key, shape (len(keys), count).

    Row r equals ``uniforms(...)`` for the chain that produced keys[r];
    the value at a given index never depends on `count`.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    idx = np.arange(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = _mix(keys[..., None] ^ (idx * _GOLDEN))
    return (bits >> _U64(11)).astype(np.float64) * (2.0 ** -53)


def uniforms(seed: int, words: tuple, count: int) -> np.ndarray:
    """Return `count` uniforms in [0, 1) keyed by (seed, *words, index)."""
    h = _key(seed, words)
    idx = np.arange(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = _mix(h ^ (idx * _GOLDEN))
    return (bits >> _U64(11)).astype(np.float64) * (2.0 ** -53)


def uniform_block(seed: int, words: tuple, rows: np.ndarray, count: int) -> np.ndarray:
    """Vectorized `uniforms` over trailing row keys: row r equals
    ``uniforms(seed, words + (rows[r],), count)``."""
    keys = extend_keys(_key(seed, words), np.asarray(rows, dtype=np.uint64))
    return uniforms_for_keys(keys, count)


def _normals_from_uniforms(u1: np.ndarray, u2: np.ndarray, count: int) -> np.ndarray:
    radius = np.sqrt(-2.0 * np.log1p(-u1))   # 1-u1 in (0,1], log finite
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)], axis=-1)
    return z[..., :count]


def normals(seed: int, words: tuple, count: int) -> np.ndarray:
    """Standard normal draws via Box-Muller on two uniform sub-streams."""
    half = (count + 1) // 2
    u1 = uniforms(seed, words + (0,), half)
    u2 = uniforms(seed, words + (1,), half)
    return _normals_from_uniforms(u1, u2, count)


def normal_block(seed: int, words: tuple, rows: np.ndarray, count: int) -> np.ndarray:
    """Vectorized `normals` over trailing row keys, shape (len(rows), count)."""
    keys = extend_keys(_key(seed, words), np.asarray(rows, dtype=np.uint64))
    half = (count + 1) // 2
    u1 = uniforms_for_keys(extend_keys(keys, 0), half)
    u2 = uniforms_for_keys(extend_keys(keys, 1), half)
    return _normals_from_uniforms(u1, u2, count)
