import numpy as np
import pytest

from sparsectl import make_plant


def random_plant(rng, n=None, m=None, target_residual=None):
    """Random plant satisfying the synthesis assumptions.

    B is resampled until it has full column rank; A is rescaled so the
    projected residual norm hits a random (or given) target below 1,
    then the assumption check is re-verified (rejection backstop).
    """
    for _ in range(100):
        n_ = int(n if n is not None else rng.integers(2, 9))
        m_ = int(m if m is not None else rng.integers(1, n_ + 1))
        B = rng.normal(size=(n_, m_))
        A = rng.normal(size=(n_, n_))
        if np.linalg.matrix_rank(B) < m_:
            continue
        q = np.linalg.svd(A - B @ np.linalg.lstsq(B, A, rcond=None)[0],
                          compute_uv=False)[0]
        if m_ == n_:
            A = A * (1.2 / np.linalg.svd(A, compute_uv=False)[0])
        else:
            if q < 1e-9:
                continue
            target = target_residual if target_residual is not None \
                else rng.uniform(0.2, 0.95)
            A = A * (target / q)
        plant = make_plant(A, B)
        if plant.assumptions_ok:
            return plant
    raise RuntimeError("random_plant failed to produce a feasible plant")


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
