import numpy as np

from debate_geometry.subspace import random_subspace

ACCEPTANCE_LINES = []


def unit(x):
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x)


def random_pair(seed, d=None, k=None, kb=None):
    """Two random subspaces and a unit preference drawn from one generator."""
    rng = np.random.default_rng(seed)
    if d is None:
        d = int(rng.integers(2, 21))
    if k is None:
        k = int(rng.integers(1, d // 2 + 1))
    kb = k if kb is None else kb
    va = random_subspace(d, k, rng)
    vb = random_subspace(d, kb, rng)
    w = unit(rng.standard_normal(d))
    return va, vb, w


def random_models(seed, n, d, k):
    rng = np.random.default_rng(seed)
    models = [random_subspace(d, k, rng) for _ in range(n)]
    return models, unit(rng.standard_normal(d))
