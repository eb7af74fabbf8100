"""Shared constructors for test states and random ensembles."""

import numpy as np

from blochtomo import DensityMatrix, ParticleEnsemble


def random_ensemble(rng: np.random.Generator, size: int) -> ParticleEnsemble:
    """Random weighted particles strictly inside the Bloch ball."""
    g = rng.standard_normal((size, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(size) ** (1.0 / 3.0)
    w = rng.dirichlet(np.ones(size)) if size > 1 else np.array([1.0])
    return ParticleEnsemble(g * r[:, None], w)


def bell_state() -> DensityMatrix:
    """(|00> + |11>)(<00| + <11|) / 2."""
    v = np.zeros(4)
    v[0] = v[3] = 1 / np.sqrt(2)
    return DensityMatrix(np.outer(v, v))


def classical_state() -> DensityMatrix:
    """(|00><00| + |11><11|) / 2: classically correlated, zero discord."""
    return DensityMatrix(np.diag([0.5, 0.0, 0.0, 0.5]))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """exp(iH) for a random Hermitian H, via its eigendecomposition."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (a + a.conj().T) / 2
    evals, vecs = np.linalg.eigh(h)
    return vecs @ np.diag(np.exp(1j * evals)) @ vecs.conj().T
