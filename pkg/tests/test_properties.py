"""Property-based checks of the structural invariants."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from blochtomo import (
    ParticleEnsemble,
    axis_povm,
    bloch_to_density,
    born_probabilities,
    density_to_bloch,
    geometric_discord_closed,
    moments,
    reweight,
    rho2,
)

ball_vectors = st.builds(
    lambda u, v, w, r: _scale([u, v, w], r),
    st.floats(-1, 1),
    st.floats(-1, 1),
    st.floats(-1, 1),
    st.floats(0, 0.999),
)


def _scale(v, r):
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm < 1e-9:
        return np.zeros(3)
    return v * (r / norm)


@given(ball_vectors)
def test_bloch_round_trip(n):
    assert np.allclose(density_to_bloch(bloch_to_density(n)), n, atol=1e-12)


@given(ball_vectors)
def test_state_spectrum_from_radius(n):
    evals = np.linalg.eigvalsh(bloch_to_density(n).mat)
    r = np.linalg.norm(n)
    assert np.allclose(sorted(evals), [(1 - r) / 2, (1 + r) / 2], atol=1e-12)


@given(ball_vectors, ball_vectors)
def test_born_probabilities_normalized(n, m):
    axis = m / np.linalg.norm(m) if np.linalg.norm(m) > 1e-9 else np.array([0.0, 0.0, 1.0])
    p = born_probabilities(bloch_to_density(n), axis_povm(axis))
    assert abs(p.sum() - 1.0) < 1e-10
    assert p.min() >= -1e-12


@settings(deadline=None)
@given(
    st.lists(ball_vectors, min_size=1, max_size=12),
    st.integers(0, 2**32 - 1),
)
def test_ensemble_discord_nonnegative_and_rho2_valid(points, seed):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(len(points)))
    e = ParticleEnsemble(np.array(points), w)
    m = moments(e)
    assert geometric_discord_closed(m) >= 0.0
    assert np.linalg.eigvalsh(rho2(m).mat)[0] >= -1e-12


@settings(deadline=None)
@given(st.integers(2, 50), st.integers(0, 2**32 - 1))
def test_reweight_keeps_normalization(count, seed):
    rng = np.random.default_rng(seed)
    e = ParticleEnsemble(
        rng.standard_normal((count, 3)) * 0.2, np.full(count, 1.0 / count)
    )
    out = reweight(e, rng.random(count) + 1e-9)
    assert abs(out.weights.sum() - 1.0) < 1e-10
    assert out.weights.min() >= 0
