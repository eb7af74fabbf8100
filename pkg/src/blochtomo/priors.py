"""Weighted particle ensembles over the Bloch ball.

An ensemble is the empirical representation of a measure dμ(n): a set of
Bloch vectors with normalized nonnegative weights.  The same object
serves as prior and (after reweighting) posterior.

All sampling uses numpy's PCG64 generator seeded explicitly, so a given
(count, seed) pair reproduces the exact same particles on any platform.
"""

from __future__ import annotations

import io
import json

import numpy as np

from .errors import (
    AllZeroWeight,
    BallViolation,
    NotUnitDirection,
    WeightSumViolation,
    ZeroCount,
)

RNG_ALGORITHM = "PCG64"
WEIGHT_TOL = 1e-10


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class ParticleEnsemble:
    """Normalized weighted sample {(n_i, w_i)} inside the Bloch ball."""

    __slots__ = ("vectors", "weights", "seed")

    def __init__(self, vectors, weights, seed=None):
        vectors = np.array(vectors, dtype=float)
        weights = np.array(weights, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != 3 or vectors.shape[0] == 0:
            raise ZeroCount(f"expected a nonempty (count, 3) array, got {vectors.shape}")
        if weights.shape != (vectors.shape[0],):
            raise WeightSumViolation("one weight per particle required")
        if weights.min() < 0:
            raise WeightSumViolation(f"negative weight {weights.min():.3e}")
        total = weights.sum()
        if abs(total - 1.0) > 1e-6:
            raise WeightSumViolation(f"weights sum to {total:.8g}, expected 1")
        r2 = np.einsum("ij,ij->i", vectors, vectors)
        if r2.max() > 1.0 + 1e-12:
            raise BallViolation(f"particle outside the ball, |n|^2 = {r2.max():.12g}")
        # Renormalize so downstream moment sums see sum(w) = 1 to 1e-10.
        weights = weights / total
        vectors.flags.writeable = False
        weights.flags.writeable = False
        self.vectors = vectors
        self.weights = weights
        self.seed = seed

    def __len__(self):
        return self.vectors.shape[0]

    def __repr__(self):
        return f"ParticleEnsemble(count={len(self)}, seed={self.seed})"

    def to_json(self) -> str:
        particles = np.column_stack([self.vectors, self.weights]).tolist()
        return json.dumps({"seed": self.seed, "particles": particles})

    @classmethod
    def from_json(cls, s: str) -> "ParticleEnsemble":
        obj = json.loads(s)
        arr = np.array(obj["particles"], dtype=float)
        return cls(arr[:, :3], arr[:, 3], seed=obj.get("seed"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n1,n2,n3,w\n")
        for (n1, n2, n3), w in zip(self.vectors, self.weights):
            buf.write(f"{n1:.17g},{n2:.17g},{n3:.17g},{w:.17g}\n")
        return buf.getvalue()


def uniform_ball(count: int, seed: int) -> ParticleEnsemble:
    """Sample `count` particles uniformly from the unit ball, equal weights.

    Direction is an isotropic unit vector, radius is U^(1/3) so that the
    radial density matches the volume measure.
    """
    if count < 1:
        raise ZeroCount("count must be >= 1")
    rng = _rng(seed)
    g = rng.standard_normal((count, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(count) ** (1.0 / 3.0)
    return ParticleEnsemble(g * r[:, None], np.full(count, 1.0 / count), seed=seed)


def uniform_sphere(count: int, seed: int) -> ParticleEnsemble:
    """Sample `count` pure-state particles uniformly from the unit sphere."""
    if count < 1:
        raise ZeroCount("count must be >= 1")
    rng = _rng(seed)
    g = rng.standard_normal((count, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return ParticleEnsemble(g, np.full(count, 1.0 / count), seed=seed)


def point_mass(points, weights) -> ParticleEnsemble:
    """Finite-support measure sum_a p_a delta(n - e_a); moments are exact."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    weights = np.asarray(weights, dtype=float)
    return ParticleEnsemble(points, weights)


def line_prior(direction, offsets, weights) -> ParticleEnsemble:
    """Measure supported on the line {t * direction} through the origin.

    Args:
        direction: unit Bloch vector.
        offsets: values t in [-1, 1]; particle i sits at offsets[i] * direction.
        weights: probability weights for the offsets.
    """
    direction = np.asarray(direction, dtype=float)
    if abs(direction @ direction - 1.0) > 2e-12:
        raise NotUnitDirection(f"|direction| = {np.linalg.norm(direction):.12g} != 1")
    offsets = np.asarray(offsets, dtype=float)
    if np.abs(offsets).max() > 1.0 + 1e-12:
        raise BallViolation("line offsets must lie in [-1, 1]")
    return ParticleEnsemble(offsets[:, None] * direction[None, :], weights)


def reweight(e: ParticleEnsemble, factors) -> ParticleEnsemble:
    """Multiply weights by nonnegative factors and renormalize.

    Raises:
        AllZeroWeight: if every product w_i * f_i vanishes (zero evidence).
    """
    factors = np.asarray(factors, dtype=float)
    if factors.shape != (len(e),):
        raise WeightSumViolation("one factor per particle required")
    if factors.min() < 0:
        raise WeightSumViolation("reweight factors must be nonnegative")
    w = e.weights * factors
    total = w.sum()
    if total <= 0:
        raise AllZeroWeight("all reweighted particles have zero weight")
    return ParticleEnsemble(e.vectors, w / total, seed=e.seed)
