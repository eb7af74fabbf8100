"""De Finetti reduced states and the moment correlation matrix.

From an ensemble over the Bloch ball, build the first moment x and
second moment tau, assemble the one- and two-copy reduced states

    rho1 = (1 + x.sigma)/2
    rho2 = (1 x 1 + x.sigma x 1 + 1 x x.sigma + sum_ij tau_ij sigma_i x sigma_j)/4

and the 4x4 block correlation matrix R = [[1, x^T], [x, tau]]/4 in the
(1, sigma_1, sigma_2, sigma_3) operator basis.  A rank(tau) = 3 (or
rank(R) > 2) outcome is a sufficient certificate of nonzero discord.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import IDENTITY2, PAULI, DensityMatrix, trace_out_last
from .errors import BallViolation, DimCap, InvariantViolation, MomentInconsistency
from .priors import ParticleEnsemble

RHO_N_MAX = 6


@dataclass(frozen=True)
class MomentSummary:
    """First moment x = sum_i w_i n_i and second moment tau = sum_i w_i n_i n_i^T."""

    x: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(3)
        tau = np.asarray(self.tau, dtype=float).reshape(3, 3)
        if np.max(np.abs(tau - tau.T)) > 1e-12:
            raise InvariantViolation("tau is not symmetric within 1e-12")
        if np.trace(tau) > 1.0 + 1e-10:
            raise InvariantViolation(f"Tr(tau) = {np.trace(tau):.12g} > 1")
        if np.linalg.eigvalsh(tau)[0] < -1e-12:
            raise InvariantViolation("tau is not PSD within 1e-12")
        if np.linalg.eigvalsh(tau - np.outer(x, x))[0] < -1e-10:
            raise InvariantViolation("covariance tau - x x^T is not PSD within 1e-10")
        x.flags.writeable = False
        tau.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "tau", tau)

    def to_json(self) -> str:
        return json.dumps({"x": self.x.tolist(), "tau": self.tau.reshape(9).tolist()})

    @classmethod
    def from_json(cls, s: str) -> "MomentSummary":
        obj = json.loads(s)
        return cls(np.array(obj["x"]), np.array(obj["tau"]).reshape(3, 3))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Block matrix R = [[1, x^T], [x, tau]] / 4."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).reshape(4, 4)
        r.flags.writeable = False
        object.__setattr__(self, "r", r)

    def to_json(self) -> str:
        return json.dumps({"r": self.r.reshape(16).tolist()})


def moments(e: ParticleEnsemble) -> MomentSummary:
    """Weighted first and second moments of the ensemble."""
    x = e.weights @ e.vectors
    tau = np.einsum("i,ij,ik->jk", e.weights, e.vectors, e.vectors)
    tau = (tau + tau.T) / 2
    return MomentSummary(x, tau)


def rho1(m: MomentSummary) -> DensityMatrix:
    """Single-copy reduced state (1 + x.sigma)/2."""
    if m.x @ m.x > 1.0 + 1e-10:
        raise BallViolation("first moment lies outside the Bloch ball")
    return DensityMatrix((IDENTITY2 + np.tensordot(m.x, PAULI, axes=1)) / 2)


def rho2(m: MomentSummary) -> DensityMatrix:
    """Two-copy reduced state assembled from the moments."""
    xs = np.tensordot(m.x, PAULI, axes=1)
    out = np.kron(IDENTITY2, IDENTITY2) + np.kron(xs, IDENTITY2) + np.kron(IDENTITY2, xs)
    out = out + np.einsum("ij,iab,jcd->acbd", m.tau, PAULI, PAULI).reshape(4, 4)
    out /= 4
    # Enforce exact Hermiticity against einsum rounding dust.
    out = (out + out.conj().T) / 2
    if np.linalg.eigvalsh(out)[0] < -1e-9:
        raise MomentInconsistency("moment pair yields a non-PSD two-copy state")
    return DensityMatrix(out)


def rhoN(e: ParticleEnsemble, n: int, chunk: int = 4096) -> DensityMatrix:
    """N-copy state sum_i w_i rho(n_i)^(x n), for n up to 6 (dim 64).

    Evaluated directly from the particle sum (chunked over particles), so
    agreement with rho2(moments(e)) at n = 2 is a genuine cross-check of
    the moment assembly.
    """
    if not 1 <= n <= RHO_N_MAX:
        raise DimCap(f"n must be in 1..{RHO_N_MAX}, got {n}")
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for lo in range(0, len(e), chunk):
        vecs = e.vectors[lo : lo + chunk]
        w = e.weights[lo : lo + chunk]
        states = (IDENTITY2[None] + np.tensordot(vecs, PAULI, axes=1)) / 2
        acc = states
        for _ in range(n - 1):
            d = acc.shape[1]
            acc = np.einsum("pij,pkl->pikjl", acc, states).reshape(-1, d * 2, d * 2)
        out += np.tensordot(w, acc, axes=1)
    out = (out + out.conj().T) / 2
    return DensityMatrix(out)


def correlation_matrix(m: MomentSummary) -> CorrelationMatrix:
    """Correlation matrix of rho2 in the (1, sigma) x (1, sigma) basis."""
    r = np.empty((4, 4))
    r[0, 0] = 1.0
    r[0, 1:] = m.x
    r[1:, 0] = m.x
    r[1:, 1:] = m.tau
    return CorrelationMatrix(r / 4)


def rank_test(m: MomentSummary, tol: float = 1e-8) -> dict:
    """Singular-value ranks of tau and R, and the sufficient-condition flag.

    A singular value counts toward the rank when it exceeds tol times the
    largest one.  The flag certifies nonzero discord when rank(tau) = 3
    or rank(R) > 2; a False flag is inconclusive, not a zero-discord
    claim.
    """
    if tol <= 0:
        raise InvariantViolation("rank tolerance must be positive")
    sv_tau = np.linalg.svd(m.tau, compute_uv=False)
    sv_r = np.linalg.svd(correlation_matrix(m).r, compute_uv=False)
    rank_tau = int(np.sum(sv_tau > tol * sv_tau[0])) if sv_tau[0] > 0 else 0
    rank_r = int(np.sum(sv_r > tol * sv_r[0]))
    return {
        "rank_tau": rank_tau,
        "rank_r": rank_r,
        "flags_nonzero_discord": bool(rank_tau == 3 or rank_r > 2),
    }
