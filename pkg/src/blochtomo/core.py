"""Small-dimension quantum-state primitives.

Bloch-ball parametrization of qubit density matrices, tensor products,
partial traces, von Neumann entropy (in nats) and Born-rule outcome
probabilities.  All matrices are dense complex numpy arrays; dimensions
stay at or below 64 (six qubits), so no sparse machinery is needed.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import (
    BallViolation,
    DimMismatch,
    EmptyList,
    InvariantViolation,
    NotHermitian,
)

BALL_TOL = 1e-12
HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)


def as_bloch(n) -> np.ndarray:
    """Validate and return a Bloch vector as a float array of shape (3,).

    Raises:
        BallViolation: if the vector lies outside the closed unit ball
            (beyond a 1e-12 slack).
    """
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise BallViolation(f"Bloch vector must have shape (3,), got {n.shape}")
    if n @ n > 1.0 + BALL_TOL:
        raise BallViolation(f"|n| = {np.linalg.norm(n):.6f} > 1")
    return n


class DensityMatrix:
    """Hermitian, PSD, unit-trace operator on a 2^k-dimensional space.

    The underlying array is validated on construction and frozen, so
    instances are safe to share between threads.
    """

    __slots__ = ("mat", "dim")

    def __init__(self, mat):
        mat = np.array(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimMismatch(f"expected a square matrix, got shape {mat.shape}")
        d = mat.shape[0]
        if np.max(np.abs(mat - mat.conj().T)) > BALL_TOL:
            raise NotHermitian("density matrix is not Hermitian within 1e-12")
        if abs(mat.trace().real - 1.0) > TRACE_TOL or abs(mat.trace().imag) > TRACE_TOL:
            raise InvariantViolation(f"trace = {mat.trace():.12g}, expected 1")
        evals = np.linalg.eigvalsh(mat)
        if evals[0] < -PSD_TOL:
            raise InvariantViolation(f"negative eigenvalue {evals[0]:.3e}: not PSD")
        mat.flags.writeable = False
        self.mat = mat
        self.dim = d

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"

    def to_json(self) -> str:
        d = self.dim
        return json.dumps(
            {
                "dim": d,
                "re": self.mat.real.reshape(d * d).tolist(),
                "im": self.mat.imag.reshape(d * d).tolist(),
            }
        )

    @classmethod
    def from_json(cls, s: str) -> "DensityMatrix":
        obj = json.loads(s)
        d = obj["dim"]
        mat = np.array(obj["re"], dtype=float).reshape(d, d) + 1j * np.array(
            obj["im"], dtype=float
        ).reshape(d, d)
        return cls(mat)


class Povm:
    """Positive operator-valued measure: PSD effects summing to identity."""

    __slots__ = ("effects",)

    def __init__(self, effects):
        effects = [np.array(e, dtype=complex) for e in effects]
        if not effects:
            raise EmptyList("POVM needs at least one effect")
        d = effects[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in effects:
            if e.shape != (d, d):
                raise DimMismatch("POVM effects must share one dimension")
            if np.max(np.abs(e - e.conj().T)) > HERM_TOL:
                raise NotHermitian("POVM effect is not Hermitian")
            if np.linalg.eigvalsh(e)[0] < -PSD_TOL:
                raise InvariantViolation("POVM effect is not PSD")
            e.flags.writeable = False
            total += e
        if np.max(np.abs(total - np.eye(d))) > TRACE_TOL:
            raise InvariantViolation("POVM effects do not sum to the identity")
        self.effects = tuple(effects)

    def __len__(self):
        return len(self.effects)


def axis_povm(m) -> Povm:
    """Two-outcome projective POVM along Bloch axis m: effects (1 ± m·σ)/2."""
    m = np.asarray(m, dtype=float)
    op = np.tensordot(m, PAULI, axes=1)
    return Povm([(IDENTITY2 + op) / 2, (IDENTITY2 - op) / 2])


def bloch_to_density(n) -> DensityMatrix:
    """Map a Bloch vector to the qubit state (1 + n·σ)/2."""
    n = as_bloch(n)
    return DensityMatrix((IDENTITY2 + np.tensordot(n, PAULI, axes=1)) / 2)


def density_to_bloch(rho: DensityMatrix) -> np.ndarray:
    """Recover the Bloch vector n_i = Tr(rho sigma_i) of a qubit state."""
    if rho.dim != 2:
        raise DimMismatch(f"expected a qubit state, got dim {rho.dim}")
    return np.array([np.trace(rho.mat @ PAULI[i]).real for i in range(3)])


def tensor(parts) -> DensityMatrix:
    """Tensor product of a nonempty list of density matrices."""
    parts = list(parts)
    if not parts:
        raise EmptyList("tensor() of an empty list")
    out = parts[0].mat
    for p in parts[1:]:
        out = np.kron(out, p.mat)
    return DensityMatrix(out)


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Trace out one qubit of a two-qubit state.

    Args:
        rho: dim-4 density matrix on A ⊗ B.
        keep: "A" keeps the first subsystem, "B" the second.
    """
    if rho.dim != 4:
        raise DimMismatch(f"partial_trace expects dim 4, got {rho.dim}")
    t = rho.mat.reshape(2, 2, 2, 2)
    if keep == "A":
        red = np.einsum("ikjk->ij", t)
    elif keep == "B":
        red = np.einsum("kikj->ij", t)
    else:
        raise DimMismatch(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityMatrix(red)


def trace_out_last(mat: np.ndarray) -> np.ndarray:
    """Trace out the last qubit of a 2^k x 2^k matrix (raw array helper)."""
    d = mat.shape[0]
    t = mat.reshape(d // 2, 2, d // 2, 2)
    return np.einsum("ikjk->ij", t)


def hermitian_eigs(h) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted descending.

    Raises:
        NotHermitian: if max|H - H†| exceeds 1e-10.
    """
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > HERM_TOL:
        raise NotHermitian("matrix is not Hermitian within 1e-10")
    return np.linalg.eigvalsh(h)[::-1]


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """H(rho) = -Tr(rho ln rho) in nats, with 0 ln 0 := 0.

    Eigenvalues below 1e-14 (including negative rounding dust down to
    -1e-10) contribute nothing.
    """
    evals = np.linalg.eigvalsh(rho.mat)
    evals = evals[evals > 1e-14]
    return float(-np.sum(evals * np.log(evals)))


def born_probabilities(rho: DensityMatrix, m: Povm) -> np.ndarray:
    """Outcome probabilities p_a = Tr(Pi_a rho) for each POVM effect."""
    if m.effects[0].shape[0] != rho.dim:
        raise DimMismatch("POVM dimension does not match the state")
    p = np.array([np.trace(e @ rho.mat).real for e in m.effects])
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > TRACE_TOL:
        raise InvariantViolation("Born probabilities are not a distribution")
    return p
