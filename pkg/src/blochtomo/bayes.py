"""Simulated projective tomography and Bayesian particle updating.

Measurements are two-outcome projective POVMs along Bloch axes on single
copies; a record batches identical settings into (axis, shots, plus)
counts, which factorizes the multinomial likelihood exactly.  Updating
works in the log domain with max-shift normalization and triggers
systematic resampling when the effective sample size drops below half
the particle count.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import as_bloch
from .definetti import DensityMatrix, moments, rhoN
from .discord import as_axis, geometric_discord_closed
from .errors import ZeroEvidence
from .priors import ParticleEnsemble

LOG_ZERO = -np.inf  # distinguished value for impossible observations
ESS_THRESHOLD_FRACTION = 0.5


@dataclass(frozen=True)
class Setting:
    """One batched measurement setting: `shots` projective trials along `axis`."""

    axis: np.ndarray
    shots: int
    plus: int

    def __post_init__(self):
        object.__setattr__(self, "axis", as_axis(self.axis))
        if self.shots < 0 or not 0 <= self.plus <= self.shots:
            raise ValueError(f"invalid counts: plus={self.plus}, shots={self.shots}")


@dataclass(frozen=True)
class MeasurementRecord:
    """Ordered list of batched settings; total M is the number of copies used."""

    settings: List[Setting] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(s.shots for s in self.settings)

    def concat(self, other: "MeasurementRecord") -> "MeasurementRecord":
        return MeasurementRecord(list(self.settings) + list(other.settings))

    def to_json(self) -> str:
        return json.dumps(
            {
                "settings": [
                    {"axis": s.axis.tolist(), "shots": s.shots, "plus": s.plus}
                    for s in self.settings
                ]
            }
        )

    @classmethod
    def from_json(cls, s: str) -> "MeasurementRecord":
        obj = json.loads(s)
        return cls(
            [
                Setting(np.array(d["axis"]), d["shots"], d["plus"])
                for d in obj["settings"]
            ]
        )


@dataclass(frozen=True)
class UpdateResult:
    posterior: ParticleEnsemble
    log_evidence: float
    ess: float
    resampled: bool


@dataclass(frozen=True)
class TomographyRun:
    """Full provenance of one simulated tomography experiment."""

    true_state: np.ndarray
    prior: ParticleEnsemble
    record: MeasurementRecord
    posterior: ParticleEnsemble
    ensemble_size: int
    trajectory: List[dict] = field(default_factory=list)


def simulate(true_n, settings, shots_per_setting: int, seed: int) -> MeasurementRecord:
    """Draw binomial outcome counts for each axis from the Born rule.

    p_plus = (1 + true_n . m) / 2 per setting; the draws consume one
    PCG64 stream seeded with `seed`, in setting order.
    """
    true_n = as_bloch(true_n)
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for axis in settings:
        m = as_axis(axis)
        p_plus = float(np.clip((1.0 + true_n @ m) / 2.0, 0.0, 1.0))
        plus = int(rng.binomial(shots_per_setting, p_plus)) if shots_per_setting else 0
        out.append(Setting(m, shots_per_setting, plus))
    return MeasurementRecord(out)


def log_likelihood(record: MeasurementRecord, n) -> np.ndarray:
    """Log multinomial likelihood of the record at Bloch vector(s) n.

    Accepts a single (3,) vector or a (P, 3) batch; returns a scalar or
    a (P,) array.  Observed outcomes with probability <= 0 contribute
    -inf.  The multinomial coefficient is omitted (constant across n).
    """
    arr = np.atleast_2d(np.asarray(n, dtype=float))
    single = np.asarray(n).ndim == 1
    ll = np.zeros(arr.shape[0])
    for s in record.settings:
        p_plus = np.clip((1.0 + arr @ s.axis) / 2.0, 0.0, 1.0)
        p_minus = 1.0 - p_plus
        for count, p in ((s.plus, p_plus), (s.shots - s.plus, p_minus)):
            if count == 0:
                continue
            with np.errstate(divide="ignore"):
                ll += np.where(p > 0.0, count * np.log(np.where(p > 0.0, p, 1.0)), LOG_ZERO)
    return float(ll[0]) if single else ll


def effective_sample_size(weights: np.ndarray) -> float:
    """ESS = 1 / sum(w^2) for normalized weights."""
    return float(1.0 / np.sum(weights ** 2))


def systematic_resample(e: ParticleEnsemble, seed: int) -> ParticleEnsemble:
    """Systematic (stratified single-uniform) resampling to equal weights."""
    count = len(e)
    rng = np.random.Generator(np.random.PCG64(seed))
    positions = (rng.random() + np.arange(count)) / count
    cum = np.cumsum(e.weights)
    cum[-1] = 1.0
    idx = np.searchsorted(cum, positions, side="left")
    return ParticleEnsemble(
        e.vectors[idx], np.full(count, 1.0 / count), seed=e.seed
    )


def _derived_seed(*parts) -> int:
    return int(np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts]).generate_state(1)[0])


def update(
    prior: ParticleEnsemble,
    record: MeasurementRecord,
    resample: bool = True,
    resample_seed: Optional[int] = None,
) -> UpdateResult:
    """Bayes update of the ensemble on a measurement record.

    Posterior weights are prior weights times the likelihood, normalized
    in the log domain; the log normalizer is the log evidence.  When
    `resample` is on and the ESS falls below half the particle count,
    the posterior is systematically resampled with a deterministic
    sub-seed derived from the prior seed and the record size (unless
    `resample_seed` is given).

    Raises:
        ZeroEvidence: if every particle has likelihood zero.
    """
    ll = log_likelihood(record, prior.vectors)
    with np.errstate(divide="ignore"):
        logw = np.where(prior.weights > 0, np.log(np.where(prior.weights > 0, prior.weights, 1.0)), LOG_ZERO) + ll
    shift = np.max(logw)
    if not np.isfinite(shift):
        raise ZeroEvidence("data has zero probability under the prior support")
    w = np.exp(logw - shift)
    total = w.sum()
    log_evidence = float(shift + np.log(total))
    weights = w / total
    posterior = ParticleEnsemble(prior.vectors, weights, seed=prior.seed)
    ess = effective_sample_size(weights)
    resampled = False
    if resample and ess < ESS_THRESHOLD_FRACTION * len(prior):
        if resample_seed is None:
            resample_seed = _derived_seed(prior.seed or 0, record.total, 0x5E5)
        posterior = systematic_resample(posterior, resample_seed)
        resampled = True
    return UpdateResult(posterior, log_evidence, ess, resampled)


def posterior_state(posterior: ParticleEnsemble, copies: int) -> DensityMatrix:
    """State assigned to `copies` unmeasured systems: rhoN of the posterior."""
    return rhoN(posterior, copies)


def run_tomography(
    prior: ParticleEnsemble,
    true_n,
    axis_schedule,
    shots_per_step: int,
    steps: int,
    seed: int,
) -> TomographyRun:
    """Sequential tomography with a per-step geometric-discord readout.

    Step s measures axis_schedule[(s-1) % len] with `shots_per_step`
    shots, updates the ensemble, and records the moments and the
    closed-form geometric discord of the posterior two-copy state.  Row
    0 holds the prior.  All randomness derives from `seed` via fixed
    per-step sub-seeds.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    axes = [as_axis(a) for a in axis_schedule]
    rows = []
    current = prior

    def row(step, m_total, log_ev, ess, ens):
        mom = moments(ens)
        return {
            "step": step,
            "M": m_total,
            "log_evidence": log_ev,
            "ess": ess,
            "x": mom.x,
            "geom_discord": geometric_discord_closed(mom),
        }

    rows.append(row(0, 0, 0.0, effective_sample_size(current.weights), current))
    m_total = 0
    full_record = MeasurementRecord([])
    for step in range(1, steps + 1):
        axis = axes[(step - 1) % len(axes)]
        record = simulate(true_n, [axis], shots_per_step, _derived_seed(seed, step, 0))
        result = update(
            current, record, resample_seed=_derived_seed(seed, step, 1)
        )
        current = result.posterior
        full_record = full_record.concat(record)
        m_total += record.total
        rows.append(row(step, m_total, result.log_evidence, result.ess, current))
    return TomographyRun(
        true_state=as_bloch(true_n),
        prior=prior,
        record=full_record,
        posterior=current,
        ensemble_size=len(prior),
        trajectory=rows,
    )


def discord_trajectory(
    prior: ParticleEnsemble,
    true_n,
    axis_schedule,
    shots_per_step: int,
    steps: int,
    seed: int,
) -> List[dict]:
    """Trajectory rows only; see run_tomography for the full provenance."""
    return run_tomography(
        prior, true_n, axis_schedule, shots_per_step, steps, seed
    ).trajectory


def trajectory_csv(rows) -> str:
    """CSV rendering: step,M,log_evidence,ess,x1,x2,x3,geom_discord."""
    buf = io.StringIO()
    buf.write("step,M,log_evidence,ess,x1,x2,x3,geom_discord\n")
    for r in rows:
        x = r["x"]
        buf.write(
            f"{r['step']},{r['M']},{r['log_evidence']:.17g},{r['ess']:.17g},"
            f"{x[0]:.17g},{x[1]:.17g},{x[2]:.17g},{r['geom_discord']:.17g}\n"
        )
    return buf.getvalue()
