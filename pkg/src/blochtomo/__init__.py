"""Bloch-ball priors, de Finetti two-copy states, quantum discord, and
simulated Bayesian qubit tomography."""

from .core import (
    DensityMatrix,
    Povm,
    as_bloch,
    axis_povm,
    bloch_to_density,
    born_probabilities,
    density_to_bloch,
    hermitian_eigs,
    partial_trace,
    tensor,
    von_neumann_entropy,
)
from .priors import (
    ParticleEnsemble,
    line_prior,
    point_mass,
    reweight,
    uniform_ball,
    uniform_sphere,
)
from .definetti import (
    CorrelationMatrix,
    MomentSummary,
    correlation_matrix,
    moments,
    rank_test,
    rho1,
    rho2,
    rhoN,
)
from .discord import (
    DiscordReport,
    conditional_state,
    discord_report,
    entropic_discord,
    geometric_discord_closed,
    geometric_discord_variational,
    zero_discord_residual,
)
from .bayes import (
    MeasurementRecord,
    Setting,
    TomographyRun,
    UpdateResult,
    discord_trajectory,
    log_likelihood,
    posterior_state,
    simulate,
    update,
)

__version__ = "0.1.0"
