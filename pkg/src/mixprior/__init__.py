"""Inference engines for mixture priors with fixed or uncertain weights."""

from .conjugate import (
    BinomialData,
    ConjugateUpdateResult,
    beta_binomial_marginal_likelihood,
    dirichlet_marginal_mixture,
    log_beta_binomial_marginal,
    posterior_update,
)
from .distributions import (
    Beta,
    Component,
    DistributionSummary,
    Mixture,
    Normal,
    PointMass,
    Uniform,
)
from .gibbs import (
    ChainOutput,
    DirichletWeights,
    FixedWeights,
    GibbsConfig,
    LatentModelSpec,
    batch_means_mcse,
    chain_summary,
    gibbs_run,
    mcse,
    summarize_draws,
    write_chain_csv,
)
from .shrinkage import (
    Estimate,
    IndependentBeta,
    IndependentFixed,
    LatentMoments,
    MarginalCheckResult,
    SharedBeta,
    ShrinkageSimulation,
    ShrinkageSpec,
    SumDistribution,
    ThetaMoments,
    ks_distance,
    latent_moments,
    latent_sum_pmf,
    marginal_extension_check,
    model_probabilities,
    pattern_bits,
    simulate_shrinkage,
    theta_moments,
    to_independent_fixed,
)

__version__ = "0.1.0"

__all__ = [
    "Beta",
    "BinomialData",
    "ChainOutput",
    "Component",
    "ConjugateUpdateResult",
    "DirichletWeights",
    "DistributionSummary",
    "Estimate",
    "FixedWeights",
    "GibbsConfig",
    "IndependentBeta",
    "IndependentFixed",
    "LatentModelSpec",
    "LatentMoments",
    "MarginalCheckResult",
    "Mixture",
    "Normal",
    "PointMass",
    "SharedBeta",
    "ShrinkageSimulation",
    "ShrinkageSpec",
    "SumDistribution",
    "ThetaMoments",
    "Uniform",
    "batch_means_mcse",
    "beta_binomial_marginal_likelihood",
    "chain_summary",
    "dirichlet_marginal_mixture",
    "gibbs_run",
    "ks_distance",
    "latent_moments",
    "latent_sum_pmf",
    "log_beta_binomial_marginal",
    "marginal_extension_check",
    "mcse",
    "model_probabilities",
    "pattern_bits",
    "posterior_update",
    "simulate_shrinkage",
    "summarize_draws",
    "theta_moments",
    "to_independent_fixed",
    "write_chain_csv",
    "__version__",
]
