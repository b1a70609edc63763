"""Exact posterior updating of beta-mixture priors against binomial data.

Updating a beta mixture with a binomial count is closed form: each
component updates conjugately, and the mixture weights are reweighted by
each component's prior predictive probability of the observed data (the
beta-binomial marginal likelihood).  All likelihood arithmetic runs in
log space so small predictive probabilities never underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betaln, logsumexp

from .distributions import Beta, Mixture

__all__ = [
    "BinomialData",
    "ConjugateUpdateResult",
    "beta_binomial_marginal_likelihood",
    "dirichlet_marginal_mixture",
    "log_beta_binomial_marginal",
    "posterior_update",
]


@dataclass(frozen=True)
class BinomialData:
    """An observed binomial count: ``responders`` out of ``patients``."""

    responders: int
    patients: int

    def __post_init__(self):
        if self.patients < 1:
            raise ValueError(f"patients must be positive, got {self.patients}")
        if not 0 <= self.responders <= self.patients:
            raise ValueError(
                f"r exceeds n ({self.responders} > {self.patients})"
                if self.responders > self.patients
                else f"responders must be nonnegative, got {self.responders}"
            )


@dataclass(frozen=True)
class ConjugateUpdateResult:
    """Posterior mixture together with the weight bookkeeping behind it."""

    posterior: Mixture
    prior_weights: tuple[float, ...]
    marginal_likelihoods: tuple[float, ...]
    posterior_weights: tuple[float, ...]


def log_beta_binomial_marginal(prior: Beta, data: BinomialData) -> float:
    """Log prior-predictive probability of the data under a beta prior.

    log C(n, r) + log B(alpha + r, beta + n - r) - log B(alpha, beta)
    """
    r, n = data.responders, data.patients
    log_choose = (
        math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)
    )
    return float(
        log_choose
        + betaln(prior.alpha + r, prior.beta + (n - r))
        - betaln(prior.alpha, prior.beta)
    )


def beta_binomial_marginal_likelihood(prior: Beta, data: BinomialData) -> float:
    """Prior-predictive (beta-binomial) probability of the observed count."""
    return math.exp(log_beta_binomial_marginal(prior, data))


def _require_all_beta(mixture: Mixture) -> None:
    for c in mixture.components:
        if not isinstance(c, Beta):
            raise ValueError(
                f"conjugate updating requires all-beta components, got {type(c).__name__}"
            )


def posterior_update(prior: Mixture, data: BinomialData) -> ConjugateUpdateResult:
    """Update a beta mixture with a binomial observation.

    The posterior is again a beta mixture: component i becomes
    Beta(alpha_i + r, beta_i + n - r), and its weight is proportional to
    the prior weight times the component's marginal likelihood of the
    data.  The updating is dynamic even though the prior weights are
    fixed numbers: components that predicted the data better gain
    weight.
    """
    _require_all_beta(prior)
    r, n = data.responders, data.patients
    log_ml = [log_beta_binomial_marginal(c, data) for c in prior.components]
    log_w = [
        (math.log(p) + lm) if p > 0.0 else -math.inf
        for p, lm in zip(prior.weights, log_ml)
    ]
    log_total = float(logsumexp(log_w))
    if not math.isfinite(log_total):
        raise ValueError("all mixture weights vanished: cannot normalize posterior")
    post_weights = tuple(math.exp(lw - log_total) for lw in log_w)
    post_components = tuple(
        Beta(c.alpha + r, c.beta + (n - r)) for c in prior.components
    )
    return ConjugateUpdateResult(
        posterior=Mixture(post_components, post_weights),
        prior_weights=prior.weights,
        marginal_likelihoods=tuple(math.exp(lm) for lm in log_ml),
        posterior_weights=post_weights,
    )


def dirichlet_marginal_mixture(components, concentration) -> Mixture:
    """Fixed-weight mixture equivalent to Dirichlet-uncertain weights.

    Marginalizing a Dirichlet(a_1, ..., a_k) weight prior out of the
    joint prior leaves the fixed-weight mixture with p_i = a_i / sum(a):
    inference about the model parameter depends on the weight prior only
    through its mean.
    """
    components = tuple(components)
    concentration = tuple(float(a) for a in concentration)
    if len(components) != len(concentration):
        raise ValueError(
            f"{len(components)} components but {len(concentration)} concentration parameters"
        )
    if any(a <= 0.0 for a in concentration):
        raise ValueError(f"concentration parameters must be positive, got {concentration}")
    total = math.fsum(concentration)
    return Mixture(components, tuple(a / total for a in concentration))
