"""Gibbs sampler for the latent-allocation form of a beta-mixture prior.

The sampled model keeps one beta node per mixture component plus a
categorical allocation variable selecting which component feeds the
binomial likelihood:

    theta_i ~ Beta(alpha_i, beta_i)        i = 1..k
    Z       ~ Categorical(pi)
    r       ~ Binomial(n, theta_Z)

with ``pi`` either a fixed simplex or Dirichlet-distributed.  Each sweep
refreshes every node from its full conditional:

  (a) theta_i | Z:   Beta(alpha_i + r, beta_i + n - r) for the selected
      component, the untouched prior for the others;
  (b) Z | theta, pi: categorical with probabilities proportional to
      pi_i * theta_i^r * (1 - theta_i)^(n - r);
  (c) pi | Z:        Dirichlet(a + e_Z) when the weights are uncertain.

The monitored response-rate draw is theta_Z, the selected component's
value, and allocations are reported on the 1..k scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .conjugate import BinomialData
from .distributions import Beta, DistributionSummary

__all__ = [
    "ChainOutput",
    "DirichletWeights",
    "FixedWeights",
    "GibbsConfig",
    "LatentModelSpec",
    "batch_means_mcse",
    "chain_summary",
    "gibbs_run",
    "mcse",
    "summarize_draws",
    "write_chain_csv",
]

_MIN_SUMMARY_DRAWS = 1000


@dataclass(frozen=True)
class FixedWeights:
    """Known mixture weights on the probability simplex."""

    weights: tuple[float, ...]

    def __post_init__(self):
        wts = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", wts)
        if any(not 0.0 <= w <= 1.0 for w in wts):
            raise ValueError(f"weights must lie in [0, 1], got {wts}")
        if abs(math.fsum(wts) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {math.fsum(wts):.17g}, not 1")

    @property
    def dimension(self) -> int:
        return len(self.weights)

    def mean_weights(self) -> tuple[float, ...]:
        return self.weights


@dataclass(frozen=True)
class DirichletWeights:
    """Uncertain mixture weights with a Dirichlet prior."""

    concentration: tuple[float, ...]

    def __post_init__(self):
        conc = tuple(float(a) for a in self.concentration)
        object.__setattr__(self, "concentration", conc)
        if any(a <= 0.0 for a in conc):
            raise ValueError(f"concentration parameters must be positive, got {conc}")

    @property
    def dimension(self) -> int:
        return len(self.concentration)

    def mean_weights(self) -> tuple[float, ...]:
        total = math.fsum(self.concentration)
        return tuple(a / total for a in self.concentration)


WeightPrior = FixedWeights | DirichletWeights


@dataclass(frozen=True)
class LatentModelSpec:
    """All-beta mixture components, a weight prior and the binomial data."""

    components: tuple[Beta, ...]
    weight_prior: WeightPrior
    data: BinomialData

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        for c in comps:
            if not isinstance(c, Beta):
                raise ValueError(
                    f"latent model requires beta components, got {type(c).__name__}"
                )
        k = len(comps)
        if k < 2:
            raise ValueError(f"latent model needs at least 2 components, got {k}")
        if self.weight_prior.dimension != k:
            raise ValueError(
                f"{k} components but weight prior of dimension {self.weight_prior.dimension}"
            )

    @property
    def k(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class GibbsConfig:
    """Sweep counts and the seed; defaults match the long reference runs."""

    burn_in: int = 50_000
    iterations: int = 500_000
    thin: int = 1
    seed: int = 1

    def __post_init__(self):
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be nonnegative, got {self.burn_in}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if self.thin < 1:
            raise ValueError(f"thin must be >= 1, got {self.thin}")
        if self.iterations < _MIN_SUMMARY_DRAWS:
            warnings.warn(
                f"{self.iterations} iterations is too few for reliable summaries "
                f"(want >= {_MIN_SUMMARY_DRAWS})",
                stacklevel=2,
            )


@dataclass(frozen=True, eq=False)
class ChainOutput:
    """Retained draws plus per-quantity summaries.

    ``theta`` holds the selected component's value per sweep, ``z`` the
    1-based allocation, and ``pi`` the weight draws (only when the
    weight prior is Dirichlet).
    """

    theta: np.ndarray
    z: np.ndarray
    pi: np.ndarray | None
    summaries: dict[str, DistributionSummary]
    z_mean: float
    config: GibbsConfig = field(repr=False)

    @property
    def n_draws(self) -> int:
        return len(self.theta)

    @property
    def k(self) -> int:
        return int(self.z.max()) if self.pi is None else self.pi.shape[1]


def summarize_draws(x: np.ndarray) -> DistributionSummary:
    """Empirical summary: mean/sd plus order-statistic quantiles."""
    x = np.asarray(x, dtype=float)
    sd = float(x.std(ddof=1)) if len(x) > 1 else 0.0
    q = np.quantile(x, [0.025, 0.5, 0.975])
    return DistributionSummary(float(x.mean()), sd, float(q[0]), float(q[1]), float(q[2]))


def gibbs_run(spec: LatentModelSpec, cfg: GibbsConfig) -> ChainOutput:
    """Run the systematic-scan Gibbs sampler; deterministic given the seed."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    k = spec.k
    r = spec.data.responders
    miss = spec.data.patients - r
    prior_ab = [(c.alpha, c.beta) for c in spec.components]
    post_ab = [(a + r, b + miss) for a, b in prior_ab]

    uncertain = isinstance(spec.weight_prior, DirichletWeights)
    conc = list(spec.weight_prior.concentration) if uncertain else None

    n_keep = cfg.iterations // cfg.thin
    if n_keep < 1:
        raise ValueError("thinning retains no draws; reduce thin or add iterations")
    theta_out = np.empty(n_keep)
    z_out = np.empty(n_keep, dtype=np.int64)
    pi_out = np.empty((n_keep, k)) if uncertain else None

    # initial state from the prior
    if uncertain:
        pi = list(rng.dirichlet(conc))
    else:
        pi = list(spec.weight_prior.weights)
    u0 = rng.random()
    z = k - 1
    acc = 0.0
    for i in range(k):
        acc += pi[i]
        if u0 < acc:
            z = i
            break

    theta = [0.0] * k
    total_sweeps = cfg.burn_in + cfg.iterations
    kept = 0
    for t in range(total_sweeps):
        for i in range(k):
            a, b = post_ab[i] if i == z else prior_ab[i]
            theta[i] = rng.beta(a, b)
        z = _draw_allocation(rng, pi, theta, r, miss)
        if uncertain:
            g = [rng.gamma(conc[i] + (1.0 if i == z else 0.0)) for i in range(k)]
            g_total = math.fsum(g)
            pi = [gi / g_total for gi in g]
        j = t - cfg.burn_in
        if j >= 0 and (j + 1) % cfg.thin == 0:
            theta_out[kept] = theta[z]
            z_out[kept] = z + 1
            if uncertain:
                pi_out[kept] = pi
            kept += 1

    summaries = {
        "theta": summarize_draws(theta_out),
        "z": summarize_draws(z_out.astype(float)),
    }
    if uncertain:
        for i in range(k):
            summaries[f"pi{i + 1}"] = summarize_draws(pi_out[:, i])
    return ChainOutput(
        theta=theta_out,
        z=z_out,
        pi=pi_out,
        summaries=summaries,
        z_mean=float(z_out.mean()),
        config=cfg,
    )


def _draw_allocation(rng, pi, theta, r, miss) -> int:
    """Categorical draw with probabilities ~ pi_i * th_i^r * (1-th_i)^miss."""
    k = len(pi)
    cum = [0.0] * k
    acc = 0.0
    for i in range(k):
        th = theta[i]
        acc += pi[i] * th**r * (1.0 - th) ** miss
        cum[i] = acc
    if acc <= 0.0:
        # extreme underflow: redo the weights in log space
        logw = [
            (math.log(pi[i]) + r * math.log(theta[i]) + miss * math.log1p(-theta[i]))
            if pi[i] > 0.0
            else -math.inf
            for i in range(k)
        ]
        top = max(logw)
        acc = 0.0
        for i in range(k):
            acc += math.exp(logw[i] - top)
            cum[i] = acc
    u = rng.random() * acc
    for i in range(k):
        if u < cum[i]:
            return i
    return k - 1


def chain_summary(chain: ChainOutput) -> list[tuple[str, DistributionSummary]]:
    """Summary rows (mean, sd, 2.5%, median, 97.5%) per monitored quantity."""
    if chain.n_draws < _MIN_SUMMARY_DRAWS:
        raise ValueError(
            f"need >= {_MIN_SUMMARY_DRAWS} retained draws for a summary, "
            f"have {chain.n_draws}"
        )
    order = ["theta", "z"] + sorted(
        (key for key in chain.summaries if key.startswith("pi")),
        key=lambda s: int(s[2:]),
    )
    return [(key, chain.summaries[key]) for key in order]


def batch_means_mcse(draws: np.ndarray) -> float:
    """Monte Carlo standard error of the mean via batch means.

    Uses ~sqrt(n) batches of ~sqrt(n) consecutive draws, so the batch
    size grows with the chain and absorbs autocorrelation.
    """
    x = np.asarray(draws, dtype=float)
    n = len(x)
    if n < 4:
        raise ValueError(f"need at least 4 draws for a batch-means MCSE, got {n}")
    b = int(math.isqrt(n))
    a = n // b
    means = x[: a * b].reshape(a, b).mean(axis=1)
    spread = float(means.std(ddof=1))
    return spread / math.sqrt(a)


def _chain_quantity(chain: ChainOutput, quantity: str) -> np.ndarray:
    if quantity == "theta":
        return chain.theta
    if quantity == "z":
        return chain.z.astype(float)
    if quantity.startswith("pi"):
        if chain.pi is None:
            raise ValueError("chain has no weight draws (fixed-weight run)")
        idx = int(quantity[2:]) - 1
        if not 0 <= idx < chain.pi.shape[1]:
            raise ValueError(f"no such weight coordinate: {quantity}")
        return chain.pi[:, idx]
    raise ValueError(f"unknown monitored quantity: {quantity!r}")


def mcse(chain: ChainOutput, quantity: str = "theta") -> float:
    """Batch-means MCSE of a monitored quantity's mean."""
    if chain.n_draws < _MIN_SUMMARY_DRAWS:
        raise ValueError(
            f"need >= {_MIN_SUMMARY_DRAWS} retained draws for an MCSE, "
            f"have {chain.n_draws}"
        )
    return batch_means_mcse(_chain_quantity(chain, quantity))


def write_chain_csv(chain: ChainOutput, path) -> None:
    """Dump retained draws, one line per draw: iter,theta,z[,pi_1..pi_k]."""
    thin = chain.config.thin
    with open(path, "w", encoding="utf-8") as fh:
        header = "iter,theta,z"
        if chain.pi is not None:
            header += "".join(f",pi_{i + 1}" for i in range(chain.pi.shape[1]))
        fh.write(header + "\n")
        for j in range(chain.n_draws):
            line = f"{(j + 1) * thin},{float(chain.theta[j])!r},{int(chain.z[j])}"
            if chain.pi is not None:
                line += "".join(f",{float(v)!r}" for v in chain.pi[j])
            fh.write(line + "\n")
