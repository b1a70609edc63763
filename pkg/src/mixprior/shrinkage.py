"""Analytic and simulation results for many two-component mixture priors.

For m parameters that each follow the same two-component mixture, the
joint prior is pinned down by how the per-parameter inclusion
indicators are tied together:

* ``IndependentFixed``  - indicator j is Bernoulli(p_j), independent;
* ``IndependentBeta``   - indicator j is Bernoulli(pi_j) with its own
  Beta(a_j, b_j) weight; marginally identical to ``IndependentFixed``
  with p_j = a_j / (a_j + b_j), so the extra layer changes nothing;
* ``SharedBeta``        - one weight pi ~ Beta(a, b) shared by all
  indicators, which makes them positively correlated a priori and
  shrinks the parameters toward a common component.

This module provides closed-form moments for the indicators and the
parameters, the distribution of the indicator sum, probabilities of all
2^m inclusion patterns, and a chunked Monte Carlo simulator whose
standard errors calibrate every analytic claim.  It also hosts the
normal/inverse-gamma marginalization check (the marginal is Student-t,
not normal - the one case in this package where adding a hyperprior
layer really changes the prior).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln
from scipy.stats import t as student_t

from .distributions import Component

__all__ = [
    "Estimate",
    "IndependentBeta",
    "IndependentFixed",
    "LatentMoments",
    "MarginalCheckResult",
    "SharedBeta",
    "ShrinkageSimulation",
    "ShrinkageSpec",
    "SumDistribution",
    "ThetaMoments",
    "ks_distance",
    "latent_moments",
    "latent_sum_pmf",
    "marginal_extension_check",
    "model_probabilities",
    "pattern_bits",
    "sample_normal_scale_mixture",
    "simulate_shrinkage",
    "theta_moments",
    "to_independent_fixed",
]

MAX_PATTERN_PARAMETERS = 20
MIN_SIMULATION_DRAWS = 10_000


@dataclass(frozen=True)
class IndependentFixed:
    """Independent indicators with fixed inclusion probabilities."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) == 0:
            raise ValueError("need at least one inclusion probability")
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError(f"inclusion probabilities must lie in [0, 1], got {probs}")


@dataclass(frozen=True)
class IndependentBeta:
    """Independent indicators, each with its own beta-distributed weight."""

    concentrations: tuple[tuple[float, float], ...]

    def __post_init__(self):
        conc = tuple((float(a), float(b)) for a, b in self.concentrations)
        object.__setattr__(self, "concentrations", conc)
        if len(conc) == 0:
            raise ValueError("need at least one (a, b) pair")
        if any(a <= 0.0 or b <= 0.0 for a, b in conc):
            raise ValueError(f"beta concentrations must be positive, got {conc}")


@dataclass(frozen=True)
class SharedBeta:
    """One Beta(a, b) weight shared by every indicator."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise ValueError(f"beta concentrations must be positive, got ({self.a}, {self.b})")


WeightModel = IndependentFixed | IndependentBeta | SharedBeta


@dataclass(frozen=True)
class ShrinkageSpec:
    """m parameters sharing a two-component mixture prior.

    ``components`` holds the (first, second) component pair; it may be
    omitted for indicator-only analyses (sum distributions, pattern
    probabilities), in which case the parameter-moment operations raise.
    """

    m: int
    weight_model: WeightModel
    components: tuple[Component, Component] | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        wm = self.weight_model
        if isinstance(wm, IndependentFixed) and len(wm.probs) != self.m:
            raise ValueError(
                f"m={self.m} but {len(wm.probs)} inclusion probabilities"
            )
        if isinstance(wm, IndependentBeta) and len(wm.concentrations) != self.m:
            raise ValueError(
                f"m={self.m} but {len(wm.concentrations)} (a, b) pairs"
            )
        if self.components is not None:
            comps = tuple(self.components)
            object.__setattr__(self, "components", comps)
            if len(comps) != 2:
                raise ValueError(f"component pair required, got {len(comps)} components")
            for c in comps:
                if not isinstance(c, Component):
                    raise TypeError(f"not a component distribution: {c!r}")


@dataclass(frozen=True)
class LatentMoments:
    """Marginal and pairwise moments of the inclusion indicators.

    Cross-sectional fields describe the pair (Z_1, Z_2) and are None for
    m = 1.  ``conditional_given_0``/``_given_1`` are P(Z_1 = 1 | Z_2 = z).
    """

    mean_z: float
    var_z: float
    cov_z: float | None
    cor_z: float | None
    conditional_given_0: float | None
    conditional_given_1: float | None


@dataclass(frozen=True)
class ThetaMoments:
    """Marginal and pairwise moments of the mixture-distributed parameters."""

    mean_theta: float
    var_theta: float
    cov_theta: float | None
    cor_theta: float | None


@dataclass(frozen=True)
class SumDistribution:
    """Distribution of the indicator sum over {0..m}, with its family name."""

    family: str  # "binomial" | "beta-binomial" | "poisson-binomial"
    probs: tuple[float, ...]


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    se: float


@dataclass(frozen=True, eq=False)
class ShrinkageSimulation:
    """Empirical counterpart of the analytic moments, with standard errors."""

    n_draws: int
    latent: dict[str, Estimate]
    theta: dict[str, Estimate] | None
    sum_counts: tuple[int, ...]
    sum_pmf: tuple[float, ...]


@dataclass(frozen=True)
class MarginalCheckResult:
    """KS distance between simulated marginal draws and the Student-t CDF."""

    ks_distance: float
    df: float
    location: float
    scale: float
    n_draws: int


def to_independent_fixed(model: IndependentBeta) -> IndependentFixed:
    """Collapse per-parameter beta weights to their means.

    Independent indicators are marginally Bernoulli(a_j / (a_j + b_j)),
    so the per-parameter hyperprior layer is equivalent to fixed
    inclusion probabilities at those means.
    """
    return IndependentFixed(tuple(a / (a + b) for a, b in model.concentrations))


def _as_fixed(model: WeightModel) -> WeightModel:
    if isinstance(model, IndependentBeta):
        return to_independent_fixed(model)
    return model


def latent_moments(spec: ShrinkageSpec) -> LatentMoments:
    """Closed-form indicator moments.

    Shared weight: each indicator is Bernoulli(a/(a+b)) marginally, the
    pairwise covariance equals Var(pi), the correlation is 1/(a+b+1)
    and P(Z_1=1 | Z_2=z) = (a+z)/(a+b+1).  Independent models have zero
    cross moments and conditional equal to marginal.
    """
    model = _as_fixed(spec.weight_model)
    pair = spec.m >= 2
    if isinstance(model, SharedBeta):
        a, b = model.a, model.b
        mean = a / (a + b)
        var = mean * (1.0 - mean)
        if not pair:
            return LatentMoments(mean, var, None, None, None, None)
        return LatentMoments(
            mean_z=mean,
            var_z=var,
            cov_z=var / (a + b + 1.0),
            cor_z=1.0 / (a + b + 1.0),
            conditional_given_0=a / (a + b + 1.0),
            conditional_given_1=(a + 1.0) / (a + b + 1.0),
        )
    p = model.probs[0]
    var = p * (1.0 - p)
    if not pair:
        return LatentMoments(p, var, None, None, None, None)
    return LatentMoments(p, var, 0.0, 0.0, model.probs[0], model.probs[0])


def _log_choose(n: int, k_: int) -> float:
    return gammaln(n + 1) - gammaln(k_ + 1) - gammaln(n - k_ + 1)


def latent_sum_pmf(spec: ShrinkageSpec) -> SumDistribution:
    """Distribution of the number of first-component indicators.

    Binomial under equal fixed probabilities, beta-binomial under the
    shared weight, and - as an extension for unequal fixed
    probabilities - Poisson-binomial via iterative convolution, flagged
    by the ``family`` field.
    """
    model = _as_fixed(spec.weight_model)
    m = spec.m
    s = np.arange(m + 1)
    if isinstance(model, SharedBeta):
        a, b = model.a, model.b
        logp = _log_choose(m, s) + betaln(a + s, b + (m - s)) - betaln(a, b)
        return SumDistribution("beta-binomial", tuple(float(p) for p in np.exp(logp)))
    probs = model.probs
    if len(set(probs)) == 1:
        p = probs[0]
        if p == 0.0:
            pmf = np.zeros(m + 1)
            pmf[0] = 1.0
        elif p == 1.0:
            pmf = np.zeros(m + 1)
            pmf[m] = 1.0
        else:
            logp = _log_choose(m, s) + s * math.log(p) + (m - s) * math.log1p(-p)
            pmf = np.exp(logp)
        return SumDistribution("binomial", tuple(float(v) for v in pmf))
    pmf = np.array([1.0])
    for p in probs:
        shifted = np.concatenate([[0.0], pmf * p])
        pmf = np.concatenate([pmf * (1.0 - p), [0.0]]) + shifted
    return SumDistribution("poisson-binomial", tuple(float(v) for v in pmf))


def pattern_bits(index: int, m: int) -> str:
    """Inclusion pattern as a bit string; character j is indicator j+1."""
    return "".join("1" if index >> j & 1 else "0" for j in range(m))


def model_probabilities(spec: ShrinkageSpec) -> np.ndarray:
    """Probability of each of the 2^m inclusion patterns.

    Entry i corresponds to the pattern whose j-th bit (value ``1 << j``)
    selects the first component for parameter j+1.  Shared-weight
    patterns depend only on their number of ones; independent models
    give products of marginals.  Enumeration refuses m > 20.
    """
    if spec.m > MAX_PATTERN_PARAMETERS:
        raise ValueError(
            f"m={spec.m} enumerates 2^{spec.m} patterns; limit is m <= {MAX_PATTERN_PARAMETERS}"
        )
    model = _as_fixed(spec.weight_model)
    m = spec.m
    if isinstance(model, SharedBeta):
        a, b = model.a, model.b
        ones = np.zeros(1)
        for _ in range(m):
            ones = np.concatenate([ones, ones + 1.0])
        return np.exp(betaln(a + ones, b + (m - ones)) - betaln(a, b))
    probs = np.ones(1)
    for p in model.probs:
        probs = np.concatenate([probs * (1.0 - p), probs * p])
    return probs


def theta_moments(spec: ShrinkageSpec) -> ThetaMoments:
    """Closed-form parameter moments from the component pair.

    With component means/variances (mu1, s1) and (mu2, s2) and w = E(pi):

        E(theta)   = w mu1 + (1-w) mu2
        Var(theta) = w s1 + (1-w) s2 + (mu1-mu2)^2 w (1-w)
        Cov(theta_j, theta_k) = (mu1-mu2)^2 Var(pi)

    so cross-parameter correlation needs both a shared uncertain weight
    and unequal component means.
    """
    if spec.components is None:
        raise ValueError("parameter moments need the component pair")
    model = _as_fixed(spec.weight_model)
    if isinstance(model, SharedBeta):
        a, b = model.a, model.b
        w = a / (a + b)
        var_pi = w * (1.0 - w) / (a + b + 1.0)
    else:
        w = model.probs[0]
        var_pi = 0.0
    mu1, s1 = spec.components[0].moments()
    mu2, s2 = spec.components[1].moments()
    gap = mu1 - mu2
    mean = w * mu1 + (1.0 - w) * mu2
    var = w * s1 + (1.0 - w) * s2 + gap * gap * w * (1.0 - w)
    if spec.m < 2:
        return ThetaMoments(mean, var, None, None)
    cov = gap * gap * var_pi
    cor = cov / var if var > 0.0 else None
    return ThetaMoments(mean, var, cov, cor)


def _draw_indicators(rng: np.random.Generator, model: WeightModel, size: int, m: int):
    if isinstance(model, SharedBeta):
        pi = rng.beta(model.a, model.b, size)
        return rng.random((size, m)) < pi[:, None]
    if isinstance(model, IndependentBeta):
        a = np.array([ab[0] for ab in model.concentrations])
        b = np.array([ab[1] for ab in model.concentrations])
        pi = rng.beta(a, b, (size, m))
        return rng.random((size, m)) < pi
    return rng.random((size, m)) < np.asarray(model.probs)


def _pooled_var(sum_x: float, sum_x2: float, n: int) -> float:
    return (sum_x2 - sum_x * sum_x / n) / (n - 1)


def _pooled_cov(sum_xy: float, sum_x: float, sum_y: float, n: int) -> float:
    return (sum_xy - sum_x * sum_y / n) / (n - 1)


def simulate_shrinkage(
    spec: ShrinkageSpec, n_draws: int, seed: int, chunks: int | None = None
) -> ShrinkageSimulation:
    """Joint draws of (weights, indicators, parameters) with moment estimates.

    Work is split into chunks with independently derived seed streams
    (safe to farm out to workers); point estimates pool the per-chunk
    sufficient sums exactly, while standard errors come from the spread
    of the per-chunk estimates.
    """
    if n_draws < MIN_SIMULATION_DRAWS:
        raise ValueError(f"need at least {MIN_SIMULATION_DRAWS} draws, got {n_draws}")
    m = spec.m
    n_chunks = chunks if chunks is not None else (100 if n_draws >= 10**6 else 10)
    n_chunks = max(2, min(n_chunks, n_draws // 1000))
    base, extra = divmod(n_draws, n_chunks)
    sizes = [base + (1 if c < extra else 0) for c in range(n_chunks)]
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    pair = m >= 2
    with_theta = spec.components is not None
    sum_counts = np.zeros(m + 1, dtype=np.int64)
    totals = {
        "n": 0, "z1": 0.0, "z2": 0.0, "z1z2": 0.0,
        "n_z2_0": 0, "n_z2_1": 0, "z1_at_0": 0.0, "z1_at_1": 0.0,
        "t1": 0.0, "t1_sq": 0.0, "t2": 0.0, "t2_sq": 0.0, "t1t2": 0.0,
    }
    per_chunk: dict[str, list[float]] = {}

    def record(name: str, value: float) -> None:
        per_chunk.setdefault(name, []).append(value)

    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        z = _draw_indicators(rng, spec.weight_model, size, m)
        sum_counts += np.bincount(z.sum(axis=1), minlength=m + 1)
        z1 = z[:, 0].astype(float)
        totals["n"] += size
        totals["z1"] += float(z1.sum())
        record("mean_z", float(z1.mean()))
        record("var_z", float(z1.var(ddof=1)))
        if pair:
            z2 = z[:, 1].astype(float)
            totals["z2"] += float(z2.sum())
            totals["z1z2"] += float((z1 * z2).sum())
            mask1 = z[:, 1]
            n1 = int(mask1.sum())
            totals["n_z2_1"] += n1
            totals["n_z2_0"] += size - n1
            totals["z1_at_1"] += float(z1[mask1].sum())
            totals["z1_at_0"] += float(z1[~mask1].sum())
            cov = float(np.cov(z1, z2, ddof=1)[0, 1])
            record("cov_z", cov)
            denom = math.sqrt(z1.var(ddof=1) * z2.var(ddof=1))
            record("cor_z", cov / denom if denom > 0.0 else math.nan)
            record("conditional_given_0", float(z1[~mask1].mean()) if n1 < size else math.nan)
            record("conditional_given_1", float(z1[mask1].mean()) if n1 > 0 else math.nan)
        if with_theta:
            first = spec.components[0].sample(rng, (size, m))
            second = spec.components[1].sample(rng, (size, m))
            th = np.where(z, first, second)
            t1 = th[:, 0]
            totals["t1"] += float(t1.sum())
            totals["t1_sq"] += float((t1 * t1).sum())
            record("mean_theta", float(t1.mean()))
            record("var_theta", float(t1.var(ddof=1)))
            if pair:
                t2 = th[:, 1]
                totals["t2"] += float(t2.sum())
                totals["t2_sq"] += float((t2 * t2).sum())
                totals["t1t2"] += float((t1 * t2).sum())
                cov_t = float(np.cov(t1, t2, ddof=1)[0, 1])
                record("cov_theta", cov_t)
                denom = math.sqrt(t1.var(ddof=1) * t2.var(ddof=1))
                record("cor_theta", cov_t / denom if denom > 0.0 else math.nan)

    def se_of(name: str) -> float:
        vals = np.asarray(per_chunk[name])
        vals = vals[~np.isnan(vals)]
        if len(vals) < 2:
            return math.nan
        return float(vals.std(ddof=1) / math.sqrt(len(vals)))

    n = totals["n"]
    latent: dict[str, Estimate] = {
        "mean_z": Estimate(totals["z1"] / n, se_of("mean_z")),
        "var_z": Estimate(_pooled_var(totals["z1"], totals["z1"], n), se_of("var_z")),
    }
    if pair:
        var1 = _pooled_var(totals["z1"], totals["z1"], n)
        var2 = _pooled_var(totals["z2"], totals["z2"], n)
        cov = _pooled_cov(totals["z1z2"], totals["z1"], totals["z2"], n)
        denom = math.sqrt(var1 * var2)
        latent["cov_z"] = Estimate(cov, se_of("cov_z"))
        latent["cor_z"] = Estimate(cov / denom if denom > 0.0 else math.nan, se_of("cor_z"))
        latent["conditional_given_0"] = Estimate(
            totals["z1_at_0"] / totals["n_z2_0"] if totals["n_z2_0"] else math.nan,
            se_of("conditional_given_0"),
        )
        latent["conditional_given_1"] = Estimate(
            totals["z1_at_1"] / totals["n_z2_1"] if totals["n_z2_1"] else math.nan,
            se_of("conditional_given_1"),
        )
    theta: dict[str, Estimate] | None = None
    if with_theta:
        theta = {
            "mean_theta": Estimate(totals["t1"] / n, se_of("mean_theta")),
            "var_theta": Estimate(_pooled_var(totals["t1"], totals["t1_sq"], n), se_of("var_theta")),
        }
        if pair:
            var1 = _pooled_var(totals["t1"], totals["t1_sq"], n)
            var2 = _pooled_var(totals["t2"], totals["t2_sq"], n)
            cov = _pooled_cov(totals["t1t2"], totals["t1"], totals["t2"], n)
            denom = math.sqrt(var1 * var2)
            theta["cov_theta"] = Estimate(cov, se_of("cov_theta"))
            theta["cor_theta"] = Estimate(
                cov / denom if denom > 0.0 else math.nan, se_of("cor_theta")
            )
    return ShrinkageSimulation(
        n_draws=n,
        latent=latent,
        theta=theta,
        sum_counts=tuple(int(c) for c in sum_counts),
        sum_pmf=tuple(float(c) / n for c in sum_counts),
    )


def sample_normal_scale_mixture(
    mu: float, shape: float, scale: float, n_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw from Normal(mu, V) with V ~ inverse-Gamma(shape, scale)."""
    variance = scale / rng.gamma(shape, size=n_draws)
    return mu + rng.standard_normal(n_draws) * np.sqrt(variance)


def ks_distance(draws: np.ndarray, cdf) -> float:
    """Kolmogorov-Smirnov distance between an empirical sample and a CDF."""
    x = np.sort(np.asarray(draws, dtype=float))
    n = len(x)
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def marginal_extension_check(
    mu: float, shape: float, scale: float, n_draws: int, seed: int
) -> MarginalCheckResult:
    """Check the marginal of a normal prior with inverse-gamma variance.

    Integrating the variance out of Normal(mu, V), V ~ IG(shape, scale)
    gives Student-t with 2*shape degrees of freedom, location mu and
    scale sqrt(scale/shape).  Returns the KS distance of simulated
    marginal draws from that analytic CDF: extending a prior with a
    hyperprior layer must be judged by the marginal it implies.
    """
    if shape <= 0.0 or scale <= 0.0:
        raise ValueError(f"inverse-gamma parameters must be positive, got ({shape}, {scale})")
    if n_draws < 1:
        raise ValueError(f"n_draws must be positive, got {n_draws}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    draws = sample_normal_scale_mixture(mu, shape, scale, n_draws, rng)
    df = 2.0 * shape
    scale_t = math.sqrt(scale / shape)
    dist = ks_distance(draws, lambda x: student_t.cdf(x, df, loc=mu, scale=scale_t))
    return MarginalCheckResult(dist, df, mu, scale_t, n_draws)
