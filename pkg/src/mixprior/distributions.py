"""Distribution primitives and finite-mixture arithmetic.

The four component families (beta, normal, uniform, point mass) are the
building blocks for every prior handled by this package.  A
:class:`Mixture` combines components on a weight simplex and exposes
density, distribution function, quantiles, moments and seeded sampling.

Scalar special functions come from scipy (regularized incomplete beta
for the beta CDF, erf-based expansion for the normal CDF); the mixture
arithmetic, bracketing and quantile inversion live here.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, ndtr

__all__ = [
    "Beta",
    "Component",
    "DistributionSummary",
    "Mixture",
    "Normal",
    "PointMass",
    "Uniform",
    "WEIGHT_TOL",
]

# Construction rejects weight vectors further than this from the simplex.
WEIGHT_TOL = 1e-12

_SUMMARY_LEVELS = (0.025, 0.5, 0.975)


class Component(ABC):
    """One mixture component: a univariate distribution."""

    @abstractmethod
    def pdf(self, x: float) -> float:
        """Density at ``x``."""

    @abstractmethod
    def cdf(self, x: float) -> float:
        """P(X <= x); right-continuous."""

    @abstractmethod
    def moments(self) -> tuple[float, float]:
        """Return ``(mean, variance)``."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw ``size`` variates from ``rng``."""

    @abstractmethod
    def support(self) -> tuple[float, float]:
        """Mathematical support; endpoints may be infinite."""


@dataclass(frozen=True)
class Beta(Component):
    """Beta(alpha, beta) on (0, 1)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError(
                f"beta shape parameters must be positive, got "
                f"({self.alpha}, {self.beta})"
            )

    def pdf(self, x: float) -> float:
        a, b = self.alpha, self.beta
        if x < 0.0 or x > 1.0:
            return 0.0
        if x == 0.0:
            if a < 1.0:
                return math.inf
            return b if a == 1.0 else 0.0
        if x == 1.0:
            if b < 1.0:
                return math.inf
            return a if b == 1.0 else 0.0
        return math.exp(
            (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - betaln(a, b)
        )

    def cdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        return float(betainc(self.alpha, self.beta, x))

    def moments(self) -> tuple[float, float]:
        a, b = self.alpha, self.beta
        s = a + b
        return a / s, a * b / (s * s * (s + 1.0))

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.beta(self.alpha, self.beta, size)

    def support(self) -> tuple[float, float]:
        return 0.0, 1.0


@dataclass(frozen=True)
class Normal(Component):
    """Normal with mean ``mu`` and variance ``sigma2``."""

    mu: float
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0.0:
            raise ValueError(f"normal variance must be positive, got {self.sigma2}")

    def pdf(self, x: float) -> float:
        z = (x - self.mu) ** 2 / (2.0 * self.sigma2)
        return math.exp(-z) / math.sqrt(2.0 * math.pi * self.sigma2)

    def cdf(self, x: float) -> float:
        return float(ndtr((x - self.mu) / math.sqrt(self.sigma2)))

    def moments(self) -> tuple[float, float]:
        return self.mu, self.sigma2

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.normal(self.mu, math.sqrt(self.sigma2), size)

    def support(self) -> tuple[float, float]:
        return -math.inf, math.inf


@dataclass(frozen=True)
class Uniform(Component):
    """Uniform on [lo, hi], lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform bounds must satisfy lo < hi, got [{self.lo}, {self.hi}]")

    def pdf(self, x: float) -> float:
        if self.lo <= x <= self.hi:
            return 1.0 / (self.hi - self.lo)
        return 0.0

    def cdf(self, x: float) -> float:
        if x <= self.lo:
            return 0.0
        if x >= self.hi:
            return 1.0
        return (x - self.lo) / (self.hi - self.lo)

    def moments(self) -> tuple[float, float]:
        width = self.hi - self.lo
        return 0.5 * (self.lo + self.hi), width * width / 12.0

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)

    def support(self) -> tuple[float, float]:
        return self.lo, self.hi


@dataclass(frozen=True)
class PointMass(Component):
    """Degenerate distribution concentrated at ``location``.

    An atom: it has no density.  Its CDF is the unit step at
    ``location`` and it contributes zero variance to mixture moments.
    """

    location: float

    def pdf(self, x: float) -> float:
        raise ValueError("point mass has no density")

    def cdf(self, x: float) -> float:
        return 1.0 if x >= self.location else 0.0

    def moments(self) -> tuple[float, float]:
        return self.location, 0.0

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.full(size, self.location, dtype=float)

    def support(self) -> tuple[float, float]:
        return self.location, self.location


@dataclass(frozen=True)
class DistributionSummary:
    """Location/spread summary: mean, sd and the 2.5/50/97.5% quantiles."""

    mean: float
    sd: float
    q2_5: float
    median: float
    q97_5: float

    def __post_init__(self):
        if not self.sd >= 0.0:
            raise ValueError(f"sd must be nonnegative, got {self.sd}")
        slack = 1e-9 * max(1.0, abs(self.q2_5), abs(self.q97_5))
        if self.q2_5 > self.median + slack or self.median > self.q97_5 + slack:
            raise ValueError(
                f"quantiles out of order: ({self.q2_5}, {self.median}, {self.q97_5})"
            )

    @property
    def quantiles(self) -> dict[float, float]:
        return {0.025: self.q2_5, 0.5: self.median, 0.975: self.q97_5}


@dataclass(frozen=True)
class Mixture:
    """Finite mixture: components with weights on the probability simplex."""

    components: tuple[Component, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        wts = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", wts)
        if len(comps) == 0:
            raise ValueError("mixture needs at least one component")
        if len(comps) != len(wts):
            raise ValueError(
                f"{len(comps)} components but {len(wts)} weights"
            )
        for c in comps:
            if not isinstance(c, Component):
                raise TypeError(f"not a component distribution: {c!r}")
        for w in wts:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {w} outside [0, 1]")
        total = math.fsum(wts)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total:.17g}, not 1")

    @property
    def k(self) -> int:
        return len(self.components)

    def has_atoms(self) -> bool:
        return any(isinstance(c, PointMass) for c in self.components)

    def pdf(self, x: float) -> float:
        """Weighted component density at ``x``.

        Undefined (raises) when the mixture carries a point mass.
        """
        if self.has_atoms():
            raise ValueError("density undefined: mixture contains a point mass")
        return math.fsum(w * c.pdf(x) for w, c in zip(self.weights, self.components))

    def cdf(self, x: float) -> float:
        return math.fsum(w * c.cdf(x) for w, c in zip(self.weights, self.components))

    def quantile(self, q: float) -> float:
        """Generalized inverse CDF: the infimum x with ``cdf(x) >= q``.

        Bisection on the CDF; the bracket starts from the union of
        component supports and is expanded geometrically if needed.
        """
        if not 0.0 < q < 1.0:
            raise ValueError(f"quantile level must lie in (0, 1), got {q}")
        lo, hi = self._bracket(q)
        for _ in range(300):
            if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) >= q:
                hi = mid
            else:
                lo = mid
        return hi

    def _bracket(self, q: float) -> tuple[float, float]:
        los, his = [], []
        for c in self.components:
            s_lo, s_hi = c.support()
            if not math.isfinite(s_lo) or not math.isfinite(s_hi):
                mu, var = c.moments()
                sd = math.sqrt(var)
                s_lo = mu - 12.0 * sd if not math.isfinite(s_lo) else s_lo
                s_hi = mu + 12.0 * sd if not math.isfinite(s_hi) else s_hi
            los.append(s_lo)
            his.append(s_hi)
        lo, hi = min(los), max(his)
        step = max(hi - lo, 1.0)
        for _ in range(200):
            if self.cdf(lo) < q:
                break
            lo -= step
            step *= 2.0
        else:
            raise ValueError("failed to bracket quantile: malformed component support")
        step = max(hi - lo, 1.0)
        for _ in range(200):
            if self.cdf(hi) >= q:
                break
            hi += step
            step *= 2.0
        else:
            raise ValueError("failed to bracket quantile: malformed component support")
        return lo, hi

    def moments(self) -> tuple[float, float]:
        """Mixture mean and variance via the law of total variance."""
        means_vars = [c.moments() for c in self.components]
        mean = math.fsum(w * m for w, (m, _) in zip(self.weights, means_vars))
        second = math.fsum(w * (v + m * m) for w, (m, v) in zip(self.weights, means_vars))
        return mean, max(second - mean * mean, 0.0)

    def sample(self, seed: int, size: int) -> np.ndarray:
        """Two-stage sampling: component index, then component variate.

        Deterministic for a given ``seed``; independent streams for
        concurrent use come from distinct seeds.
        """
        if size < 1:
            raise ValueError(f"sample size must be >= 1, got {size}")
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        idx = rng.choice(self.k, size=size, p=np.asarray(self.weights))
        out = np.empty(size, dtype=float)
        for i, comp in enumerate(self.components):
            mask = idx == i
            n_i = int(mask.sum())
            if n_i:
                out[mask] = comp.sample(rng, n_i)
        return out

    def summary(self) -> DistributionSummary:
        mean, var = self.moments()
        qs = [self.quantile(level) for level in _SUMMARY_LEVELS]
        return DistributionSummary(mean, math.sqrt(var), qs[0], qs[1], qs[2])
