"""Adaptive assignment policies.

A policy maps per-arm sufficient statistics (history strictly before the
current unit) to a probability vector over arms. Thompson sampling estimates
the posterior probability that each arm is best by Monte Carlo; UCB is a
point-mass policy, which is legal here because the mixture design keeps every
arm's final assignment probability positive.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels

POLICY_KINDS = ("thompson_bernoulli", "thompson_gaussian", "ucb", "uniform")
MIN_MC_DRAWS = 100


@dataclass
class ArmSufficientStats:
    """Running outcome statistics for one arm."""

    pulls: int = 0
    sum_outcomes: float = 0.0
    sum_sq_outcomes: float = 0.0
    successes: int = 0

    def update(self, y: float):
        self.pulls += 1
        self.sum_outcomes += y
        self.sum_sq_outcomes += y * y
        if y == 1.0:
            self.successes += 1

    def validate(self):
        if not 0 <= self.successes <= self.pulls:
            raise ValueError(f"invalid stats: pulls={self.pulls} successes={self.successes}")
        if not (np.isfinite(self.sum_outcomes) and np.isfinite(self.sum_sq_outcomes)):
            raise ValueError("non-finite outcome sums")


@dataclass(frozen=True)
class PolicySpec:
    """Configuration of the adaptive policy.

    ``mc_draws`` is the Monte-Carlo sample size for Thompson posterior-argmax
    estimation. Priors: Beta(``prior_alpha``, ``prior_beta``) for Bernoulli
    outcomes; Normal(``prior_mean``, ``prior_var``) with known noise variance
    ``noise_var`` for Gaussian outcomes.
    """

    kind: str = "thompson_bernoulli"
    mc_draws: int = 1000
    ucb_constant: float = 1.0
    prior_alpha: float = 1.0
    prior_beta: float = 1.0
    prior_mean: float = 0.0
    prior_var: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}")
        if self.mc_draws < MIN_MC_DRAWS:
            raise ValueError(f"mc_draws must be >= {MIN_MC_DRAWS}; got {self.mc_draws}")
        if self.ucb_constant < 0:
            raise ValueError("ucb_constant must be >= 0")
        if min(self.prior_alpha, self.prior_beta) <= 0:
            raise ValueError("Beta prior parameters must be positive")
        if self.prior_var <= 0 or self.noise_var <= 0:
            raise ValueError("prior_var and noise_var must be positive")

    def to_dict(self):
        return {
            "kind": self.kind,
            "mc_draws": self.mc_draws,
            "ucb_constant": self.ucb_constant,
            "prior_alpha": self.prior_alpha,
            "prior_beta": self.prior_beta,
            "prior_mean": self.prior_mean,
            "prior_var": self.prior_var,
            "noise_var": self.noise_var,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def thompson_probs(
    stats: list[ArmSufficientStats],
    spec: PolicySpec,
    rng: np.random.Generator,
) -> np.ndarray:
    """Monte-Carlo estimate of the posterior probability each arm is best.

    Draws ``spec.mc_draws`` joint samples from the per-arm posteriors, counts
    argmax frequencies (ties broken uniformly at random), and normalizes.
    Arms that never win receive exactly 0; the mixture floor restores
    positivity downstream.
    """
    k = len(stats)
    if k < 2:
        raise ValueError("need at least 2 arms")
    for s in stats:
        s.validate()
    m = spec.mc_draws
    if spec.kind == "thompson_bernoulli":
        a = np.array([spec.prior_alpha + s.successes for s in stats])
        b = np.array([spec.prior_beta + (s.pulls - s.successes) for s in stats])
        samples = rng.beta(a, b, size=(m, k))
        counts = _kernels.argmax_counts(samples, rng)
    elif spec.kind == "thompson_gaussian":
        # Conjugate normal posterior with known noise variance.
        pulls = np.array([s.pulls for s in stats], dtype=np.float64)
        sums = np.array([s.sum_outcomes for s in stats])
        post_var = 1.0 / (1.0 / spec.prior_var + pulls / spec.noise_var)
        post_mean = post_var * (spec.prior_mean / spec.prior_var + sums / spec.noise_var)
        z = rng.standard_normal((m, k))
        counts = _kernels.shifted_argmax_counts(post_mean, np.sqrt(post_var), z, rng)
    else:
        raise ValueError(f"thompson_probs does not handle policy kind {spec.kind!r}")
    return counts / float(m)


def ucb_probs(stats: list[ArmSufficientStats], spec: PolicySpec, t: int) -> np.ndarray:
    """One-hot vector on the arm maximizing mean + c * sqrt(2 ln t / pulls).

    Unpulled arms take priority in index order; ties go to the lowest index.
    """
    if t < 1:
        raise ValueError(f"unit index must be >= 1; got {t}")
    k = len(stats)
    out = np.zeros(k)
    unpulled = [i for i, s in enumerate(stats) if s.pulls == 0]
    if unpulled:
        out[unpulled[0]] = 1.0
        return out
    values = np.array(
        [
            s.sum_outcomes / s.pulls + spec.ucb_constant * np.sqrt(2.0 * np.log(t) / s.pulls)
            for s in stats
        ]
    )
    out[int(np.argmax(values))] = 1.0  # np.argmax takes the lowest index on ties
    return out


def uniform_probs(k: int) -> np.ndarray:
    """Uniform randomization over ``k`` arms."""
    if k < 2:
        raise ValueError("need at least 2 arms")
    return np.full(k, 1.0 / k)


class PolicyState:
    """Per-run policy state: sufficient statistics plus dispatch.

    The engine calls :meth:`probs` before a unit is assigned and
    :meth:`record` after its outcome is observed, so the probabilities for
    unit t never see unit t's own outcome.
    """

    def __init__(self, k: int, spec: PolicySpec):
        self.spec = spec
        self.stats = [ArmSufficientStats() for _ in range(k)]

    @property
    def k(self) -> int:
        return len(self.stats)

    def probs(self, t: int, rng: np.random.Generator) -> np.ndarray:
        kind = self.spec.kind
        if kind == "uniform":
            return uniform_probs(self.k)
        if kind == "ucb":
            return ucb_probs(self.stats, self.spec, t)
        return thompson_probs(self.stats, self.spec, rng)

    def record(self, arm: int, y: float):
        if self.spec.kind == "thompson_bernoulli" and y not in (0.0, 1.0):
            raise ValueError(f"thompson_bernoulli requires outcomes in {{0, 1}}; got {y}")
        self.stats[arm].update(y)
