"""Mixture assignment design.

Assignment probabilities mix a uniform design with an adaptive policy through
a deterministic sequence ``delta_t``: arm ``w`` is assigned with probability
``delta_t / K + (1 - delta_t) * p_adaptive[w]``. Because ``delta_t > 0``, every
arm keeps probability at least ``delta_t / K``, which is what makes the
inverse-propensity estimators in :mod:`madlab.inference` well defined.
"""

from dataclasses import dataclass

import numpy as np

# Maximum decay exponent (exclusive). delta_t = t^(-a) must shrink strictly
# slower than t^(-1/4) for the confidence sequences to remain valid.
MAX_DELTA_EXPONENT = 0.25

# Output probability vectors are renormalized when the sum drifts beyond the
# strict tolerance, and rejected as a logic error beyond the loose one.
SUM_TOL_STRICT = 1e-12
SUM_TOL_LOOSE = 1e-9


@dataclass(frozen=True)
class DeltaSequence:
    """Deterministic mixing-rate sequence, either ``t^(-exponent)`` or a constant.

    Exactly one of ``exponent`` (in ``[0, 0.25)``) and ``constant`` (in
    ``(0, 1]``) must be given. Both forms are non-increasing and stay in
    ``(0, 1]`` for all ``t >= 1``.
    """

    exponent: float | None = None
    constant: float | None = None

    def __post_init__(self):
        if (self.exponent is None) == (self.constant is None):
            raise ValueError("specify exactly one of exponent= or constant=")
        if self.exponent is not None:
            if not 0.0 <= self.exponent < MAX_DELTA_EXPONENT:
                raise ValueError(
                    f"delta exponent must satisfy 0 <= a < {MAX_DELTA_EXPONENT} so "
                    f"that delta_t shrinks slower than t^(-1/4); got {self.exponent}"
                )
        else:
            if not 0.0 < self.constant <= 1.0:
                raise ValueError(f"constant delta must lie in (0, 1]; got {self.constant}")

    def to_dict(self):
        if self.exponent is not None:
            return {"exponent": self.exponent}
        return {"constant": self.constant}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def delta_at(spec: DeltaSequence, t: int) -> float:
    """Evaluate the mixing rate at unit index ``t`` (1-based)."""
    if t < 1:
        raise ValueError(f"unit index must be >= 1; got {t}")
    if spec.constant is not None:
        return spec.constant
    return float(t) ** -spec.exponent


@dataclass(frozen=True)
class AssignmentDistribution:
    """Assignment probabilities for one unit, with the uniform-mixture floor.

    ``probs[w] >= delta / K`` for every arm and the entries sum to 1 within
    ``SUM_TOL_STRICT``.
    """

    probs: np.ndarray
    t: int
    delta: float

    def __post_init__(self):
        if self.t < 1:
            raise ValueError(f"unit index must be >= 1; got {self.t}")
        k = self.probs.shape[0]
        floor = self.delta / k
        # Allow a one-ulp-ish slack on the floor: the mixture arithmetic can
        # land a hair under delta/k when the adaptive probability is exactly 0.
        if np.any(self.probs < floor * (1.0 - 1e-12) - 1e-15):
            raise ValueError("assignment probability fell below the uniform floor delta/K")
        s = float(self.probs.sum())
        if abs(s - 1.0) > SUM_TOL_STRICT:
            raise ValueError(f"assignment probabilities sum to {s}, not 1")


def mixture_probabilities(
    delta: float, adaptive_probs: np.ndarray, t: int = 1
) -> AssignmentDistribution:
    """Mix the adaptive policy's probabilities with the uniform design.

    Entry ``w`` of the result is ``delta / K + (1 - delta) * adaptive_probs[w]``.
    ``adaptive_probs`` must be a probability vector (non-negative entries,
    summing to 1 within ``SUM_TOL_LOOSE``); the output is renormalized if its
    sum drifts past ``SUM_TOL_STRICT`` and rejected past ``SUM_TOL_LOOSE``.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1]; got {delta}")
    p = np.asarray(adaptive_probs, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] < 2:
        raise ValueError("adaptive_probs must be a vector of length >= 2")
    if np.any(p < 0.0):
        raise ValueError("adaptive_probs has negative entries")
    s = float(p.sum())
    if abs(s - 1.0) > SUM_TOL_LOOSE:
        raise ValueError(f"adaptive_probs sum to {s}, not 1")
    k = p.shape[0]
    out = delta / k + (1.0 - delta) * p
    total = float(out.sum())
    drift = abs(total - 1.0)
    if drift > SUM_TOL_LOOSE:
        raise ValueError(f"mixture probabilities sum to {total}; inputs are inconsistent")
    if drift > SUM_TOL_STRICT:
        out = out / total
    return AssignmentDistribution(probs=out, t=t, delta=delta)


def sample_assignment(dist: AssignmentDistribution, rng: np.random.Generator) -> int:
    """Draw an arm index from ``dist``; deterministic given the rng state."""
    u = rng.random()
    return int(np.searchsorted(np.cumsum(dist.probs), u, side="right").clip(0, dist.probs.shape[0] - 1))
