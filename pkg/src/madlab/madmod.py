"""Power-balancing reallocation of adaptive assignment probabilities.

Once a treatment arm's confidence sequence excludes zero, its importance
weight starts to shrink, which drains adaptive probability mass from the arm
and redistributes it toward arms that still need power. The five-step
transform:

    1. w_k = 1 for arms not yet significant, else decay(clock)
    2. p*_k = w_k * p_k
    3. L = sum_k p_k * (1 - w_k)        (lost mass)
    4. W = sum_k w_k ; r_k = w_k / W    (redistribution shares)
    5. p_g_k = p*_k + r_k * L

The result is always a probability vector, and it feeds the uniform mixture
afterwards, so downweighted arms keep the delta/K assignment floor.
"""

from dataclasses import dataclass

import numpy as np

WEIGHT_KINDS = ("polynomial", "constant", "unity")
CLOCK_MODES = ("since_latch", "absolute")


@dataclass(frozen=True)
class ImportanceWeightSpec:
    """Importance-weight decay applied to arms after they reach significance.

    ``polynomial`` uses ``clock^(-exponent)``; ``constant`` uses a fixed
    ``level``; ``unity`` keeps every weight at 1 (no reallocation). The decay
    clock starts at the unit where the arm latched significance
    (``clock = t - significant_since + 1``) unless ``clock_mode="absolute"``,
    which uses the raw unit index.
    """

    kind: str = "polynomial"
    exponent: float = 0.125
    level: float = 0.3
    clock_mode: str = "since_latch"

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {WEIGHT_KINDS}")
        if self.kind == "polynomial" and self.exponent <= 0:
            raise ValueError("polynomial decay needs exponent > 0")
        if self.kind == "constant" and not 0.0 <= self.level <= 1.0:
            raise ValueError("constant weight level must lie in [0, 1]")
        if self.clock_mode not in CLOCK_MODES:
            raise ValueError(f"clock_mode must be one of {CLOCK_MODES}")

    def to_dict(self):
        return {
            "kind": self.kind,
            "exponent": self.exponent,
            "level": self.level,
            "clock_mode": self.clock_mode,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class ArmPowerState:
    """Significance latch for one arm.

    ``significant_since`` is the unit index at which the arm's confidence
    sequence first excluded zero. Because the sequences are anytime-valid the
    rejection stays valid forever, so the latch never unsets.
    """

    arm: int
    significant_since: int | None = None

    @property
    def significant(self) -> bool:
        return self.significant_since is not None


def importance_weight(state: ArmPowerState, t: int, spec: ImportanceWeightSpec) -> float:
    """Weight for one arm at unit ``t``. Control (arm 0) is never downweighted."""
    if t < 1:
        raise ValueError(f"unit index must be >= 1; got {t}")
    if state.arm == 0 or not state.significant or spec.kind == "unity":
        return 1.0
    if spec.kind == "constant":
        return spec.level
    if spec.clock_mode == "absolute":
        clock = t
    else:
        clock = t - state.significant_since + 1
    if clock < 1:
        raise ValueError(f"latch time {state.significant_since} is after t={t}")
    return float(clock) ** -spec.exponent


def reweight(adaptive_probs: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Apply the five-step mass reallocation. Output is a probability vector."""
    p = np.asarray(adaptive_probs, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if p.shape != w.shape or p.ndim != 1:
        raise ValueError("adaptive_probs and weights must be equal-length vectors")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ValueError("weights must lie in [0, 1]")
    total_weight = float(w.sum())
    if total_weight <= 0.0:
        raise ValueError("at least one weight must be positive")
    scaled = w * p
    lost = float((p * (1.0 - w)).sum())
    shares = w / total_weight
    return scaled + shares * lost


def update_power_state(
    states: list[ArmPowerState],
    significant: np.ndarray,
    t: int,
) -> list[ArmPowerState]:
    """Latch ``significant_since = t`` for newly significant treatment arms.

    ``significant[k - 1]`` refers to treatment arm k's current interval.
    Already-latched arms are left untouched even if their interval later
    covers zero again.
    """
    for state in states:
        if state.arm == 0:
            continue
        if not state.significant and bool(significant[state.arm - 1]):
            state.significant_since = t
    return states


class PowerTracker:
    """Per-run reallocation state: one latch per arm plus weight evaluation."""

    def __init__(self, k: int, spec: ImportanceWeightSpec):
        self.spec = spec
        self.states = [ArmPowerState(arm=i) for i in range(k)]

    def weights(self, t: int) -> np.ndarray:
        return np.array([importance_weight(s, t, self.spec) for s in self.states])

    def latch(self, significant: np.ndarray, t: int):
        update_power_state(self.states, significant, t)

    def latch_times(self) -> list[int | None]:
        return [s.significant_since for s in self.states]
