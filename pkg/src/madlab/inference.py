"""Covariate-adjusted effect estimation with anytime-valid confidence sequences.

For each unit the pairwise effect estimate for treatment ``w`` against control
``w'`` is

    tau_hat = mu_w - mu_ctrl
              + 1{W = w}    (y - mu_w)    / p_w
              - 1{W = ctrl} (y - mu_ctrl) / p_ctrl

where ``mu`` are outcome-model fitted values (measurable with respect to the
history strictly before the unit) and ``p`` the logged assignment
probabilities. The estimate's conditional variance is bounded by a quantity
whose unbiased estimate is

    sig2_hat = 1{W = w} (y - mu_w)^2 / p_w^2 + 1{W = ctrl} (y - mu_ctrl)^2 / p_ctrl^2.

Running sums of these two quantities drive a time-uniform confidence sequence
with radius

    radius = sqrt( 2 (S eta^2 + 1) / (t^2 eta^2) * log( sqrt(S eta^2 + 1) / alpha ) )

which shrinks to zero almost surely under the mixture design's floor rate.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

DEFAULT_ALPHA = 0.05
DEFAULT_T_STAR = 10_000

# radius_form selects where the logarithm sits. "log_inside" is the default
# construction; "log_outside" (the whole log as a factor on the sqrt) is
# exposed for comparison only.
RADIUS_FORMS = ("log_inside", "log_outside")


@dataclass(frozen=True)
class IteInputs:
    """Everything the pairwise estimators need about one unit.

    ``w_obs`` may equal the pair's treatment arm, its control arm, or neither
    (then both indicator terms vanish and only the model contrast remains).
    """

    w_obs: int
    y: float
    mu_w: float
    mu_ctrl: float
    p_w: float
    p_ctrl: float
    treatment: int = 1
    control: int = 0

    def __post_init__(self):
        if min(self.p_w, self.p_ctrl) <= 0.0:
            raise ValueError(
                f"assignment probabilities must be positive; got p_w={self.p_w}, "
                f"p_ctrl={self.p_ctrl} (the mixture design guarantees a positive floor)"
            )


def ite_estimate(inputs: IteInputs) -> float:
    """Unbiased single-unit effect estimate for one (treatment, control) pair."""
    tau = inputs.mu_w - inputs.mu_ctrl
    if inputs.w_obs == inputs.treatment:
        tau += (inputs.y - inputs.mu_w) / inputs.p_w
    elif inputs.w_obs == inputs.control:
        tau -= (inputs.y - inputs.mu_ctrl) / inputs.p_ctrl
    return tau


def variance_estimate(inputs: IteInputs) -> float:
    """Unbiased single-unit estimate of the variance bound for the pair."""
    if inputs.w_obs == inputs.treatment:
        r = (inputs.y - inputs.mu_w) / inputs.p_w
        return r * r
    if inputs.w_obs == inputs.control:
        r = (inputs.y - inputs.mu_ctrl) / inputs.p_ctrl
        return r * r
    return 0.0


def eta_opt(alpha: float, t_star: int) -> float:
    """Tuning parameter that makes the radius tightest near ``t_star``.

    eta = sqrt((-2 ln alpha + ln(-2 ln alpha + 1)) / t_star).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1); got {alpha}")
    if t_star < 1:
        raise ValueError(f"t_star must be >= 1; got {t_star}")
    la = np.log(alpha)
    return float(np.sqrt((-2.0 * la + np.log(-2.0 * la + 1.0)) / t_star))


def cs_radius(
    s_hat,
    t,
    eta: float,
    alpha: float,
    radius_form: str = "log_inside",
):
    """Confidence-sequence half width at time ``t`` given running variance ``s_hat``.

    Accepts scalars or numpy arrays for ``s_hat``/``t`` and broadcasts.
    """
    if radius_form not in RADIUS_FORMS:
        raise ValueError(f"radius_form must be one of {RADIUS_FORMS}; got {radius_form!r}")
    if eta <= 0.0:
        raise ValueError(f"eta must be positive; got {eta}")
    s_hat = np.asarray(s_hat, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if np.any(s_hat < 0.0) or np.any(t < 1.0):
        raise ValueError("require s_hat >= 0 and t >= 1")
    g = s_hat * (eta * eta) + 1.0
    scale = 2.0 * g / (t * t * eta * eta)
    log_term = np.log(np.sqrt(g) / alpha)
    if radius_form == "log_inside":
        out = np.sqrt(scale * log_term)
    else:
        out = np.sqrt(scale) * log_term
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConfidenceSequence:
    """One interval of a confidence sequence."""

    center: float
    radius: float

    def __post_init__(self):
        if self.radius < 0.0:
            raise ValueError("radius must be >= 0")

    @property
    def lower(self) -> float:
        return self.center - self.radius

    @property
    def upper(self) -> float:
        return self.center + self.radius


def is_significant(cs: ConfidenceSequence) -> bool:
    """True when the interval excludes zero."""
    return cs.lower > 0.0 or cs.upper < 0.0


@dataclass
class ArmPairInferenceState:
    """Running inference state for one (treatment, control) pair.

    ``t`` counts units in unit mode and batches in batched mode. Every unit
    advances ``t``, including units assigned to neither pair member (their
    estimate is the bare model contrast with zero variance).
    """

    treatment: int = 1
    control: int = 0
    alpha: float = DEFAULT_ALPHA
    t_star: int = DEFAULT_T_STAR
    eta: float | None = None
    radius_form: str = "log_inside"
    t: int = 0
    sum_tau_hat: float = 0.0
    s_hat: float = 0.0

    def __post_init__(self):
        if self.eta is None:
            self.eta = eta_opt(self.alpha, self.t_star)

    @property
    def ate_estimate(self) -> float:
        if self.t == 0:
            raise ValueError("no units observed yet")
        return self.sum_tau_hat / self.t

    def cs(self) -> ConfidenceSequence:
        return ConfidenceSequence(
            center=self.ate_estimate,
            radius=cs_radius(self.s_hat, self.t, self.eta, self.alpha, self.radius_form),
        )

    def update_pair(self, inputs: IteInputs) -> ConfidenceSequence:
        """Fold in one unit and return the current interval."""
        self.t += 1
        self.sum_tau_hat += ite_estimate(inputs)
        self.s_hat += variance_estimate(inputs)
        return self.cs()

    def batched_update(self, batch: list[IteInputs]) -> ConfidenceSequence:
        """Fold in one batch sharing a single assignment distribution.

        The batch contributes the mean of its unit-level estimates and
        ``1/B^2`` times the sum of its variance estimates; ``t`` advances by
        one batch.
        """
        if not batch:
            raise ValueError("batch must contain at least one unit")
        b = len(batch)
        p_ref = (batch[0].p_w, batch[0].p_ctrl)
        tau_sum = 0.0
        sig2_sum = 0.0
        for inputs in batch:
            if (inputs.p_w, inputs.p_ctrl) != p_ref:
                raise ValueError("all units in a batch must share one assignment distribution")
            tau_sum += ite_estimate(inputs)
            sig2_sum += variance_estimate(inputs)
        self.t += 1
        self.sum_tau_hat += tau_sum / b
        self.s_hat += sig2_sum / (b * b)
        return self.cs()


class PairwiseTracker:
    """Vectorized inference over every treatment-vs-control pair.

    Maintains the same running sums as one :class:`ArmPairInferenceState` per
    treatment arm, but stored as arrays and updated through the hot kernel.
    Slot ``k`` of the arrays corresponds to pair ``(k, 0)``; slot 0 is unused.
    """

    def __init__(
        self,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        t_star: int = DEFAULT_T_STAR,
        radius_form: str = "log_inside",
    ):
        if k < 2:
            raise ValueError("need at least 2 arms")
        if radius_form not in RADIUS_FORMS:
            raise ValueError(f"radius_form must be one of {RADIUS_FORMS}")
        self.k = k
        self.alpha = alpha
        self.t_star = t_star
        self.eta = eta_opt(alpha, t_star)
        self.radius_form = radius_form
        self.t = 0
        self.sum_tau = np.zeros(k)
        self.s_hat = np.zeros(k)

    def update(self, arm: int, y: float, mu: np.ndarray, probs: np.ndarray):
        """Fold in one unit: fitted values ``mu`` and logged ``probs`` for all arms."""
        self.t += 1
        _kernels.pair_accumulate(arm, y, mu, probs, self.sum_tau, self.s_hat)

    def update_batch(self, arms, ys, mus, probs):
        """Fold in one batch sharing the assignment distribution ``probs``.

        ``arms``/``ys`` are length-B sequences; ``mus`` is (B, k).
        """
        b = len(arms)
        if b == 0:
            raise ValueError("batch must contain at least one unit")
        tau = np.zeros(self.k)
        sig2 = np.zeros(self.k)
        for i in range(b):
            _kernels.pair_accumulate(int(arms[i]), float(ys[i]), mus[i], probs, tau, sig2)
        self.t += 1
        self.sum_tau += tau / b
        self.s_hat += sig2 / (b * b)

    def centers(self) -> np.ndarray:
        if self.t == 0:
            raise ValueError("no units observed yet")
        return self.sum_tau[1:] / self.t

    def radii(self) -> np.ndarray:
        return cs_radius(self.s_hat[1:], self.t, self.eta, self.alpha, self.radius_form)

    def significant(self) -> np.ndarray:
        """Boolean per treatment arm: does the current interval exclude zero?"""
        centers = self.centers()
        radii = self.radii()
        return (centers - radii > 0.0) | (centers + radii < 0.0)

    def cs(self, treatment: int) -> ConfidenceSequence:
        if not 1 <= treatment < self.k:
            raise ValueError(f"treatment arm must be in 1..{self.k - 1}")
        return ConfidenceSequence(
            center=float(self.centers()[treatment - 1]),
            radius=float(self.radii()[treatment - 1]),
        )

    def state(self, treatment: int) -> ArmPairInferenceState:
        """Materialize the scalar state for one pair (for logging and tests)."""
        if not 1 <= treatment < self.k:
            raise ValueError(f"treatment arm must be in 1..{self.k - 1}")
        return ArmPairInferenceState(
            treatment=treatment,
            control=0,
            alpha=self.alpha,
            t_star=self.t_star,
            eta=self.eta,
            radius_form=self.radius_form,
            t=self.t,
            sum_tau_hat=float(self.sum_tau[treatment]),
            s_hat=float(self.s_hat[treatment]),
        )
