"""Sequential per-arm outcome models.

Models are fit only on history strictly before the unit they predict for, so
any model here is admissible: the effect estimator stays unbiased no matter
how good or bad the fit is. Fitted values are clamped to ``[-cap, +cap]`` so
they stay bounded along the whole run.
"""

from dataclasses import dataclass

import numpy as np

MODEL_KINDS = ("zero", "arm_mean", "ols")

# Default refit cadence when none is configured: every unit while the run is
# small, every 25th unit afterwards. Cadence affects efficiency only, never
# validity, since any model fit on past data is admissible.
REFIT_EVERY_DENSE_UNTIL = 1000
REFIT_EVERY_SPARSE = 25


@dataclass(frozen=True)
class OutcomeModelSpec:
    """Outcome-model configuration.

    ``refit_every=None`` selects the default cadence (dense early, then every
    25th unit). ``min_obs_per_arm=None`` resolves to ``d + 2`` for OLS and 1
    otherwise. ``cap="auto"`` tracks 10x the largest absolute outcome seen so
    far across all arms (1 before any outcome).
    """

    kind: str = "ols"
    refit_every: int | None = None
    min_obs_per_arm: int | None = None
    cap: float | str = "auto"

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown outcome model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.refit_every is not None and self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")
        if self.min_obs_per_arm is not None and self.min_obs_per_arm < 1:
            raise ValueError("min_obs_per_arm must be >= 1")
        if self.cap != "auto":
            if not isinstance(self.cap, (int, float)) or self.cap <= 0:
                raise ValueError('cap must be a positive number or "auto"')

    def resolved_min_obs(self, d: int) -> int:
        if self.min_obs_per_arm is not None:
            return self.min_obs_per_arm
        return d + 2 if self.kind == "ols" else 1

    def refit_due(self, t: int) -> bool:
        every = self.refit_every
        if every is None:
            every = 1 if t <= REFIT_EVERY_DENSE_UNTIL else REFIT_EVERY_SPARSE
        return t % every == 0

    def to_dict(self):
        return {
            "kind": self.kind,
            "refit_every": self.refit_every,
            "min_obs_per_arm": self.min_obs_per_arm,
            "cap": self.cap,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class FittedArmModel:
    """Linear predictor for one arm: intercept plus slopes, clamped at ``cap_value``."""

    arm: int
    coefficients: np.ndarray  # (d + 1,), intercept first
    fitted_on: int
    cap_value: float

    def predict(self, x: np.ndarray) -> float:
        return predict(self, x)


def fit_arm_model(
    arm: int,
    x: np.ndarray,
    y: np.ndarray,
    spec: OutcomeModelSpec,
    cap_value: float,
    d: int,
) -> FittedArmModel:
    """Fit the configured model to one arm's history.

    ``x`` is (n, d), ``y`` is (n,); both contain only units observed strictly
    before the unit the model will predict for. Degenerate inputs degrade by
    contract: no observations gives the zero model; too few observations or a
    rank-deficient design gives the per-arm mean; otherwise least squares.
    """
    n = y.shape[0]
    coef = np.zeros(d + 1)
    if n == 0 or spec.kind == "zero":
        return FittedArmModel(arm=arm, coefficients=coef, fitted_on=n, cap_value=cap_value)
    if spec.kind == "arm_mean" or n < spec.resolved_min_obs(d):
        coef[0] = float(y.mean())
        return FittedArmModel(arm=arm, coefficients=coef, fitted_on=n, cap_value=cap_value)
    design = np.empty((n, d + 1))
    design[:, 0] = 1.0
    design[:, 1:] = x
    solution, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < d + 1:
        coef[0] = float(y.mean())
        return FittedArmModel(arm=arm, coefficients=coef, fitted_on=n, cap_value=cap_value)
    return FittedArmModel(arm=arm, coefficients=solution, fitted_on=n, cap_value=cap_value)


def predict(model: FittedArmModel, x: np.ndarray) -> float:
    """Linear prediction clamped to ``[-cap_value, +cap_value]``."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("covariates must be finite")
    raw = model.coefficients[0] + float(model.coefficients[1:] @ x)
    cap = model.cap_value
    return min(max(raw, -cap), cap)


class ArmModelStore:
    """Per-arm training data plus the current fitted models.

    The engine asks for predictions *before* recording a unit's outcome, so
    the model used for unit t was fit on units 1..t-1 only. Refits are lazy:
    an arm is refit at a cadence point only if it received data since its
    last fit.
    """

    def __init__(self, k: int, d: int, spec: OutcomeModelSpec):
        self.k = k
        self.d = d
        self.spec = spec
        self._xs = [[] for _ in range(k)]
        self._ys = [[] for _ in range(k)]
        self._dirty = [False] * k
        self._max_abs_y = 0.0
        self.fit_log: list[tuple[int, int, int]] = []  # (unit index, arm, n used)
        self._models = [self._fit(arm, 0) for arm in range(k)]

    def cap_value(self) -> float:
        if self.spec.cap != "auto":
            return float(self.spec.cap)
        return 10.0 * self._max_abs_y if self._max_abs_y > 0.0 else 1.0

    def _fit(self, arm: int, t: int) -> FittedArmModel:
        x = np.array(self._xs[arm], dtype=np.float64).reshape(len(self._ys[arm]), self.d)
        y = np.array(self._ys[arm], dtype=np.float64)
        self.fit_log.append((t, arm, y.shape[0]))
        return fit_arm_model(arm, x, y, self.spec, self.cap_value(), self.d)

    def predict_all(self, x: np.ndarray) -> np.ndarray:
        """Capped fitted values for every arm at covariates ``x``."""
        cap = self.cap_value()
        out = np.empty(self.k)
        for arm, model in enumerate(self._models):
            raw = model.coefficients[0] + float(model.coefficients[1:] @ x)
            out[arm] = min(max(raw, -cap), cap)
        return out

    def record(self, t: int, arm: int, x: np.ndarray, y: float):
        """Append unit ``t``'s observation and refit on cadence."""
        self._xs[arm].append(np.asarray(x, dtype=np.float64))
        self._ys[arm].append(y)
        self._dirty[arm] = True
        ay = abs(y)
        if ay > self._max_abs_y:
            self._max_abs_y = ay
        if self.spec.kind != "zero" and self.spec.refit_due(t):
            for a in range(self.k):
                if self._dirty[a]:
                    self._models[a] = self._fit(a, t)
                    self._dirty[a] = False

    def model(self, arm: int) -> FittedArmModel:
        return self._models[arm]
