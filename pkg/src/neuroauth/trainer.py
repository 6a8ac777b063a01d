"""Single-pattern gradient descent that drives a password's output to the target.

The update is the delta rule ``dW = eta * error * affect`` written as plain
gradient descent on ``E = 0.5 * (target - output) ** 2``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, NoConvergence
from .network import Architecture, WeightSet, _check_input, _forward_raw, init_weights

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class TrainingConfig:
    eta: float = 0.5
    target: float = 0.5
    epsilon: float = 1e-5
    max_epochs: int = 100_000
    seed: int = 0
    lam: float = 1.0

    def __post_init__(self):
        if not (self.eta > 0 and np.isfinite(self.eta)):
            raise InvalidConfig(f"eta must be positive, got {self.eta}")
        if not 0.0 < self.target < 1.0:
            raise InvalidConfig(f"target must lie strictly inside (0, 1), got {self.target}")
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise InvalidConfig(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise InvalidConfig(f"max_epochs must be an integer >= 1, got {self.max_epochs}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfig(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not (self.lam > 0 and np.isfinite(self.lam)):
            raise InvalidConfig(f"lambda must be positive, got {self.lam}")


@dataclass
class LearningCurve:
    errors: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.errors)

    @property
    def final_error(self) -> float:
        return self.errors[-1]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "error"])
            for i, e in enumerate(self.errors, start=1):
                w.writerow([i, f"{e:.12e}"])

    @classmethod
    def read_csv(cls, path) -> "LearningCurve":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls([float(r["error"]) for r in rows])


@dataclass(frozen=True, eq=False)
class WeightGradient:
    d_w1: np.ndarray
    d_b1: np.ndarray
    d_w2: np.ndarray
    d_b2: float

    def flat(self) -> np.ndarray:
        return np.concatenate([self.d_w1.ravel(), self.d_b1, self.d_w2, [self.d_b2]])


def squared_error(weights: WeightSet, bits, target: float, lam: float = 1.0) -> float:
    x = _check_input(weights, bits)
    _, o = _forward_raw(weights.w1, weights.b1, weights.w2, weights.b2, x, lam)
    return 0.5 * (target - o) ** 2


def _backprop(w2, x, h, o, target, lam):
    delta_o = -(target - o) * lam * o * (1.0 - o)
    delta_h = delta_o * w2 * lam * h * (1.0 - h)
    return np.outer(delta_h, x), delta_h, delta_o * h, delta_o


def compute_gradient(weights: WeightSet, bits, target: float, lam: float = 1.0) -> WeightGradient:
    """Exact gradient of ``0.5 * (target - output)**2`` w.r.t. every parameter."""
    x = _check_input(weights, bits)
    h, o = _forward_raw(weights.w1, weights.b1, weights.w2, weights.b2, x, lam)
    d_w1, d_b1, d_w2, d_b2 = _backprop(weights.w2, x, h, o, target, lam)
    return WeightGradient(d_w1, d_b1, d_w2, float(d_b2))


def train(bits, config: TrainingConfig, arch: Architecture | None = None):
    """Train from ``init_weights(arch, config.seed)`` until the error drops below epsilon.

    Returns ``(weights, curve)``. Raises :class:`NoConvergence` (carrying the
    curve) if ``max_epochs`` updates are not enough.
    """
    x = np.asarray(bits, dtype=np.float64)
    if arch is None:
        arch = Architecture.for_input(x.shape[0], config.lam)
    elif arch.input_count != x.shape[0]:
        raise DimensionMismatch(f"input has {x.shape[0]} values, architecture expects {arch.input_count}")
    start = init_weights(arch, config.seed)
    w1, b1, w2 = start.w1.copy(), start.b1.copy(), start.w2.copy()
    b2 = start.b2
    eta, t, lam, eps = config.eta, config.target, config.lam, config.epsilon

    curve = LearningCurve()
    errors = curve.errors
    h, o = _forward_raw(w1, b1, w2, b2, x, lam)
    for _ in range(config.max_epochs):
        d_w1, d_b1, d_w2, d_b2 = _backprop(w2, x, h, o, t, lam)
        w1 -= eta * d_w1
        b1 -= eta * d_b1
        w2 -= eta * d_w2
        b2 -= eta * d_b2
        h, o = _forward_raw(w1, b1, w2, b2, x, lam)
        err = abs(t - o)
        errors.append(err)
        if err < eps:
            return WeightSet(w1, b1, w2, b2), curve
    raise NoConvergence(curve, config.max_epochs)
