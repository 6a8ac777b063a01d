"""Three-layer feedforward network: dense input->hidden->single output."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import hidden_count as _hidden_count
from .errors import DimensionMismatch, InvalidConfig


def _frozen(a, dtype=np.float64) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Architecture:
    input_count: int
    hidden_count: int
    lam: float = 1.0

    def __post_init__(self):
        if self.input_count < 1 or self.hidden_count < 1:
            raise InvalidConfig("layer sizes must be positive")
        if not (self.lam > 0 and np.isfinite(self.lam)):
            raise InvalidConfig(f"lambda must be positive and finite, got {self.lam}")

    @classmethod
    def for_input(cls, input_count: int, lam: float = 1.0) -> "Architecture":
        return cls(input_count, _hidden_count(input_count), lam)

    @property
    def parameter_count(self) -> int:
        return self.hidden_count * self.input_count + 2 * self.hidden_count + 1


@dataclass(frozen=True, eq=False)
class WeightSet:
    """Trained parameters. Arrays are copied and made read-only on construction."""

    w1: np.ndarray  # (hidden, input)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float

    def __post_init__(self):
        w1 = _frozen(self.w1)
        b1 = _frozen(self.b1)
        w2 = _frozen(self.w2)
        if w1.ndim != 2 or b1.shape != (w1.shape[0],) or w2.shape != (w1.shape[0],):
            raise DimensionMismatch(
                f"inconsistent weight shapes w1={w1.shape} b1={b1.shape} w2={w2.shape}"
            )
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "b2", float(self.b2))

    @property
    def input_count(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_count(self) -> int:
        return self.w1.shape[0]

    def all_finite(self) -> bool:
        return bool(
            np.isfinite(self.w1).all()
            and np.isfinite(self.b1).all()
            and np.isfinite(self.w2).all()
            and np.isfinite(self.b2)
        )

    def flat(self) -> np.ndarray:
        return np.concatenate([self.w1.ravel(), self.b1, self.w2, [self.b2]])

    @classmethod
    def from_flat(cls, theta, hidden: int, inputs: int) -> "WeightSet":
        theta = np.asarray(theta, dtype=np.float64)
        n1 = hidden * inputs
        return cls(
            theta[:n1].reshape(hidden, inputs),
            theta[n1 : n1 + hidden],
            theta[n1 + hidden : n1 + 2 * hidden],
            theta[-1],
        )

    def __eq__(self, other):
        # bit-level equality, so 0.0 != -0.0 and NaN payloads matter
        if not isinstance(other, WeightSet):
            return NotImplemented
        return self.flat().tobytes() == other.flat().tobytes() and (
            self.w1.shape == other.w1.shape
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ActivationRecord:
    hidden_outputs: np.ndarray
    final_output: float

    def __post_init__(self):
        object.__setattr__(self, "hidden_outputs", _frozen(self.hidden_outputs))
        object.__setattr__(self, "final_output", float(self.final_output))

    def as_vector(self) -> np.ndarray:
        """Hidden outputs followed by the final output."""
        return np.append(self.hidden_outputs, self.final_output)

    def __eq__(self, other):
        if not isinstance(other, ActivationRecord):
            return NotImplemented
        return self.as_vector().tobytes() == other.as_vector().tobytes()

    __hash__ = None


def sigmoid(x, lam: float = 1.0):
    """Unipolar sigmoid ``1 / (1 + exp(-lam * x))``; works on scalars and arrays."""
    with np.errstate(over="ignore", under="ignore"):
        out = 1.0 / (1.0 + np.exp(-lam * np.asarray(x, dtype=np.float64)))
    return float(out) if np.ndim(out) == 0 else out


def sigmoid_prime(s, lam: float = 1.0):
    """Slope of the sigmoid expressed through its own output ``s``."""
    s = np.asarray(s, dtype=np.float64)
    out = lam * s * (1.0 - s)
    return float(out) if np.ndim(out) == 0 else out


def init_weights(arch: Architecture, seed: int) -> WeightSet:
    """Draw every weight and bias from U[0, 1) using PCG64 seeded with ``seed``.

    Draw order is fixed (w1 row-major, b1, w2, b2) so a seed always maps to the
    same WeightSet.
    """
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 1.0, size=arch.parameter_count)
    return WeightSet.from_flat(theta, arch.hidden_count, arch.input_count)


def _check_input(weights: WeightSet, bits) -> np.ndarray:
    x = np.asarray(bits, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != weights.input_count:
        raise DimensionMismatch(
            f"input has {x.size} values, network expects {weights.input_count}"
        )
    return x


def _forward_raw(w1, b1, w2, b2, x, lam):
    h = sigmoid(w1 @ x + b1, lam)
    o = sigmoid(float(w2 @ h) + b2, lam)
    return h, o


def forward(weights: WeightSet, bits, lam: float = 1.0) -> ActivationRecord:
    x = _check_input(weights, bits)
    h, o = _forward_raw(weights.w1, weights.b1, weights.w2, weights.b2, x, lam)
    return ActivationRecord(h, o)
