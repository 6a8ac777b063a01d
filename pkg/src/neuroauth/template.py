"""Enrollment and verification against stored mapped values."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .codec import check_password, encode_password, encoded_length
from .network import ActivationRecord, Architecture, WeightSet, _frozen, forward
from .trainer import TrainingConfig, train

#: Largest per-node difference still accepted as a match.
EPS_MATCH = 1e-12

#: Below this hidden-layer slope a one-bit change moves the mapped values by
#: less than ~1e4 * EPS_MATCH, leaving a thin margin against false accepts.
SATURATION_SLOPE = 1e-8


class SaturationWarning(UserWarning):
    """The enrolled hidden layer is saturated; consider a smaller lambda."""


class Stage(str, enum.Enum):
    LENGTH = "length"
    MAPPED = "mapped-values"
    NONE = "none"


@dataclass(frozen=True)
class TrainingMeta:
    eta: float
    epsilon: float
    seed: int
    epochs: int
    target: float = 0.5

    def config(self, lam: float, max_epochs: int = 100_000, seed: int | None = None) -> TrainingConfig:
        return TrainingConfig(
            eta=self.eta,
            target=self.target,
            epsilon=self.epsilon,
            max_epochs=max_epochs,
            seed=self.seed if seed is None else seed,
            lam=lam,
        )


@dataclass(frozen=True, eq=False)
class Template:
    """Trained weights plus the activations they produce for the enrolled password."""

    architecture: Architecture
    weights: WeightSet
    mapped_hidden: np.ndarray
    mapped_final: float
    meta: TrainingMeta

    def __post_init__(self):
        object.__setattr__(self, "mapped_hidden", _frozen(self.mapped_hidden))
        object.__setattr__(self, "mapped_final", float(self.mapped_final))

    @property
    def mapped_values(self) -> np.ndarray:
        return np.append(self.mapped_hidden, self.mapped_final)

    def __eq__(self, other):
        if not isinstance(other, Template):
            return NotImplemented
        return (
            self.architecture == other.architecture
            and self.weights == other.weights
            and self.mapped_values.tobytes() == other.mapped_values.tobytes()
            and self.meta == other.meta
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class VerifyOutcome:
    authenticated: bool
    diff_vector: np.ndarray
    rejected_stage: Stage

    @property
    def max_diff(self) -> float:
        return float(self.diff_vector.max()) if self.diff_vector.size else float("nan")


def enroll(password: str, config: TrainingConfig | None = None) -> Template:
    return enroll_with_curve(password, config)[0]


def enroll_with_curve(password: str, config: TrainingConfig | None = None):
    """Like :func:`enroll` but also returns the learning curve."""
    config = config or TrainingConfig()
    bits = encode_password(password)
    arch = Architecture.for_input(bits.size, config.lam)
    weights, curve = train(bits, config, arch)
    act = forward(weights, bits, arch.lam)
    slope = float(np.max(arch.lam * act.hidden_outputs * (1.0 - act.hidden_outputs)))
    if slope < SATURATION_SLOPE:
        warnings.warn(
            f"hidden layer saturated (max slope {slope:.1e}) for a {len(password)}-character "
            f"password at lambda={arch.lam}; wrong passwords may differ by less than "
            f"{SATURATION_SLOPE:.0e}",
            SaturationWarning,
            stacklevel=3,
        )
    meta = TrainingMeta(config.eta, config.epsilon, config.seed, len(curve), config.target)
    return Template(arch, weights, act.hidden_outputs, act.final_output, meta), curve


def compare(template: Template, act: ActivationRecord) -> VerifyOutcome:
    diff = np.abs(act.as_vector() - template.mapped_values)
    ok = bool(np.all(diff <= EPS_MATCH))
    return VerifyOutcome(ok, diff, Stage.NONE if ok else Stage.MAPPED)


def length_matches(template: Template, candidate: str) -> bool:
    return encoded_length(candidate) == template.architecture.input_count


def verify(template: Template, candidate: str) -> VerifyOutcome:
    """Check ``candidate`` against the template. Never retrains.

    The length check runs before any forward pass. A candidate with characters
    the encoder refuses raises :class:`UnsupportedCharacter`.
    """
    if not length_matches(template, candidate):
        return VerifyOutcome(False, np.empty(0), Stage.LENGTH)
    check_password(candidate)
    act = forward(template.weights, encode_password(candidate), template.architecture.lam)
    return compare(template, act)


def retrain(template: Template, password: str, seed: int, max_epochs: int = 100_000) -> Template:
    """Re-enroll ``password`` with the template's hyperparameters and a new seed."""
    cfg = template.meta.config(template.architecture.lam, max_epochs=max_epochs, seed=seed)
    return enroll(password, cfg)


__all__ = [
    "EPS_MATCH",
    "SATURATION_SLOPE",
    "SaturationWarning",
    "Stage",
    "Template",
    "TrainingMeta",
    "VerifyOutcome",
    "compare",
    "enroll",
    "enroll_with_curve",
    "length_matches",
    "retrain",
    "verify",
]
