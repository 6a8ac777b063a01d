"""Four-layer access guard: trail -> length -> time -> ANN.

Layers run strictly in order and stop at the first failure. Every failed
request bumps the failure counter and produces one AttemptRecord per failing
candidate; reaching ``max_trials`` locks the profile until a reset.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Callable, Sequence

from .codec import check_password
from .errors import InvalidConfig, UnsupportedCharacter
from .template import Template, VerifyOutcome, length_matches, verify


class Layer(str, enum.Enum):
    TRAIL = "trail"
    LENGTH = "length"
    TIME = "time"
    ANN = "ann"


GRANTED = "granted"
DENIED = "denied"


@dataclass(frozen=True)
class GuardConfig:
    max_trials: int = 3
    time_min_ms: int = 50
    time_max_ms: int = 30_000
    time_layer_enabled: bool = True

    def __post_init__(self):
        if self.max_trials < 1:
            raise InvalidConfig("max_trials must be >= 1")
        if self.time_min_ms < 0 or not self.time_min_ms < self.time_max_ms:
            raise InvalidConfig(
                f"time window must satisfy 0 <= min < max, got [{self.time_min_ms}, {self.time_max_ms}]"
            )


@dataclass(frozen=True)
class GuardState:
    failed_count: int = 0
    locked: bool = False
    locked_at: datetime | None = None


@dataclass(frozen=True)
class AttemptRecord:
    timestamp: datetime
    failed_layer: Layer
    attempted_password: str
    insertion_ms: int


@dataclass(frozen=True)
class GuardDecision:
    outcome: str
    failed_layer: Layer | None = None
    intruder_declared: bool = False

    @property
    def granted(self) -> bool:
        return self.outcome == GRANTED


def layer_of_failure(decision: GuardDecision) -> Layer | None:
    return decision.failed_layer


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _candidate_length_ok(template: Template, candidate: str) -> bool:
    if not length_matches(template, candidate):
        return False
    try:
        check_password(candidate)
    except UnsupportedCharacter:
        return False
    return True


def evaluate_attempt(
    state: GuardState,
    config: GuardConfig,
    templates: Sequence[Template],
    passwords: Sequence[str],
    insertion_ms: Sequence[int],
    *,
    verifier: Callable[[Template, str], VerifyOutcome] = verify,
    now: datetime | None = None,
) -> tuple[GuardDecision, GuardState, list[AttemptRecord]]:
    """Run one access request through the four layers.

    ``verifier`` is the ANN layer; tests swap in a counting wrapper to observe
    that inner layers are skipped. Returns the decision, the new state and the
    records to append to the intrusion log (empty on success).
    """
    now = now or _utcnow()
    passwords = list(passwords)
    timings = list(insertion_ms)
    if len(timings) < len(passwords):
        timings += [0] * (len(passwords) - len(timings))

    def deny(layer: Layer, failing: Sequence[int]):
        count = state.failed_count + 1
        declare = not state.locked and count >= config.max_trials
        new_state = GuardState(
            failed_count=count,
            locked=state.locked or declare,
            locked_at=now if declare else state.locked_at,
        )
        records = [AttemptRecord(now, layer, passwords[i], max(0, int(timings[i]))) for i in failing]
        return GuardDecision(DENIED, layer, declare), new_state, records

    everyone = range(len(passwords))

    if state.locked:
        return deny(Layer.TRAIL, everyone)

    if len(passwords) != len(templates):
        return deny(Layer.LENGTH, everyone)
    bad = [i for i, (t, p) in enumerate(zip(templates, passwords)) if not _candidate_length_ok(t, p)]
    if bad:
        return deny(Layer.LENGTH, bad)

    if config.time_layer_enabled:
        bad = [i for i in everyone if not config.time_min_ms <= timings[i] <= config.time_max_ms]
        if bad:
            return deny(Layer.TIME, bad)

    bad = [i for i, (t, p) in enumerate(zip(templates, passwords)) if not verifier(t, p).authenticated]
    if bad:
        return deny(Layer.ANN, bad)

    return GuardDecision(GRANTED), replace(state, failed_count=0), []


def cleared_state() -> GuardState:
    return GuardState()
