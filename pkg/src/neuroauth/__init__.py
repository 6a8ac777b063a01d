"""Password authentication backed by a per-password trained feedforward network."""

from .codec import decode_bits, encode_password, hidden_count
from .errors import *  # noqa: F401,F403
from .guard import (
    AttemptRecord,
    GuardConfig,
    GuardDecision,
    GuardState,
    Layer,
    evaluate_attempt,
    layer_of_failure,
)
from .network import ActivationRecord, Architecture, WeightSet, forward, init_weights, sigmoid, sigmoid_prime
from .template import EPS_MATCH, SaturationWarning, Stage, Template, VerifyOutcome, enroll, verify
from .trainer import LearningCurve, TrainingConfig, WeightGradient, compute_gradient, train
from .vault import (
    Profile,
    ServerPart,
    TokenPart,
    append_log,
    combine,
    create_profile,
    load_profile,
    read_log,
    reset_profile,
    save_profile,
    split_two_factor,
    verify_two_factor,
)

__version__ = "0.1.0"
