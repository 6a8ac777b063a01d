import numpy as np
import pytest
from hypothesis import strategies as st

from neuroauth.guard import GuardConfig
from neuroauth.template import enroll
from neuroauth.trainer import TrainingConfig
from neuroauth.vault import create_profile

PRINTABLE = "".join(chr(c) for c in range(0x20, 0x7F))

# lambda=0.1 keeps hidden units out of saturation; see README.
SENSITIVE = TrainingConfig(lam=0.1)


def printable(min_size=1, max_size=64):
    return st.text(alphabet=PRINTABLE, min_size=min_size, max_size=max_size)


def random_password(rng: np.random.Generator, length: int) -> str:
    return "".join(chr(c) for c in rng.integers(0x20, 0x7F, length))


@pytest.fixture(scope="session")
def neural_template():
    return enroll("neural", TrainingConfig(seed=1, lam=0.1))


@pytest.fixture(scope="session")
def neural_template_default():
    return enroll("neural", TrainingConfig(seed=1))


@pytest.fixture
def profile_factory(tmp_path):
    def make(two=True, **guard):
        guard.setdefault("time_layer_enabled", False)
        resource = ["provider", "user42"] if two else ["user42"]
        return create_profile(
            resource, "reset-pw", TrainingConfig(seed=11, lam=0.1), GuardConfig(**guard),
            log_path=str(tmp_path / "intrusions.log"),
        )

    return make


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
