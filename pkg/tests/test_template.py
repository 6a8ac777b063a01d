import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import neuroauth.template as template_mod
from neuroauth.errors import EmptyPassword, UnsupportedCharacter
from neuroauth.network import forward
from neuroauth.codec import encode_password
from neuroauth.template import EPS_MATCH, SaturationWarning, Stage, enroll, verify

from .conftest import PRINTABLE, SENSITIVE, random_password


def test_paper_architectures(neural_template):
    a = neural_template.architecture
    assert (a.input_count, a.hidden_count) == (42, 13)
    arch = enroll("architecture", SENSITIVE).architecture
    assert (arch.input_count, arch.hidden_count) == (84, 25)


def test_empty_password():
    with pytest.raises(EmptyPassword):
        enroll("")


def test_mapped_values_reproduce(neural_template):
    act = forward(neural_template.weights, encode_password("neural"), neural_template.architecture.lam)
    assert act.hidden_outputs.tobytes() == neural_template.mapped_hidden.tobytes()
    assert act.final_output == neural_template.mapped_final
    assert abs(0.5 - neural_template.mapped_final) < neural_template.meta.epsilon


def test_correct_password_authenticates(neural_template):
    out = verify(neural_template, "neural")
    assert out.authenticated and out.rejected_stage is Stage.NONE
    assert out.diff_vector.shape == (14,)
    assert np.all(out.diff_vector <= EPS_MATCH)


@pytest.mark.parametrize("candidate", ["meural", "signal", "neurba"])
def test_wrong_passwords_rejected(neural_template, candidate):
    out = verify(neural_template, candidate)
    assert not out.authenticated
    assert out.rejected_stage is Stage.MAPPED
    assert out.max_diff > EPS_MATCH


@pytest.mark.parametrize("candidate", ["meural", "signal"])
def test_wrong_passwords_rejected_at_default_lambda(neural_template_default, candidate):
    out = verify(neural_template_default, candidate)
    assert not out.authenticated and out.max_diff > EPS_MATCH


def test_length_rejection_skips_forward(neural_template, monkeypatch):
    calls = []
    monkeypatch.setattr(template_mod, "forward", lambda *a, **k: calls.append(a))
    out = verify(neural_template, "neur")
    assert out.rejected_stage is Stage.LENGTH
    assert out.diff_vector.size == 0
    assert calls == []


def test_unsupported_character_in_candidate(neural_template):
    with pytest.raises(UnsupportedCharacter):
        verify(neural_template, "neur\tl")


def test_final_difference_is_last(neural_template):
    out = verify(neural_template, "signal")
    act = forward(neural_template.weights, encode_password("signal"), 0.1)
    assert out.diff_vector[-1] == abs(act.final_output - neural_template.mapped_final)


def test_verify_does_not_mutate(neural_template):
    before = (neural_template.weights.flat().tobytes(), neural_template.mapped_values.tobytes())
    for c in ["neural", "signal", "x"]:
        verify(neural_template, c)
    after = (neural_template.weights.flat().tobytes(), neural_template.mapped_values.tobytes())
    assert before == after


def test_saturation_warning_at_default_lambda():
    with pytest.warns(SaturationWarning):
        enroll("architecture", template_mod.TrainingConfig(seed=2))
    with warnings.catch_warnings():
        warnings.simplefilter("error", SaturationWarning)
        enroll("architecture", SENSITIVE)


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet=PRINTABLE, min_size=2, max_size=20), st.integers(0, 2**32))
def test_completeness(pw, seed):
    tpl = enroll(pw, template_mod.TrainingConfig(lam=0.1, seed=seed))
    assert verify(tpl, pw).authenticated


def test_same_length_distinguishing():
    rng = np.random.default_rng(77)
    near_misses = []
    for k in range(5):
        pw = random_password(rng, int(rng.integers(2, 13)))
        tpl = enroll(pw, template_mod.TrainingConfig(lam=0.1, seed=k))
        for _ in range(100):
            c = random_password(rng, len(pw))
            if c == pw:
                continue
            out = verify(tpl, c)
            assert not out.authenticated
            near_misses.append(out.max_diff)
    print(f"smallest max-diff among wrong candidates: {min(near_misses):.3e}")


@pytest.mark.parametrize("pw", ["neural", "abc", "x9!Q"])
def test_single_character_sensitivity(pw):
    rng = np.random.default_rng(len(pw))
    tpl = enroll(pw, SENSITIVE)
    for pos in range(len(pw)):
        choices = [c for c in PRINTABLE if c != pw[pos]]
        for c in rng.choice(choices, 10, replace=False):
            cand = pw[:pos] + c + pw[pos + 1 :]
            assert not verify(tpl, cand).authenticated, cand
