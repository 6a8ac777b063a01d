import os
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neuroauth import vault
from neuroauth.errors import (
    ChecksumMismatch,
    DimensionMismatch,
    IoFailure,
    MalformedField,
    MalformedLogLine,
    MissingToken,
    ResetDenied,
    SerializationOverflow,
    VersionUnsupported,
)
from neuroauth.guard import AttemptRecord, GuardConfig, GuardState, Layer
from neuroauth.network import Architecture, WeightSet
from neuroauth.template import Template, TrainingMeta, enroll, verify
from neuroauth.trainer import TrainingConfig

from .conftest import PRINTABLE, SENSITIVE, random_password

NOW = datetime(2026, 3, 4, 5, 6, 7, 890123, tzinfo=timezone.utc)

WEIRD = np.array([0.0, -0.0, 5e-324, -2.2250738585072014e-308, 1.7976931348623157e308, 0.1, 1 / 3])


def random_template(rng, lam):
    n_in = 7 * int(rng.integers(1, 6))
    n_hid = int(rng.integers(1, 8))

    def vals(*shape):
        a = rng.normal(0, 10, shape)
        mask = rng.random(shape) < 0.2
        a[mask] = rng.choice(WEIRD, mask.sum())
        return a

    w = WeightSet(vals(n_hid, n_in), vals(n_hid), vals(n_hid), float(vals(1)[0]))
    meta = TrainingMeta(
        eta=float(rng.uniform(0.01, 2)), epsilon=float(10.0 ** -rng.integers(3, 9)),
        seed=int(rng.integers(0, 2**63)) * 2 + 1, epochs=int(rng.integers(1, 10**6)),
        target=float(rng.uniform(0.1, 0.9)),
    )
    return Template(Architecture(n_in, n_hid, lam), w, rng.random(n_hid), float(rng.random()), meta)


def random_profile(rng):
    lam = float(rng.choice([1.0, 0.1, rng.uniform(0.01, 5)]))
    n = int(rng.integers(1, 3))
    slots = [random_template(rng, lam) for _ in range(n + 1)]
    if rng.random() < 0.3:
        k = int(rng.integers(0, n + 1))
        slots[k] = vault.split_two_factor(slots[k])[1]
    max_trials = int(rng.integers(1, 10))
    locked = bool(rng.random() < 0.5)
    state = GuardState(
        failed_count=max_trials + int(rng.integers(0, 5)) if locked else int(rng.integers(0, max_trials)),
        locked=locked,
        locked_at=NOW if locked else None,
    )
    cfg = GuardConfig(max_trials, int(rng.integers(0, 100)), int(rng.integers(100, 10**6)), bool(rng.random() < 0.5))
    return vault.Profile(tuple(slots[:-1]), slots[-1], cfg, state, f"logs/p{rng.integers(1000)} x.log", lam)


def assert_profiles_bit_equal(a, b):
    assert a == b
    for sa, sb in zip(a.slots, b.slots):
        assert type(sa) is type(sb)
        if isinstance(sa, Template):
            assert sa.weights.flat().tobytes() == sb.weights.flat().tobytes()
            assert sa.mapped_values.tobytes() == sb.mapped_values.tobytes()
    assert a.guard_state == b.guard_state and a.guard_config == b.guard_config
    assert a.lam == b.lam and a.log_path == b.log_path


def test_round_trip_randomized(tmp_path):
    rng = np.random.default_rng(5)
    for i in range(50):
        p = random_profile(rng)
        path = tmp_path / f"p{i}.profile"
        vault.save_profile(p, path)
        assert_profiles_bit_equal(vault.load_profile(path), p)


def test_file_layout(profile_factory, tmp_path):
    path = tmp_path / "p.profile"
    vault.save_profile(profile_factory(), path)
    text = path.read_text()
    lines = text.split("\n")
    assert lines[0] == "neuroauth-profile v1"
    assert lines[1] == "lambda = 3fb999999999999a"
    assert "template provider" in lines and "template user" in lines and "template reset" in lines
    assert lines[-2].startswith("checksum ") and len(lines[-2].split()[1]) == 16
    assert lines[-1] == ""
    assert "\r" not in text


def test_tamper_single_hex_digit(profile_factory, tmp_path):
    path = tmp_path / "p.profile"
    vault.save_profile(profile_factory(), path)
    text = path.read_text()
    i = text.index("w1 = ") + len("w1 = ") + 5
    flipped = "0" if text[i] != "0" else "1"
    path.write_text(text[:i] + flipped + text[i + 1 :])
    with pytest.raises(ChecksumMismatch):
        vault.load_profile(path)


def test_version_unsupported(profile_factory, tmp_path):
    path = tmp_path / "p.profile"
    vault.save_profile(profile_factory(), path)
    path.write_text(path.read_text().replace("neuroauth-profile v1", "neuroauth-profile v99", 1))
    with pytest.raises(VersionUnsupported):
        vault.load_profile(path)


def test_malformed_field_identifies_line(profile_factory):
    text = vault.dumps_profile(profile_factory())
    body = text[: text.rindex("checksum ")].replace("guard.max_trials = 3", "guard.max_trials = three")
    with pytest.raises(MalformedField) as exc:
        vault.loads_profile(vault._seal(body))
    assert exc.value.line == 3 and exc.value.key == "guard.max_trials"


def test_malformed_row_length(profile_factory):
    text = vault.dumps_profile(profile_factory())
    body = text[: text.rindex("checksum ")]
    i = body.index("b1 = ")
    j = body.index("\n", i)
    body = body[:i] + body[i:j].rsplit(" ", 1)[0] + body[j:]
    with pytest.raises(MalformedField) as exc:
        vault.loads_profile(vault._seal(body))
    assert exc.value.key == "b1"


def test_save_unwritable_path(profile_factory, tmp_path):
    with pytest.raises(IoFailure):
        vault.save_profile(profile_factory(), tmp_path / "missing-dir" / "p.profile")
    target = tmp_path / "adir"
    target.mkdir()
    with pytest.raises(IoFailure):
        vault.save_profile(profile_factory(), target)
    assert target.is_dir()


def test_non_finite_weight_rejected(tmp_path):
    rng = np.random.default_rng(0)
    tpl = random_template(rng, 1.0)
    w = tpl.weights
    bad = replace(tpl, weights=WeightSet(w.w1, w.b1, w.w2, float("nan")))
    p = vault.Profile((bad,), random_template(rng, 1.0), lam=1.0)
    with pytest.raises(SerializationOverflow):
        vault.save_profile(p, tmp_path / "p.profile")
    assert not (tmp_path / "p.profile").exists()


def test_interrupted_save_keeps_previous(profile_factory, tmp_path, monkeypatch):
    path = tmp_path / "p.profile"
    original = profile_factory()
    vault.save_profile(original, path)
    before = path.read_bytes()

    def boom(src, dst):
        raise OSError("simulated crash before rename")

    monkeypatch.setattr(vault.os, "replace", boom)
    locked = replace(original, guard_state=GuardState(3, True, NOW))
    with pytest.raises(IoFailure):
        vault.save_profile(locked, path)
    assert path.read_bytes() == before
    assert sorted(os.listdir(tmp_path)) == ["p.profile"]


def test_profile_lock_is_reentrant_across_calls(tmp_path):
    path = tmp_path / "p.profile"
    with vault.profile_lock(path):
        pass
    with vault.profile_lock(path):
        pass


# ---- two-factor ------------------------------------------------------------

@pytest.fixture(scope="module")
def neural_pair():
    a = enroll("neural", TrainingConfig(seed=1, lam=0.1))
    b = enroll("neural", TrainingConfig(seed=2, lam=0.1))
    return a, b


def test_split_combine_equivalence(neural_pair):
    tpl = neural_pair[0]
    token, server = vault.split_two_factor(tpl)
    assert vault.combine(token, server) == tpl
    rng = np.random.default_rng(8)
    candidates = ["neural", "meural", "neur"] + [random_password(rng, int(rng.integers(5, 8))) for _ in range(17)]
    for c in candidates:
        a, b = verify(tpl, c), vault.verify_two_factor(server, token, c)
        assert a.authenticated == b.authenticated and a.rejected_stage == b.rejected_stage
        assert a.diff_vector.tobytes() == b.diff_vector.tobytes()


def test_server_alone_refuses(neural_pair):
    _, server = vault.split_two_factor(neural_pair[0])
    with pytest.raises(MissingToken):
        vault.verify_two_factor(server, None, "neural")


def test_parts_hold_disjoint_fields(neural_pair):
    token, server = vault.split_two_factor(neural_pair[0])
    assert not hasattr(token, "w2") and not hasattr(token, "mapped_hidden")
    assert not hasattr(server, "w1") and not hasattr(server, "b1")


def test_dimension_mismatch():
    t42 = enroll("neural", SENSITIVE)
    t84 = enroll("architecture", SENSITIVE)
    token, _ = vault.split_two_factor(t42)
    _, server = vault.split_two_factor(t84)
    with pytest.raises(DimensionMismatch):
        vault.verify_two_factor(server, token, "architecture")


def test_token_from_other_enrollment_rejected(neural_pair):
    a, b = neural_pair
    token_b, _ = vault.split_two_factor(b)
    _, server_a = vault.split_two_factor(a)
    out = vault.verify_two_factor(server_a, token_b, "neural")
    assert not out.authenticated


def test_wrong_password_with_right_token(neural_pair):
    token, server = vault.split_two_factor(neural_pair[0])
    assert not vault.verify_two_factor(server, token, "signal").authenticated


def test_part_files_round_trip_and_tamper(neural_pair, tmp_path):
    token, server = vault.split_two_factor(neural_pair[0])
    vault.save_token(token, tmp_path / "t")
    vault.save_server(server, tmp_path / "s")
    assert (tmp_path / "t").read_text().startswith("neuroauth-token v1\n")
    t2, s2 = vault.load_token(tmp_path / "t"), vault.load_server(tmp_path / "s")
    assert t2 == token and s2 == server
    assert vault.verify_two_factor(s2, t2, "neural").authenticated
    text = (tmp_path / "t").read_text()
    i = text.index("b1 = ") + 6
    (tmp_path / "t").write_text(text[:i] + ("1" if text[i] == "0" else "0") + text[i + 1 :])
    with pytest.raises(ChecksumMismatch):
        vault.load_token(tmp_path / "t")


def test_in_memory_tamper_detected(neural_pair):
    token, server = vault.split_two_factor(neural_pair[0])
    forged = vault.TokenPart(token.input_count, token.hidden_count, token.w1 * 0.5, token.b1, token.checksum)
    with pytest.raises(ChecksumMismatch):
        vault.verify_two_factor(server, forged, "neural")


# ---- intrusion log ---------------------------------------------------------

def test_log_round_trip(tmp_path):
    path = tmp_path / "log"
    assert vault.read_log(path) == []
    recs = [
        AttemptRecord(NOW, Layer.ANN, "meural", 812),
        AttemptRecord(NOW.replace(second=8), Layer.LENGTH, "a|b\\c\n\t\x00é", 0),
        AttemptRecord(NOW.replace(second=9), Layer.TRAIL, " | ", 30000),
    ]
    for r in recs:
        vault.append_log(path, [r])
    back = vault.read_log(path)
    assert back == recs
    assert [r.timestamp for r in back] == sorted(r.timestamp for r in back)
    assert len(path.read_text().splitlines()) == 3


@settings(max_examples=200)
@given(st.text())
def test_escape_round_trip(s):
    esc = vault.escape_field(s)
    assert "|" not in esc.replace("\\|", "") and "\n" not in esc
    assert vault.unescape_field(esc) == s


@pytest.mark.parametrize("bad", ["pw\\q", "pw\\", "p|w", "\\x4"])
def test_malformed_log_line(tmp_path, bad):
    path = tmp_path / "log"
    good = vault.format_record(AttemptRecord(NOW, Layer.ANN, "ok", 1))
    path.write_text(f"{good}\n{vault.format_timestamp(NOW)} | ann | {bad} | 1\n")
    with pytest.raises(MalformedLogLine) as exc:
        vault.read_log(path)
    assert exc.value.line == 2


def test_log_line_format():
    line = vault.format_record(AttemptRecord(NOW, Layer.TIME, "x|y", 12))
    assert line == "2026-03-04T05:06:07.890123Z | time | x\\|y | 12"


# ---- reset -----------------------------------------------------------------

def test_reset_all_correct_reencrypts(profile_factory, tmp_path):
    p = replace(profile_factory(), guard_state=GuardState(3, True, NOW))
    fresh = vault.reset_profile(p, "user42", "reset-pw", provider_pw="provider", new_seed=999,
                                log_file=tmp_path / "log")
    assert fresh.guard_state == GuardState()
    for old, new, pw in zip(p.slots, fresh.slots, ["provider", "user42", "reset-pw"]):
        assert old.weights != new.weights
        assert old.mapped_values.tobytes() != new.mapped_values.tobytes()
        assert verify(new, pw).authenticated
    assert not (tmp_path / "log").exists()


def test_reset_new_passwords(profile_factory):
    p = profile_factory(two=False)
    fresh = vault.reset_profile(p, "user42", "reset-pw", new_seed=5, new_passwords=["brandnew", None])
    assert verify(fresh.resource_templates[0], "brandnew").authenticated
    assert not verify(fresh.resource_templates[0], "user42").authenticated
    assert verify(fresh.reset_template, "reset-pw").authenticated


@pytest.mark.parametrize("which", range(3))
def test_reset_any_wrong_password_denied(profile_factory, tmp_path, which):
    p = replace(profile_factory(), guard_state=GuardState(3, True, NOW))
    path = tmp_path / "p.profile"
    vault.save_profile(p, path)
    before = path.read_bytes()
    pws = ["provider", "user42", "reset-pw"]
    pws[which] = pws[which][:-1] + "!"
    with pytest.raises(ResetDenied) as exc:
        vault.reset_profile(p, pws[1], pws[2], provider_pw=pws[0], new_seed=1, log_file=tmp_path / "log", now=NOW)
    assert str(exc.value) == "reset denied"
    assert path.read_bytes() == before
    assert p.guard_state.locked
    logged = vault.read_log(tmp_path / "log")
    assert [r.attempted_password for r in logged] == [pws[which]]


def test_reset_missing_provider_denied(profile_factory):
    with pytest.raises(ResetDenied):
        vault.reset_profile(profile_factory(), "user42", "reset-pw", new_seed=1)


def test_reset_with_split_slot_needs_token(profile_factory):
    p = profile_factory(two=False)
    token, server = vault.split_two_factor(p.resource_templates[0])
    split = p.with_slot("user", server)
    with pytest.raises(ResetDenied):
        vault.reset_profile(split, "user42", "reset-pw", new_seed=3)
    fresh = vault.reset_profile(split, "user42", "reset-pw", new_seed=3, tokens={"user": token})
    assert isinstance(fresh.resource_templates[0], Template)
