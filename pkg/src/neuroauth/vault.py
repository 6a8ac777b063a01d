"""Durable state: profile files, reset protocol, two-factor split, intrusion log.

File formats are line-oriented UTF-8 with LF endings. Every real number is
written as the 16 hex digits of its big-endian IEEE-754 binary64 encoding, so a
save/load round trip reproduces each float bit for bit. The last line of a
profile, token or server file is ``checksum <16 hex>``: a 64-bit BLAKE2b digest
of all preceding bytes. It detects corruption and casual tampering; it is not a
MAC.
"""

from __future__ import annotations

import fcntl
import hashlib
import os
import struct
import tempfile
import unicodedata
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
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
from .guard import AttemptRecord, GuardConfig, GuardState, Layer
from .network import Architecture, WeightSet, _frozen
from .template import Stage, Template, TrainingMeta, VerifyOutcome, enroll, verify
from .trainer import MAX_SEED, TrainingConfig

PROFILE_MAGIC = "neuroauth-profile"
TOKEN_MAGIC = "neuroauth-token"
SERVER_MAGIC = "neuroauth-server"
FORMAT_VERSION = "v1"

ROLES_ONE = ("user",)
ROLES_TWO = ("provider", "user")
RESET_ROLE = "reset"

_TS_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"


# --------------------------------------------------------------------------- #
# primitives

def float_to_hex(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise SerializationOverflow(f"cannot serialize non-finite value {x!r}")
    return struct.pack(">d", x).hex()


def hex_to_float(s: str) -> float:
    if len(s) != 16:
        raise ValueError(f"expected 16 hex digits, got {s!r}")
    value = struct.unpack(">d", bytes.fromhex(s))[0]
    if not np.isfinite(value):
        raise ValueError(f"non-finite value {s}")
    return value


def checksum(data: bytes) -> str:
    return hashlib.blake2b(data, digest_size=8).hexdigest()


def _row(values) -> str:
    return " ".join(float_to_hex(v) for v in np.ravel(values))


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime(_TS_FORMAT)


def parse_timestamp(s: str) -> datetime:
    return datetime.strptime(s, _TS_FORMAT).replace(tzinfo=timezone.utc)


def _seal(body: str) -> str:
    return body + f"checksum {checksum(body.encode('utf-8'))}\n"


def atomic_write_text(path, text: str) -> None:
    """Write via a temp sibling + fsync + rename so readers never see a torn file."""
    path = Path(path)
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        tmp = None
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    finally:
        if tmp is not None:
            try:
                os.unlink(tmp)
            except OSError:
                pass


def _read_text(path) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


@contextmanager
def profile_lock(path):
    """Exclusive advisory lock for one profile (``<path>.lock``) for state-mutating commands."""
    lock_path = Path(str(path) + ".lock")
    try:
        fh = open(lock_path, "a")
    except OSError as exc:
        raise IoFailure(f"cannot open lock file {lock_path}: {exc}") from exc
    with fh:
        fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)


# --------------------------------------------------------------------------- #
# two-factor parts

@dataclass(frozen=True, eq=False)
class TokenPart:
    """Hidden-layer weights; lives on the user's device."""

    input_count: int
    hidden_count: int
    w1: np.ndarray
    b1: np.ndarray
    checksum: str = ""

    def __post_init__(self):
        object.__setattr__(self, "w1", _frozen(self.w1))
        object.__setattr__(self, "b1", _frozen(self.b1))
        if self.w1.shape != (self.hidden_count, self.input_count) or self.b1.shape != (self.hidden_count,):
            raise DimensionMismatch("token arrays disagree with declared dims")
        if not self.checksum:
            object.__setattr__(self, "checksum", self.computed_checksum())

    def body(self) -> str:
        lines = [
            f"{TOKEN_MAGIC} {FORMAT_VERSION}",
            f"input_count = {self.input_count}",
            f"hidden_count = {self.hidden_count}",
        ]
        lines += [f"w1 = {_row(r)}" for r in self.w1]
        lines.append(f"b1 = {_row(self.b1)}")
        return "\n".join(lines) + "\n"

    def computed_checksum(self) -> str:
        return checksum(self.body().encode("utf-8"))

    def intact(self) -> bool:
        return self.checksum == self.computed_checksum()

    def __eq__(self, other):
        if not isinstance(other, TokenPart):
            return NotImplemented
        return self.body() == other.body() and self.checksum == other.checksum

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ServerPart:
    """Output-layer weights and mapped values; stays with the resource."""

    input_count: int
    hidden_count: int
    lam: float
    w2: np.ndarray
    b2: float
    mapped_hidden: np.ndarray
    mapped_final: float
    meta: TrainingMeta
    checksum: str = ""

    def __post_init__(self):
        for name in ("w2", "mapped_hidden"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "b2", float(self.b2))
        object.__setattr__(self, "mapped_final", float(self.mapped_final))
        if self.w2.shape != (self.hidden_count,) or self.mapped_hidden.shape != (self.hidden_count,):
            raise DimensionMismatch("server arrays disagree with declared dims")
        if not self.checksum:
            object.__setattr__(self, "checksum", self.computed_checksum())

    @property
    def architecture(self) -> Architecture:
        return Architecture(self.input_count, self.hidden_count, self.lam)

    def body(self) -> str:
        lines = [
            f"{SERVER_MAGIC} {FORMAT_VERSION}",
            f"input_count = {self.input_count}",
            f"hidden_count = {self.hidden_count}",
            f"lambda = {float_to_hex(self.lam)}",
            *_meta_lines(self.meta),
            *_server_lines(self),
        ]
        return "\n".join(lines) + "\n"

    def computed_checksum(self) -> str:
        return checksum(self.body().encode("utf-8"))

    def intact(self) -> bool:
        return self.checksum == self.computed_checksum()

    def __eq__(self, other):
        if not isinstance(other, ServerPart):
            return NotImplemented
        return self.body() == other.body() and self.checksum == other.checksum

    __hash__ = None


def split_two_factor(template: Template) -> tuple[TokenPart, ServerPart]:
    a, w = template.architecture, template.weights
    token = TokenPart(a.input_count, a.hidden_count, w.w1, w.b1)
    server = ServerPart(
        a.input_count, a.hidden_count, a.lam, w.w2, w.b2,
        template.mapped_hidden, template.mapped_final, template.meta,
    )
    return token, server


def combine(token: TokenPart | None, server: ServerPart) -> Template:
    if token is None:
        raise MissingToken("hidden-layer weights are held on the user token; none supplied")
    for part in (token, server):
        if not part.intact():
            raise ChecksumMismatch(f"{type(part).__name__} checksum does not match its contents")
    if (token.input_count, token.hidden_count) != (server.input_count, server.hidden_count):
        raise DimensionMismatch(
            f"token dims {token.input_count}/{token.hidden_count} do not match "
            f"server dims {server.input_count}/{server.hidden_count}"
        )
    weights = WeightSet(token.w1, token.b1, server.w2, server.b2)
    return Template(server.architecture, weights, server.mapped_hidden, server.mapped_final, server.meta)


def verify_two_factor(server: ServerPart, token: TokenPart | None, candidate: str) -> VerifyOutcome:
    return verify(combine(token, server), candidate)


# --------------------------------------------------------------------------- #
# profile

Slot = Template | ServerPart


@dataclass(frozen=True, eq=False)
class Profile:
    resource_templates: tuple[Slot, ...]
    reset_template: Slot
    guard_config: GuardConfig = field(default_factory=GuardConfig)
    guard_state: GuardState = field(default_factory=GuardState)
    log_path: str = "intrusions.log"
    lam: float = 1.0
    version: str = FORMAT_VERSION

    def __post_init__(self):
        object.__setattr__(self, "resource_templates", tuple(self.resource_templates))
        if not 1 <= len(self.resource_templates) <= 2:
            raise ValueError("a profile holds one or two resource templates")
        if "\n" in self.log_path or not self.log_path.strip():
            raise ValueError("log_path must be a single non-empty line")

    @property
    def resource_roles(self) -> tuple[str, ...]:
        return ROLES_TWO if len(self.resource_templates) == 2 else ROLES_ONE

    @property
    def roles(self) -> tuple[str, ...]:
        return self.resource_roles + (RESET_ROLE,)

    @property
    def slots(self) -> tuple[Slot, ...]:
        return self.resource_templates + (self.reset_template,)

    def slot(self, role: str) -> Slot:
        return dict(zip(self.roles, self.slots))[role]

    def with_slot(self, role: str, value: Slot) -> "Profile":
        if role == RESET_ROLE:
            return replace(self, reset_template=value)
        slots = list(self.resource_templates)
        slots[self.resource_roles.index(role)] = value
        return replace(self, resource_templates=tuple(slots))

    def resolve_log_path(self, profile_path=None) -> Path:
        p = Path(self.log_path)
        if not p.is_absolute() and profile_path is not None:
            p = Path(profile_path).parent / p
        return p

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return dumps_profile(self) == dumps_profile(other)

    __hash__ = None


def create_profile(
    resource_passwords: Sequence[str],
    reset_password: str,
    config=None,
    guard_config: GuardConfig | None = None,
    log_path: str = "intrusions.log",
) -> Profile:
    """Enroll every password. Role ``i`` (provider/user then reset) trains with seed ``seed + i``."""
    config = config or TrainingConfig()
    passwords = list(resource_passwords) + [reset_password]
    templates = [
        enroll(pw, replace(config, seed=(config.seed + i) % (MAX_SEED + 1)))
        for i, pw in enumerate(passwords)
    ]
    return Profile(
        tuple(templates[:-1]), templates[-1], guard_config or GuardConfig(), GuardState(),
        log_path, config.lam,
    )


def _meta_lines(meta: TrainingMeta) -> list[str]:
    return [
        f"eta = {float_to_hex(meta.eta)}",
        f"epsilon = {float_to_hex(meta.epsilon)}",
        f"target = {float_to_hex(meta.target)}",
        f"seed = {meta.seed}",
        f"epochs = {meta.epochs}",
    ]


def _server_lines(p) -> list[str]:
    return [
        f"w2 = {_row(p.w2)}",
        f"b2 = {float_to_hex(p.b2)}",
        f"mapped_hidden = {_row(p.mapped_hidden)}",
        f"mapped_final = {float_to_hex(p.mapped_final)}",
    ]


def _slot_lines(role: str, slot: Slot) -> list[str]:
    arch = slot.architecture
    lines = [
        f"template {role}",
        f"input_count = {arch.input_count}",
        f"hidden_count = {arch.hidden_count}",
        *_meta_lines(slot.meta),
    ]
    if isinstance(slot, ServerPart):
        lines.append("token = external")
        lines += _server_lines(slot)
    else:
        w = slot.weights
        lines.append("token = embedded")
        lines += [f"w1 = {_row(r)}" for r in w.w1]
        lines.append(f"b1 = {_row(w.b1)}")
        lines += _server_lines(_ServerView(w.w2, w.b2, slot.mapped_hidden, slot.mapped_final))
    return lines


@dataclass
class _ServerView:
    w2: np.ndarray
    b2: float
    mapped_hidden: np.ndarray
    mapped_final: float


def dumps_profile(profile: Profile) -> str:
    for slot in profile.slots:
        if slot.architecture.lam != profile.lam:
            raise ValueError("all templates in a profile must share the profile lambda")
        if isinstance(slot, Template) and not slot.weights.all_finite():
            raise SerializationOverflow("template contains a non-finite weight")
    gc, gs = profile.guard_config, profile.guard_state
    lines = [
        f"{PROFILE_MAGIC} {profile.version}",
        f"lambda = {float_to_hex(profile.lam)}",
        f"guard.max_trials = {gc.max_trials}",
        f"guard.time_min_ms = {gc.time_min_ms}",
        f"guard.time_max_ms = {gc.time_max_ms}",
        f"guard.time_layer_enabled = {str(gc.time_layer_enabled).lower()}",
        f"guard.failed_count = {gs.failed_count}",
        f"guard.locked = {str(gs.locked).lower()}",
        f"guard.locked_at = {format_timestamp(gs.locked_at) if gs.locked_at else 'none'}",
        f"log_path = {profile.log_path}",
    ]
    for role, slot in zip(profile.roles, profile.slots):
        lines += _slot_lines(role, slot)
    return _seal("\n".join(lines) + "\n")


def save_profile(profile: Profile, path) -> None:
    atomic_write_text(path, dumps_profile(profile))


# --------------------------------------------------------------------------- #
# parsing

class _Reader:
    """Sequential ``key = value`` reader that reports 1-based line numbers."""

    def __init__(self, lines: list[str], start: int):
        self.lines = lines
        self.i = start

    @property
    def lineno(self) -> int:
        return self.i + 1

    def peek_key(self) -> str | None:
        if self.i >= len(self.lines):
            return None
        return self.lines[self.i].split("=", 1)[0].strip()

    def raw(self, what: str) -> str:
        if self.i >= len(self.lines):
            raise MalformedField(self.lineno, what, "unexpected end of file")
        line = self.lines[self.i]
        self.i += 1
        return line

    def value(self, key: str) -> str:
        line = self.raw(key)
        k, sep, v = line.partition(" = ")
        if not sep or k != key:
            raise MalformedField(self.i, key, f"expected '{key} = ...', found {line!r}")
        return v

    def _convert(self, key, v, fn):
        try:
            return fn(v)
        except (ValueError, TypeError) as exc:
            raise MalformedField(self.i, key, str(exc)) from None

    def int(self, key: str, lo: int = 0, hi: int | None = None) -> int:
        v = self.value(key)
        n = self._convert(key, v, lambda s: int(s, 10))
        if n < lo or (hi is not None and n > hi) or not v.isdigit():
            raise MalformedField(self.i, key, f"integer out of range: {v}")
        return n

    def real(self, key: str) -> float:
        return self._convert(key, self.value(key), hex_to_float)

    def reals(self, key: str, n: int) -> np.ndarray:
        v = self.value(key)
        parts = v.split(" ")
        if len(parts) != n:
            raise MalformedField(self.i, key, f"expected {n} values, found {len(parts)}")
        return np.array([self._convert(key, p, hex_to_float) for p in parts])

    def boolean(self, key: str) -> bool:
        v = self.value(key)
        if v not in ("true", "false"):
            raise MalformedField(self.i, key, f"expected true/false, got {v!r}")
        return v == "true"


def _split_sealed(text: str, magic: str) -> tuple[list[str], str]:
    """Check header version and checksum; return body lines."""
    if not text.endswith("\n"):
        raise MalformedField(text.count("\n") + 1, "checksum", "file must end with a newline")
    lines = text[:-1].split("\n")
    header = lines[0].split(" ")
    if len(header) != 2 or header[0] != magic:
        raise MalformedField(1, "header", f"expected '{magic} {FORMAT_VERSION}'")
    if header[1] != FORMAT_VERSION:
        raise VersionUnsupported(f"unsupported format version {header[1]!r}")
    last = lines[-1]
    if len(lines) < 2 or not last.startswith("checksum "):
        raise MalformedField(len(lines), "checksum", "missing checksum line")
    body = text[: len(text) - len(last) - 1]
    if checksum(body.encode("utf-8")) != last[len("checksum "):]:
        raise ChecksumMismatch("stored checksum does not match file contents")
    return lines[:-1], last[len("checksum "):]


def _read_meta(r: _Reader) -> TrainingMeta:
    return TrainingMeta(
        eta=r.real("eta"),
        epsilon=r.real("epsilon"),
        target=r.real("target"),
        seed=r.int("seed", 0, MAX_SEED),
        epochs=r.int("epochs"),
    )


def _read_slot(r: _Reader, role: str, lam: float) -> Slot:
    line = r.raw("template")
    if line != f"template {role}":
        raise MalformedField(r.i, "template", f"expected 'template {role}', found {line!r}")
    n_in = r.int("input_count", 1)
    n_hid = r.int("hidden_count", 1)
    meta = _read_meta(r)
    mode = r.value("token")
    if mode not in ("embedded", "external"):
        raise MalformedField(r.i, "token", f"expected embedded/external, got {mode!r}")
    if mode == "embedded":
        w1 = np.stack([r.reals("w1", n_in) for _ in range(n_hid)])
        b1 = r.reals("b1", n_hid)
    w2 = r.reals("w2", n_hid)
    b2 = r.real("b2")
    mh = r.reals("mapped_hidden", n_hid)
    mf = r.real("mapped_final")
    try:
        arch = Architecture(n_in, n_hid, lam)
        if mode == "external":
            return ServerPart(n_in, n_hid, lam, w2, b2, mh, mf, meta)
        return Template(arch, WeightSet(w1, b1, w2, b2), mh, mf, meta)
    except ValueError as exc:
        raise MalformedField(r.i, "template", str(exc)) from None


def loads_profile(text: str) -> Profile:
    lines, _ = _split_sealed(text, PROFILE_MAGIC)
    r = _Reader(lines, 1)
    lam = r.real("lambda")
    try:
        gc = GuardConfig(
            max_trials=r.int("guard.max_trials", 1),
            time_min_ms=r.int("guard.time_min_ms"),
            time_max_ms=r.int("guard.time_max_ms"),
            time_layer_enabled=r.boolean("guard.time_layer_enabled"),
        )
    except ValueError as exc:
        if isinstance(exc, MalformedField):
            raise
        raise MalformedField(r.i, "guard", str(exc)) from None
    failed = r.int("guard.failed_count")
    locked = r.boolean("guard.locked")
    raw_ts = r.value("guard.locked_at")
    locked_at = None if raw_ts == "none" else r._convert("guard.locked_at", raw_ts, parse_timestamp)
    if locked and failed < gc.max_trials:
        raise MalformedField(r.i, "guard.failed_count", "locked profile below max_trials")
    log_path = r.value("log_path")

    # count template blocks to learn the profile shape
    n_blocks = sum(1 for line in lines if line.startswith("template "))
    if n_blocks not in (2, 3):
        raise MalformedField(r.lineno, "template", f"expected 2 or 3 template blocks, found {n_blocks}")
    roles = (ROLES_TWO if n_blocks == 3 else ROLES_ONE) + (RESET_ROLE,)
    slots = [_read_slot(r, role, lam) for role in roles]
    if r.i != len(lines):
        raise MalformedField(r.lineno, "checksum", "unexpected trailing content")
    return Profile(
        tuple(slots[:-1]), slots[-1], gc, GuardState(failed, locked, locked_at), log_path, lam
    )


def load_profile(path) -> Profile:
    return loads_profile(_read_text(path))


def loads_token(text: str) -> TokenPart:
    lines, digest = _split_sealed(text, TOKEN_MAGIC)
    r = _Reader(lines, 1)
    n_in = r.int("input_count", 1)
    n_hid = r.int("hidden_count", 1)
    w1 = np.stack([r.reals("w1", n_in) for _ in range(n_hid)])
    b1 = r.reals("b1", n_hid)
    if r.i != len(lines):
        raise MalformedField(r.lineno, "checksum", "unexpected trailing content")
    return TokenPart(n_in, n_hid, w1, b1, digest)


def loads_server(text: str) -> ServerPart:
    lines, digest = _split_sealed(text, SERVER_MAGIC)
    r = _Reader(lines, 1)
    n_in = r.int("input_count", 1)
    n_hid = r.int("hidden_count", 1)
    lam = r.real("lambda")
    meta = _read_meta(r)
    w2 = r.reals("w2", n_hid)
    b2 = r.real("b2")
    mh = r.reals("mapped_hidden", n_hid)
    mf = r.real("mapped_final")
    if r.i != len(lines):
        raise MalformedField(r.lineno, "checksum", "unexpected trailing content")
    return ServerPart(n_in, n_hid, lam, w2, b2, mh, mf, meta, digest)


def save_token(token: TokenPart, path) -> None:
    atomic_write_text(path, _seal(token.body()))


def save_server(server: ServerPart, path) -> None:
    atomic_write_text(path, _seal(server.body()))


def load_token(path) -> TokenPart:
    return loads_token(_read_text(path))


def load_server(path) -> ServerPart:
    return loads_server(_read_text(path))


# --------------------------------------------------------------------------- #
# intrusion log

_ESCAPES = {"\\": "\\\\", "|": "\\|", "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", "|": "|", "n": "\n", "r": "\r", "t": "\t"}


def escape_field(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif unicodedata.category(ch) == "Cc":
            out.append(f"\\x{ord(ch):02x}" if ord(ch) < 0x100 else f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def unescape_field(text: str, lineno: int = 0) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "|":
            raise MalformedLogLine(lineno, "unescaped '|' in password field")
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(text):
            raise MalformedLogLine(lineno, "dangling backslash")
        nxt = text[i + 1]
        if nxt in _UNESCAPES:
            out.append(_UNESCAPES[nxt])
            i += 2
        elif nxt in "xu":
            width = 2 if nxt == "x" else 4
            digits = text[i + 2 : i + 2 + width]
            if len(digits) != width or any(c not in "0123456789abcdef" for c in digits):
                raise MalformedLogLine(lineno, f"invalid \\{nxt} escape")
            out.append(chr(int(digits, 16)))
            i += 2 + width
        else:
            raise MalformedLogLine(lineno, f"invalid escape '\\{nxt}'")
    return "".join(out)


def format_record(rec: AttemptRecord) -> str:
    return (
        f"{format_timestamp(rec.timestamp)} | {rec.failed_layer.value} | "
        f"{escape_field(rec.attempted_password)} | {rec.insertion_ms}"
    )


def parse_record(line: str, lineno: int = 0) -> AttemptRecord:
    head = line.split(" | ", 2)
    if len(head) != 3:
        raise MalformedLogLine(lineno, "expected 4 ' | '-separated fields")
    ts_raw, layer_raw, rest = head
    pw_raw, sep, ms_raw = rest.rpartition(" | ")
    if not sep:
        raise MalformedLogLine(lineno, "expected 4 ' | '-separated fields")
    try:
        ts = parse_timestamp(ts_raw)
        layer = Layer(layer_raw)
    except ValueError as exc:
        raise MalformedLogLine(lineno, str(exc)) from None
    if not ms_raw.isdigit():
        raise MalformedLogLine(lineno, f"bad insertion time {ms_raw!r}")
    return AttemptRecord(ts, layer, unescape_field(pw_raw, lineno), int(ms_raw))


def append_log(path, records: Iterable[AttemptRecord]) -> None:
    """Append records to the intrusion log. Never rewrites existing lines."""
    lines = "".join(format_record(r) + "\n" for r in records)
    if not lines:
        return
    try:
        with open(path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(lines)
            fh.flush()
            os.fsync(fh.fileno())
    except OSError as exc:
        raise IoFailure(f"cannot append to log {path}: {exc}") from exc


def read_log(path) -> list[AttemptRecord]:
    """Read every record in insertion order. Callers must gate this behind reset authentication."""
    if not Path(path).exists():
        return []
    text = _read_text(path)
    return [parse_record(line, n) for n, line in enumerate(text.splitlines(), start=1)]


# --------------------------------------------------------------------------- #
# reset mode

def _verify_slot(slot: Slot, password: str, token: TokenPart | None) -> VerifyOutcome:
    if isinstance(slot, ServerPart):
        return verify_two_factor(slot, token, password)
    return verify(slot, password)


def authenticate_reset(
    profile: Profile,
    passwords: Sequence[str],
    *,
    tokens: dict[str, TokenPart] | None = None,
    log_file=None,
    now: datetime | None = None,
) -> None:
    """Check one password per slot (resource roles, then reset). Ignores the lockout.

    Applies the length and ANN layers only. On failure the failing candidates
    are logged and :class:`ResetDenied` is raised without saying which failed.
    """
    tokens = tokens or {}
    now = now or datetime.now(timezone.utc)
    passwords = list(passwords)
    if len(passwords) != len(profile.slots):
        records = [AttemptRecord(now, Layer.LENGTH, p, 0) for p in passwords]
        if log_file is not None:
            append_log(log_file, records)
        raise ResetDenied()
    records = []
    for role, slot, pw in zip(profile.roles, profile.slots, passwords):
        try:
            outcome = _verify_slot(slot, pw, tokens.get(role))
        except (ValueError, MissingToken):
            records.append(AttemptRecord(now, Layer.LENGTH, pw, 0))
            continue
        if not outcome.authenticated:
            layer = Layer.LENGTH if outcome.rejected_stage is Stage.LENGTH else Layer.ANN
            records.append(AttemptRecord(now, layer, pw, 0))
    if records:
        if log_file is not None:
            append_log(log_file, records)
        raise ResetDenied()


def reset_profile(
    profile: Profile,
    user_pw: str,
    reset_pw: str,
    *,
    new_seed: int,
    provider_pw: str | None = None,
    new_passwords: Sequence[str | None] | None = None,
    tokens: dict[str, TokenPart] | None = None,
    log_file=None,
    max_epochs: int = 100_000,
    now: datetime | None = None,
) -> Profile:
    """Re-enroll every template after all current passwords check out.

    ``new_passwords`` follows the role order (provider, user, reset); ``None``
    entries (or omitting it) keep the current password, which is retrained with
    a fresh seed so the stored weights and mapped values still change. Role
    ``i`` uses seed ``new_seed + i``. The returned profile is unlocked with a
    zero failure count; ``profile`` itself is never modified.
    """
    if len(profile.resource_templates) == 2:
        if provider_pw is None:
            raise ResetDenied()
        current = [provider_pw, user_pw, reset_pw]
    else:
        current = [user_pw, reset_pw]
    authenticate_reset(profile, current, tokens=tokens, log_file=log_file, now=now)

    targets = list(current)
    if new_passwords is not None:
        if len(new_passwords) != len(current):
            raise ValueError(f"expected {len(current)} replacement entries, got {len(new_passwords)}")
        targets = [old if new is None else new for old, new in zip(current, new_passwords)]

    fresh = []
    for i, (slot, pw) in enumerate(zip(profile.slots, targets)):
        seed = (new_seed + i) % (MAX_SEED + 1)
        fresh.append(retrain_slot(slot, pw, seed, max_epochs))
    return replace(
        profile,
        resource_templates=tuple(fresh[:-1]),
        reset_template=fresh[-1],
        guard_state=GuardState(),
    )


def retrain_slot(slot: Slot, password: str, seed: int, max_epochs: int = 100_000) -> Template:
    """Fresh enrollment with the slot's hyperparameters. A split slot comes back whole."""
    return enroll(password, slot.meta.config(slot.architecture.lam, max_epochs=max_epochs, seed=seed))
