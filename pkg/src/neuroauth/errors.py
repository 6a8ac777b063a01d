"""Exception hierarchy shared by every neuroauth module."""


class NeuroAuthError(Exception):
    """Base class for all library errors."""


class EmptyPassword(NeuroAuthError, ValueError):
    pass


class UnsupportedCharacter(NeuroAuthError, ValueError):
    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(
            f"unsupported character {char!r} (U+{ord(char):04X}) at position {position}"
        )


class InvalidInputCount(NeuroAuthError, ValueError):
    pass


class DimensionMismatch(NeuroAuthError, ValueError):
    pass


class InvalidConfig(NeuroAuthError, ValueError):
    pass


class NoConvergence(NeuroAuthError):
    """Training hit ``max_epochs`` without reaching the error threshold.

    The partial learning curve is kept on ``curve`` for diagnostics.
    """

    def __init__(self, curve, max_epochs: int):
        self.curve = curve
        self.max_epochs = max_epochs
        last = curve.errors[-1] if len(curve) else float("nan")
        super().__init__(f"no convergence after {max_epochs} epochs (last error {last:.3e})")


class IoFailure(NeuroAuthError, OSError):
    pass


class SerializationOverflow(NeuroAuthError, ValueError):
    pass


class ChecksumMismatch(NeuroAuthError, ValueError):
    pass


class VersionUnsupported(NeuroAuthError, ValueError):
    pass


class MalformedField(NeuroAuthError, ValueError):
    def __init__(self, line: int, key: str, detail: str = ""):
        self.line = line
        self.key = key
        msg = f"malformed field {key!r} on line {line}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class MalformedLogLine(NeuroAuthError, ValueError):
    def __init__(self, line: int, detail: str = ""):
        self.line = line
        super().__init__(f"malformed log line {line}" + (f": {detail}" if detail else ""))


class ResetDenied(NeuroAuthError):
    """Reset-mode authentication failed. Deliberately does not say which password."""

    def __init__(self):
        super().__init__("reset denied")


class MissingToken(NeuroAuthError):
    pass


class NoTerminal(NeuroAuthError):
    pass
