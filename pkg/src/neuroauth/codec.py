"""Password to bit-vector encoding and network sizing.

Each character becomes its 7-bit ASCII code, most significant bit first, so a
password of ``n`` characters feeds ``7 * n`` input nodes.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyPassword, InvalidInputCount, UnsupportedCharacter

BITS_PER_CHAR = 7
MIN_CODE = 0x20
MAX_CODE = 0x7E

_WEIGHTS = 1 << np.arange(BITS_PER_CHAR - 1, -1, -1)


def check_password(password: str) -> None:
    if not password:
        raise EmptyPassword("password must contain at least one character")
    for i, ch in enumerate(password):
        if not MIN_CODE <= ord(ch) <= MAX_CODE:
            raise UnsupportedCharacter(i, ch)


def encode_password(password: str) -> np.ndarray:
    """Return the password as a flat uint8 array of 0/1 values."""
    check_password(password)
    codes = np.frombuffer(password.encode("ascii"), dtype=np.uint8)
    bits = (codes[:, None] >> np.arange(BITS_PER_CHAR - 1, -1, -1)) & 1
    return bits.astype(np.uint8).ravel()


def decode_bits(bits) -> str:
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 1 or bits.size == 0 or bits.size % BITS_PER_CHAR:
        raise InvalidInputCount(f"bit vector length {bits.size} is not a positive multiple of 7")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    codes = bits.reshape(-1, BITS_PER_CHAR) @ _WEIGHTS
    return "".join(chr(c) for c in codes)


def encoded_length(password: str) -> int:
    """Input-node count a password would need, without validating characters."""
    return BITS_PER_CHAR * len(password)


def hidden_count(input_count: int) -> int:
    """Hidden layer size: 30% of the input size, rounded half up.

    Integer arithmetic keeps the half-up rule exact (``0.3 * n`` is not).
    """
    if input_count < BITS_PER_CHAR:
        raise InvalidInputCount(f"input_count must be >= {BITS_PER_CHAR}, got {input_count}")
    return max(1, (3 * input_count + 5) // 10)
