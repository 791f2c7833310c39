"""Identity commitments: canonical personal data and its SHA-256 digest.

Only the digest ever reaches the chain; plaintext personal data stays with
the caller (and, for the phone number, in the off-chain delivery registry).
The digest is unsalted by design, which makes it brute-forceable from a
public chain given low-entropy inputs; see the README privacy notes.
"""

from __future__ import annotations

import hashlib
import unicodedata
from dataclasses import dataclass

from .errors import EmptyField, SeparatorInField

SEPARATOR = "|"
COMMITMENT_SIZE = 32

_FIELD_ORDER = ("id_number", "first_name", "last_name", "phone")


@dataclass(frozen=True)
class PersonalData:
    """Citizen attributes collected at registration time."""

    id_number: str
    first_name: str
    last_name: str
    phone: str


@dataclass(frozen=True)
class IdentityCommitment:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != COMMITMENT_SIZE:
            raise ValueError(f"commitment must be {COMMITMENT_SIZE} bytes")

    @property
    def hex(self) -> str:
        return self.digest.hex()


def canonicalize(data: PersonalData) -> bytes:
    """Produce the canonical bytes: NFC-normalized fields joined by '|'.

    The separator is illegal inside fields so distinct field splits can
    never collide on the same canonical form.
    """
    normalized = []
    for name in _FIELD_ORDER:
        value = getattr(data, name)
        if not isinstance(value, str) or value == "":
            raise EmptyField(f"field {name} must be non-empty text")
        value = unicodedata.normalize("NFC", value)
        if SEPARATOR in value:
            raise SeparatorInField(f"field {name} may not contain {SEPARATOR!r}")
        normalized.append(value)
    return SEPARATOR.join(normalized).encode("utf-8")


def commit(data: PersonalData) -> IdentityCommitment:
    """SHA-256 commitment over the canonical bytes."""
    return IdentityCommitment(hashlib.sha256(canonicalize(data)).digest())
