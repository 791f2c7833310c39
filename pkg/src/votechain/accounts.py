"""Pseudonymous accounts: 20-byte addresses, signing secrets, login passwords.

Accounts stand in for externally managed wallets. Signing is a keyed digest
(SHA-256 over secret plus signed bytes) rather than elliptic-curve
signatures; it preserves the sender-authentication contract without pulling
in real wallet machinery.
"""

from __future__ import annotations

import hashlib
import random
import secrets
import threading
from dataclasses import dataclass, field

ADDRESS_SIZE = 20
SECRET_SIZE = 32
SIGNATURE_SIZE = 32

_PASSWORD_ALPHABET = "abcdefghjkmnpqrstuvwxyzABCDEFGHJKMNPQRSTUVWXYZ23456789"
_PASSWORD_LENGTH = 12


@dataclass(frozen=True)
class Address:
    """20-byte account identifier, rendered as 0x-prefixed lowercase hex."""

    value: bytes

    def __post_init__(self):
        if not isinstance(self.value, bytes) or len(self.value) != ADDRESS_SIZE:
            raise ValueError(f"address must be {ADDRESS_SIZE} bytes")

    @classmethod
    def from_hex(cls, text: str) -> "Address":
        if not text.startswith("0x") or len(text) != 2 + 2 * ADDRESS_SIZE:
            raise ValueError(f"address must be 0x-prefixed {2 * ADDRESS_SIZE}-char hex: {text!r}")
        return cls(bytes.fromhex(text[2:]))

    @property
    def hex(self) -> str:
        return "0x" + self.value.hex()

    @property
    def is_null(self) -> bool:
        return self.value == b"\x00" * ADDRESS_SIZE

    def __str__(self) -> str:
        return self.hex

    def __repr__(self) -> str:
        return f"Address({self.hex})"


NULL_ADDRESS = Address(b"\x00" * ADDRESS_SIZE)


@dataclass(frozen=True)
class Account:
    address: Address
    secret: bytes = field(repr=False)
    password: str = field(repr=False)


def sign(secret: bytes, message: bytes) -> bytes:
    """Keyed digest over the message: SHA-256(secret || message)."""
    return hashlib.sha256(secret + message).digest()


class AccountStore:
    """Registry of accounts keyed by address.

    With an rng the store is fully deterministic (simulation runs); without
    one it draws from the OS entropy pool.
    """

    def __init__(self, rng: random.Random | None = None):
        self._rng = rng
        self._accounts: dict[Address, Account] = {}
        self._lock = threading.Lock()

    def _random_bytes(self, n: int) -> bytes:
        if self._rng is not None:
            return self._rng.randbytes(n)
        return secrets.token_bytes(n)

    def _random_password(self) -> str:
        if self._rng is not None:
            return "".join(self._rng.choice(_PASSWORD_ALPHABET) for _ in range(_PASSWORD_LENGTH))
        return "".join(secrets.choice(_PASSWORD_ALPHABET) for _ in range(_PASSWORD_LENGTH))

    def create_account(self) -> Account:
        with self._lock:
            while True:
                address = Address(self._random_bytes(ADDRESS_SIZE))
                if not address.is_null and address not in self._accounts:
                    break
            account = Account(
                address=address,
                secret=self._random_bytes(SECRET_SIZE),
                password=self._random_password(),
            )
            self._accounts[address] = account
            return account

    def get(self, address: Address) -> Account | None:
        return self._accounts.get(address)

    def secret_for(self, address: Address) -> bytes | None:
        account = self._accounts.get(address)
        return account.secret if account else None

    def verify_password(self, address: Address, password: str) -> bool:
        account = self._accounts.get(address)
        return account is not None and secrets.compare_digest(account.password, password)

    def __contains__(self, address: Address) -> bool:
        return address in self._accounts

    def __len__(self) -> int:
        return len(self._accounts)
