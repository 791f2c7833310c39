"""Off-chain delivery channel for one-time codes.

The chain cannot call external services, so code delivery runs through
this gateway: the contract hands it plaintext codes, the gateway pushes
them through a pluggable transport. Phone numbers live only here, never
on the chain, and no receipt or operator-facing output carries a code or
a full phone number. The shipped transport is an in-memory mock whose
inbox is meant for tests and simulation harnesses only.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .accounts import Address
from .clock import Clock
from .errors import DuplicateChannel, NoDeliveryChannel


@dataclass(frozen=True)
class DeliveryReceipt:
    address: Address
    masked_destination: str
    delivered_at: int
    attempt: int


def mask_phone(phone: str) -> str:
    """Keep only the last two digits visible."""
    if len(phone) <= 2:
        return "*" * len(phone)
    return "*" * (len(phone) - 2) + phone[-2:]


class SmsTransport:
    """Seam for a real sender; implementations must not log the code."""

    def send(self, address: Address, phone: str, code: str) -> None:
        raise NotImplementedError


@dataclass
class MockSmsTransport(SmsTransport):
    """Test-only transport: records every delivery in an inspectable inbox."""

    sent: list[tuple[Address, str, str]] = field(default_factory=list)

    def send(self, address: Address, phone: str, code: str) -> None:
        self.sent.append((address, phone, code))

    def last_code(self, address: Address) -> str | None:
        for addr, _phone, code in reversed(self.sent):
            if addr == address:
                return code
        return None

    def codes_for(self, address: Address) -> list[str]:
        return [code for addr, _phone, code in self.sent if addr == address]

    def all_codes(self) -> list[str]:
        return [code for _addr, _phone, code in self.sent]


class OtpGateway:
    """Registry of per-address delivery channels plus the delivery path."""

    def __init__(self, clock: Clock, transport: SmsTransport | None = None):
        self._clock = clock
        self.transport = transport if transport is not None else MockSmsTransport()
        self._channels: dict[Address, str] = {}
        self._attempts: dict[Address, int] = {}
        self._lock = threading.Lock()

    def register_channel(self, address: Address, phone: str) -> None:
        with self._lock:
            if address in self._channels:
                raise DuplicateChannel(f"channel already registered for {address}")
            self._channels[address] = phone

    def has_channel(self, address: Address) -> bool:
        return address in self._channels

    def deliver(self, address: Address, code: str) -> DeliveryReceipt:
        with self._lock:
            phone = self._channels.get(address)
            if phone is None:
                raise NoDeliveryChannel(f"no delivery channel for {address}")
            attempt = self._attempts.get(address, 0) + 1
            self._attempts[address] = attempt
        self.transport.send(address, phone, code)
        return DeliveryReceipt(
            address=address,
            masked_destination=mask_phone(phone),
            delivered_at=self._clock.now(),
            attempt=attempt,
        )
