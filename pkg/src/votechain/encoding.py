"""Canonical length-prefixed binary encoding.

Every serialized structure is a concatenation of fields, each emitted as a
4-byte big-endian length followed by the field bytes. Integers are 8-byte
big-endian. The same helpers are used for transactions, block headers,
payloads, and the chain file, so there is exactly one byte format.
"""

from __future__ import annotations

from .errors import EncodingError

LENGTH_PREFIX = 4
INT_WIDTH = 8


def encode_field(data: bytes) -> bytes:
    return len(data).to_bytes(LENGTH_PREFIX, "big") + data


def encode_uint(value: int) -> bytes:
    if value < 0:
        raise EncodingError(f"negative integer not encodable: {value}")
    try:
        return value.to_bytes(INT_WIDTH, "big")
    except OverflowError as exc:
        raise EncodingError(f"integer too large for {INT_WIDTH} bytes: {value}") from exc


def encode_uint_field(value: int) -> bytes:
    return encode_field(encode_uint(value))


class ByteReader:
    """Strict sequential reader for length-prefixed fields."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def field(self, expected_size: int | None = None) -> bytes:
        if self.remaining < LENGTH_PREFIX:
            raise EncodingError("truncated field length prefix")
        size = int.from_bytes(self._data[self._pos:self._pos + LENGTH_PREFIX], "big")
        self._pos += LENGTH_PREFIX
        if self.remaining < size:
            raise EncodingError(f"field length {size} exceeds remaining {self.remaining} bytes")
        value = self._data[self._pos:self._pos + size]
        self._pos += size
        if expected_size is not None and size != expected_size:
            raise EncodingError(f"field size {size}, expected {expected_size}")
        return value

    def uint(self) -> int:
        return int.from_bytes(self.field(INT_WIDTH), "big")

    def expect_end(self) -> None:
        if self.remaining != 0:
            raise EncodingError(f"{self.remaining} unexpected trailing bytes")
