"""Append-only hash-chained ledger of election transactions.

One transaction per block: each accepted state change lands in its own
block whose header references the predecessor's hash, so any byte-level
tamper breaks either a digest or a link. The chain serializes to a single
append-only file of canonical block records; loading re-parses strictly
and verification recomputes every digest.

Layout of a block record in the chain file (all fields length-prefixed,
integers 8-byte big-endian):

    u32 record_length
    field(index) field(prev_hash) field(timestamp) field(tx_hashes)
    field(block_hash)
    field(tx_bytes) per listed tx hash

where tx_bytes is the canonical transaction serialization:

    field(sender) field(nonce) field(kind_tag) field(payload)
    field(timestamp) field(signature)

The block hash covers exactly the first four fields; the tx hash covers
all six transaction fields; the signature is the keyed digest over the
first five.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

from .accounts import ADDRESS_SIZE, AccountStore, Address, sign
from .clock import Clock
from .encoding import ByteReader, encode_field, encode_uint, encode_uint_field
from .errors import BadNonce, BadSignature, EncodingError, NotFound, OutOfRange

HASH_SIZE = 32
GENESIS_PREV_HASH = b"\x00" * HASH_SIZE


class TxKind(IntEnum):
    CONTRACT_INIT = 0
    REGISTER = 1
    OTP_ISSUE = 2
    VOTE_CAST = 3
    PHASE_ADVANCE = 4


@dataclass(frozen=True)
class TransactionRecord:
    sender: Address
    nonce: int
    kind: TxKind
    payload: bytes
    timestamp: int
    signature: bytes
    tx_hash: bytes


@dataclass(frozen=True)
class Block:
    index: int
    prev_hash: bytes
    timestamp: int
    tx_hashes: tuple[bytes, ...]
    block_hash: bytes


@dataclass(frozen=True)
class BlockRef:
    index: int
    block_hash: bytes


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    first_bad_index: int | None = None
    reason: str | None = None


def signing_bytes(sender: Address, nonce: int, kind: TxKind, payload: bytes, timestamp: int) -> bytes:
    return (
        encode_field(sender.value)
        + encode_uint_field(nonce)
        + encode_field(bytes([kind]))
        + encode_field(payload)
        + encode_uint_field(timestamp)
    )


def transaction_bytes(tx: TransactionRecord) -> bytes:
    """Canonical serialization including the signature; preimage of tx_hash."""
    return signing_bytes(tx.sender, tx.nonce, tx.kind, tx.payload, tx.timestamp) + encode_field(tx.signature)


def make_transaction(
    sender: Address,
    secret: bytes,
    nonce: int,
    kind: TxKind,
    payload: bytes,
    timestamp: int,
) -> TransactionRecord:
    """Build a signed transaction; the ledger enforces nonce and signature."""
    to_sign = signing_bytes(sender, nonce, kind, payload, timestamp)
    signature = sign(secret, to_sign)
    tx_hash = hashlib.sha256(to_sign + encode_field(signature)).digest()
    return TransactionRecord(sender, nonce, kind, payload, timestamp, signature, tx_hash)


def block_header_bytes(index: int, prev_hash: bytes, timestamp: int, tx_hashes: tuple[bytes, ...]) -> bytes:
    return (
        encode_uint_field(index)
        + encode_field(prev_hash)
        + encode_uint_field(timestamp)
        + encode_field(b"".join(tx_hashes))
    )


def compute_block_hash(index: int, prev_hash: bytes, timestamp: int, tx_hashes: tuple[bytes, ...]) -> bytes:
    return hashlib.sha256(block_header_bytes(index, prev_hash, timestamp, tx_hashes)).digest()


def _parse_transaction(data: bytes) -> TransactionRecord:
    reader = ByteReader(data)
    sender = Address(reader.field(ADDRESS_SIZE))
    nonce = reader.uint()
    kind_raw = reader.field(1)[0]
    try:
        kind = TxKind(kind_raw)
    except ValueError as exc:
        raise EncodingError(f"unknown transaction kind tag {kind_raw}") from exc
    payload = reader.field()
    timestamp = reader.uint()
    signature = reader.field(HASH_SIZE)
    reader.expect_end()
    tx_hash = hashlib.sha256(data).digest()
    return TransactionRecord(sender, nonce, kind, bytes(payload), timestamp, signature, tx_hash)


def _encode_block_record(block: Block, txs: list[TransactionRecord]) -> bytes:
    body = block_header_bytes(block.index, block.prev_hash, block.timestamp, block.tx_hashes)
    body += encode_field(block.block_hash)
    for tx in txs:
        body += encode_field(transaction_bytes(tx))
    return len(body).to_bytes(4, "big") + body


def _parse_block_record(body: bytes) -> tuple[Block, list[TransactionRecord]]:
    reader = ByteReader(body)
    index = reader.uint()
    prev_hash = reader.field(HASH_SIZE)
    timestamp = reader.uint()
    hashes_concat = reader.field()
    if len(hashes_concat) % HASH_SIZE != 0:
        raise EncodingError("tx hash list is not a multiple of the digest size")
    tx_hashes = tuple(
        hashes_concat[i:i + HASH_SIZE] for i in range(0, len(hashes_concat), HASH_SIZE)
    )
    block_hash = reader.field(HASH_SIZE)
    txs = [_parse_transaction(reader.field()) for _ in tx_hashes]
    reader.expect_end()
    return Block(index, prev_hash, timestamp, tx_hashes, block_hash), txs


class Ledger:
    """In-memory chain with optional append-only file persistence.

    Appends are serialized through a single lock; a caller never observes
    a half-appended block. Blocks are only ever added, never rewritten.
    """

    def __init__(self, accounts: AccountStore | None, clock: Clock, persist_path: str | Path | None = None):
        self._accounts = accounts
        self._clock = clock
        self._lock = threading.Lock()
        self._blocks: list[Block] = []
        self._block_txs: list[list[TransactionRecord]] = []
        self._tx_index: dict[bytes, tuple[TransactionRecord, int]] = {}
        self._nonces: dict[Address, int] = {}
        self._persist_path: Path | None = None
        genesis = self._make_genesis(clock.now())
        self._blocks.append(genesis)
        self._block_txs.append([])
        if persist_path is not None:
            self.attach_persistence(persist_path)

    @staticmethod
    def _make_genesis(timestamp: int) -> Block:
        block_hash = compute_block_hash(0, GENESIS_PREV_HASH, timestamp, ())
        return Block(0, GENESIS_PREV_HASH, timestamp, (), block_hash)

    # --- persistence ---

    def attach_persistence(self, path: str | Path) -> None:
        """Rewrite the current chain to path and stream future appends to it."""
        path = Path(path)
        with self._lock:
            path.write_bytes(self._serialize_locked())
            self._persist_path = path

    def _append_record_to_file(self, record: bytes) -> None:
        if self._persist_path is not None:
            with open(self._persist_path, "ab") as fh:
                fh.write(record)

    def serialize(self) -> bytes:
        with self._lock:
            return self._serialize_locked()

    def _serialize_locked(self) -> bytes:
        return b"".join(
            _encode_block_record(block, txs)
            for block, txs in zip(self._blocks, self._block_txs)
        )

    @classmethod
    def from_bytes(cls, data: bytes, accounts: AccountStore | None = None, clock: Clock | None = None) -> "Ledger":
        """Parse a serialized chain. Raises EncodingError on structural damage.

        The parse is strict about framing and field sizes but does not check
        digests; run verify_chain afterwards (loading a chain without a
        passing verification is never valid).
        """
        from .clock import ManualClock

        blocks: list[Block] = []
        block_txs: list[list[TransactionRecord]] = []
        pos = 0
        while pos < len(data):
            if len(data) - pos < 4:
                raise EncodingError(f"truncated record length at block {len(blocks)}")
            length = int.from_bytes(data[pos:pos + 4], "big")
            pos += 4
            if len(data) - pos < length:
                raise EncodingError(f"truncated block record at block {len(blocks)}")
            try:
                block, txs = _parse_block_record(data[pos:pos + length])
            except EncodingError as exc:
                raise EncodingError(f"bad block record at block {len(blocks)}: {exc}") from exc
            blocks.append(block)
            block_txs.append(txs)
            pos += length
        if not blocks:
            raise EncodingError("empty chain file")

        ledger = cls.__new__(cls)
        ledger._accounts = accounts
        ledger._clock = clock or ManualClock(blocks[-1].timestamp)
        ledger._lock = threading.Lock()
        ledger._blocks = blocks
        ledger._block_txs = block_txs
        ledger._tx_index = {}
        ledger._nonces = {}
        ledger._persist_path = None
        for index, txs in enumerate(block_txs):
            for tx in txs:
                ledger._tx_index[tx.tx_hash] = (tx, index)
                if tx.nonce > ledger._nonces.get(tx.sender, 0):
                    ledger._nonces[tx.sender] = tx.nonce
        return ledger

    @classmethod
    def load(cls, path: str | Path, accounts: AccountStore | None = None, clock: Clock | None = None) -> "Ledger":
        return cls.from_bytes(Path(path).read_bytes(), accounts=accounts, clock=clock)

    # --- chain access ---

    def __len__(self) -> int:
        return len(self._blocks)

    def head(self) -> Block:
        return self._blocks[-1]

    def blocks(self) -> list[Block]:
        return list(self._blocks)

    def get_block(self, index: int) -> Block:
        if not 0 <= index < len(self._blocks):
            raise OutOfRange(f"block index {index} out of range 0..{len(self._blocks) - 1}")
        return self._blocks[index]

    def get_transaction(self, tx_hash: bytes) -> tuple[TransactionRecord, BlockRef]:
        entry = self._tx_index.get(tx_hash)
        if entry is None:
            raise NotFound(f"no transaction {tx_hash.hex()}")
        tx, index = entry
        return tx, BlockRef(index, self._blocks[index].block_hash)

    def transactions(self) -> list[tuple[TransactionRecord, int]]:
        """All transactions in chain order as (record, block_index)."""
        out = []
        for index, txs in enumerate(self._block_txs):
            for tx in txs:
                out.append((tx, index))
        return out

    def next_nonce(self, sender: Address) -> int:
        return self._nonces.get(sender, 0) + 1

    # --- mutation ---

    def append_transaction(self, tx: TransactionRecord) -> BlockRef:
        with self._lock:
            self._check_transaction(tx)
            prev = self._blocks[-1]
            index = prev.index + 1
            timestamp = self._clock.now()
            tx_hashes = (tx.tx_hash,)
            block_hash = compute_block_hash(index, prev.block_hash, timestamp, tx_hashes)
            block = Block(index, prev.block_hash, timestamp, tx_hashes, block_hash)
            self._blocks.append(block)
            self._block_txs.append([tx])
            self._tx_index[tx.tx_hash] = (tx, index)
            self._nonces[tx.sender] = tx.nonce
            self._append_record_to_file(_encode_block_record(block, [tx]))
            return BlockRef(index, block_hash)

    def _check_transaction(self, tx: TransactionRecord) -> None:
        if tx.sender.is_null:
            raise BadSignature("null address may not sign transactions")
        secret = self._accounts.secret_for(tx.sender) if self._accounts else None
        if secret is None:
            raise BadSignature(f"no account secret for {tx.sender}")
        expected = sign(secret, signing_bytes(tx.sender, tx.nonce, tx.kind, tx.payload, tx.timestamp))
        if expected != tx.signature:
            raise BadSignature(f"signature does not verify for {tx.sender}")
        expected_nonce = self._nonces.get(tx.sender, 0) + 1
        if tx.nonce != expected_nonce:
            raise BadNonce(f"nonce {tx.nonce} for {tx.sender}, expected {expected_nonce}")
        recomputed = hashlib.sha256(transaction_bytes(tx)).digest()
        if recomputed != tx.tx_hash:
            raise BadSignature("tx hash does not match canonical serialization")

    # --- verification ---

    def verify_chain(self) -> VerificationReport:
        """Recompute every digest and link; valid iff everything matches."""
        for i, (block, txs) in enumerate(zip(self._blocks, self._block_txs)):
            if block.index != i:
                return VerificationReport(False, i, f"block index {block.index} at height {i}")
            if i == 0:
                if block.prev_hash != GENESIS_PREV_HASH:
                    return VerificationReport(False, 0, "genesis prev_hash is not zero")
                if block.tx_hashes:
                    return VerificationReport(False, 0, "genesis block carries transactions")
            elif block.prev_hash != self._blocks[i - 1].block_hash:
                return VerificationReport(False, i, "prev_hash does not match predecessor")
            recomputed = compute_block_hash(block.index, block.prev_hash, block.timestamp, block.tx_hashes)
            if recomputed != block.block_hash:
                return VerificationReport(False, i, "block hash mismatch")
            if len(txs) != len(block.tx_hashes):
                return VerificationReport(False, i, "tx count does not match header")
            for tx, listed in zip(txs, block.tx_hashes):
                if hashlib.sha256(transaction_bytes(tx)).digest() != listed:
                    return VerificationReport(False, i, "tx hash mismatch")
                if tx.tx_hash != listed:
                    return VerificationReport(False, i, "tx record hash differs from header")
        return VerificationReport(True)


def verify_chain_bytes(data: bytes) -> VerificationReport:
    """Verify a serialized chain; structural damage reports the failing block."""
    try:
        ledger = Ledger.from_bytes(data)
    except EncodingError as exc:
        index = _structural_index(data)
        return VerificationReport(False, index, f"structural: {exc}")
    return ledger.verify_chain()


def _structural_index(data: bytes) -> int:
    """Index of the first block record that cannot be cleanly parsed."""
    pos = 0
    count = 0
    while pos < len(data):
        if len(data) - pos < 4:
            return count
        length = int.from_bytes(data[pos:pos + 4], "big")
        pos += 4
        if len(data) - pos < length:
            return count
        try:
            _parse_block_record(data[pos:pos + length])
        except EncodingError:
            return count
        pos += length
        count += 1
    return count
