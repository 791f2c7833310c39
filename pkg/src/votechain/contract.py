"""Election contract state machine.

The contract owns the election lifecycle: a four-phase progression
(Setup, Registration, Voting, Closed), a voter registry keyed by address,
two-factor authentication that issues one-time codes, single-use vote
casting, and the candidate tally. Every accepted state change is
materialized as exactly one ledger transaction, and the whole state can
be rebuilt by replaying the chain from genesis.

Two deliberate choices shape the on-chain footprint:

* Personal data never appears in any payload; registration stores only
  the 32-byte identity commitment.
* The one-time code itself stays off chain. Its payload carries
  SHA-256(code || voter address) plus the issue time, and the plaintext
  code travels only through the delivery gateway. Storing the code in a
  public ledger would hand the second factor to every chain reader.
"""

from __future__ import annotations

import hashlib
import random
import secrets
import threading
from dataclasses import dataclass, replace
from enum import IntEnum

from .accounts import ADDRESS_SIZE, AccountStore, Address
from .clock import Clock
from .encoding import ByteReader, encode_field, encode_uint, encode_uint_field
from .errors import (
    AlreadyClosed,
    AlreadyInitialized,
    AlreadyRegistered,
    AlreadyVoted,
    AuthFailed,
    BadSignature,
    EncodingError,
    InvalidConfig,
    InvalidPersonalData,
    NoOtpIssued,
    NotAVote,
    NotInitialized,
    NotRegistered,
    OtpExpired,
    OtpInvalid,
    ReplayError,
    Unauthorized,
    UnknownCandidate,
    WrongPhase,
)
from .gateway import OtpGateway
from .identity import IdentityCommitment, PersonalData, commit
from .ledger import HASH_SIZE, BlockRef, Ledger, TxKind, make_transaction

OTP_DIGITS = 6
DEFAULT_OTP_WINDOW_SECONDS = 300


class ElectionPhase(IntEnum):
    SETUP = 0
    REGISTRATION = 1
    VOTING = 2
    CLOSED = 3


class VoterStatus(IntEnum):
    REGISTERED = 0
    OTP_ISSUED = 1
    VOTED = 2


@dataclass(frozen=True)
class Candidate:
    id: int
    name: str


@dataclass(frozen=True)
class ElectionConfig:
    trusted: frozenset[Address]
    candidates: tuple[Candidate, ...]
    otp_window_seconds: int = DEFAULT_OTP_WINDOW_SECONDS

    @classmethod
    def from_names(cls, trusted, names, otp_window_seconds=DEFAULT_OTP_WINDOW_SECONDS) -> "ElectionConfig":
        """Candidate ids are assigned 1..n in list order."""
        candidates = tuple(Candidate(i + 1, name) for i, name in enumerate(names))
        return cls(frozenset(trusted), candidates, otp_window_seconds)


@dataclass(frozen=True)
class VoterRecord:
    address: Address
    commitment: IdentityCommitment
    status: VoterStatus
    otp_digest: bytes | None = None
    otp_issued_at: int | None = None


@dataclass(frozen=True)
class TallySnapshot:
    counts: tuple[tuple[int, str, int], ...]  # (candidate id, name, votes)
    total_votes: int
    phase: ElectionPhase


@dataclass(frozen=True)
class TxReceipt:
    tx_hash: bytes
    block: BlockRef


@dataclass(frozen=True)
class VoteReceiptView:
    tx_hash: bytes
    block_index: int
    sender: Address
    candidate_id: int


# --- one-time code generation ---

class OtpGenerator:
    def generate(self) -> str:
        raise NotImplementedError


class SecretsOtpGenerator(OtpGenerator):
    """Default: OS entropy. Leading zeros allowed."""

    def generate(self) -> str:
        return f"{secrets.randbelow(10 ** OTP_DIGITS):0{OTP_DIGITS}d}"


class SeededOtpGenerator(OtpGenerator):
    """Deterministic codes for simulation runs."""

    def __init__(self, rng: random.Random):
        self._rng = rng

    def generate(self) -> str:
        return f"{self._rng.randrange(10 ** OTP_DIGITS):0{OTP_DIGITS}d}"


def otp_digest(code: str, address: Address) -> bytes:
    return hashlib.sha256(code.encode("ascii") + address.value).digest()


# --- payload codecs ---

def encode_config_payload(config: ElectionConfig) -> bytes:
    trusted_concat = b"".join(sorted(a.value for a in config.trusted))
    out = encode_uint_field(config.otp_window_seconds)
    out += encode_field(trusted_concat)
    out += encode_uint_field(len(config.candidates))
    for cand in config.candidates:
        out += encode_uint_field(cand.id)
        out += encode_field(cand.name.encode("utf-8"))
    return out


def parse_config_payload(payload: bytes) -> ElectionConfig:
    reader = ByteReader(payload)
    window = reader.uint()
    trusted_concat = reader.field()
    if len(trusted_concat) % ADDRESS_SIZE != 0:
        raise EncodingError("trusted address list is not a multiple of the address size")
    trusted = frozenset(
        Address(trusted_concat[i:i + ADDRESS_SIZE])
        for i in range(0, len(trusted_concat), ADDRESS_SIZE)
    )
    count = reader.uint()
    candidates = []
    for _ in range(count):
        cid = reader.uint()
        name = reader.field().decode("utf-8")
        candidates.append(Candidate(cid, name))
    reader.expect_end()
    return ElectionConfig(trusted, tuple(candidates), window)


def encode_register_payload(voter: Address, commitment: IdentityCommitment) -> bytes:
    return encode_field(voter.value) + encode_field(commitment.digest)


def parse_register_payload(payload: bytes) -> tuple[Address, IdentityCommitment]:
    reader = ByteReader(payload)
    voter = Address(reader.field(ADDRESS_SIZE))
    commitment = IdentityCommitment(reader.field(HASH_SIZE))
    reader.expect_end()
    return voter, commitment


def encode_otp_payload(digest: bytes, issued_at: int) -> bytes:
    return encode_field(digest) + encode_uint_field(issued_at)


def parse_otp_payload(payload: bytes) -> tuple[bytes, int]:
    reader = ByteReader(payload)
    digest = reader.field(HASH_SIZE)
    issued_at = reader.uint()
    reader.expect_end()
    return digest, issued_at


def encode_vote_payload(candidate_id: int) -> bytes:
    return encode_uint_field(candidate_id)


def parse_vote_payload(payload: bytes) -> int:
    reader = ByteReader(payload)
    candidate_id = reader.uint()
    reader.expect_end()
    return candidate_id


def encode_phase_payload(phase: ElectionPhase) -> bytes:
    return encode_field(bytes([phase]))


def parse_phase_payload(payload: bytes) -> ElectionPhase:
    reader = ByteReader(payload)
    tag = reader.field(1)[0]
    reader.expect_end()
    try:
        return ElectionPhase(tag)
    except ValueError as exc:
        raise EncodingError(f"unknown phase tag {tag}") from exc


# --- comparable state snapshot ---

@dataclass(frozen=True)
class ElectionState:
    """Canonical, order-normalized view of contract state for equivalence checks."""

    initialized: bool
    phase: ElectionPhase | None
    otp_window_seconds: int | None
    trusted: tuple[Address, ...]
    candidates: tuple[tuple[int, str], ...]
    counts: tuple[tuple[int, int], ...]
    voters: tuple[tuple[Address, bytes, VoterStatus, bytes | None, int | None], ...]

    def digest(self) -> bytes:
        out = encode_field(b"\x01" if self.initialized else b"\x00")
        out += encode_field(bytes([self.phase]) if self.phase is not None else b"")
        out += encode_uint_field(self.otp_window_seconds or 0)
        out += encode_field(b"".join(a.value for a in self.trusted))
        for cid, name in self.candidates:
            out += encode_uint_field(cid) + encode_field(name.encode("utf-8"))
        for cid, count in self.counts:
            out += encode_uint_field(cid) + encode_uint_field(count)
        for address, commitment, status, digest, issued_at in self.voters:
            out += encode_field(address.value)
            out += encode_field(commitment)
            out += encode_field(bytes([status]))
            out += encode_field(digest or b"")
            out += encode_uint_field(issued_at or 0)
        return hashlib.sha256(out).digest()


class _StateCore:
    """Mutable election state shared by the live contract and chain replay."""

    def __init__(self):
        self.config: ElectionConfig | None = None
        self.phase: ElectionPhase | None = None
        self.voters: dict[Address, VoterRecord] = {}
        self.counts: dict[int, int] = {}

    @property
    def initialized(self) -> bool:
        return self.config is not None

    def candidate_ids(self) -> set[int]:
        return set(self.counts)

    def snapshot(self) -> ElectionState:
        config = self.config
        return ElectionState(
            initialized=self.initialized,
            phase=self.phase,
            otp_window_seconds=config.otp_window_seconds if config else None,
            trusted=tuple(sorted(config.trusted, key=lambda a: a.value)) if config else (),
            candidates=tuple((c.id, c.name) for c in config.candidates) if config else (),
            counts=tuple((c.id, self.counts[c.id]) for c in config.candidates) if config else (),
            voters=tuple(
                (r.address, r.commitment.digest, r.status, r.otp_digest, r.otp_issued_at)
                for r in sorted(self.voters.values(), key=lambda r: r.address.value)
            ),
        )

    def apply_init(self, config: ElectionConfig) -> None:
        self.config = config
        self.phase = ElectionPhase.SETUP
        self.counts = {c.id: 0 for c in config.candidates}

    def apply_phase(self, phase: ElectionPhase) -> None:
        self.phase = phase

    def apply_register(self, voter: Address, commitment: IdentityCommitment) -> None:
        self.voters[voter] = VoterRecord(voter, commitment, VoterStatus.REGISTERED)

    def apply_otp(self, voter: Address, digest: bytes, issued_at: int) -> None:
        self.voters[voter] = replace(
            self.voters[voter],
            status=VoterStatus.OTP_ISSUED,
            otp_digest=digest,
            otp_issued_at=issued_at,
        )

    def apply_vote(self, voter: Address, candidate_id: int) -> None:
        self.counts[candidate_id] += 1
        self.voters[voter] = replace(
            self.voters[voter],
            status=VoterStatus.VOTED,
            otp_digest=None,
            otp_issued_at=None,
        )


def validate_config(config: ElectionConfig) -> None:
    if not config.trusted:
        raise InvalidConfig("trusted address set is empty")
    if not config.candidates:
        raise InvalidConfig("candidate list is empty")
    ids = [c.id for c in config.candidates]
    if len(set(ids)) != len(ids):
        raise InvalidConfig("candidate ids are not unique")
    if any(not c.name for c in config.candidates):
        raise InvalidConfig("candidate name is empty")
    if config.otp_window_seconds <= 0:
        raise InvalidConfig("otp window must be positive")


class ElectionContract:
    """Live election state machine backed by a ledger.

    State-mutating operations are serialized through one lock (the same
    writer discipline as ledger appends); reads take the lock briefly so
    they only ever observe fully applied states.
    """

    def __init__(
        self,
        ledger: Ledger,
        gateway: OtpGateway,
        accounts: AccountStore,
        clock: Clock,
        otp_generator: OtpGenerator | None = None,
    ):
        self._ledger = ledger
        self._gateway = gateway
        self._accounts = accounts
        self._clock = clock
        self._otp = otp_generator if otp_generator is not None else SecretsOtpGenerator()
        self._state = _StateCore()
        self._lock = threading.RLock()

    @property
    def ledger(self) -> Ledger:
        return self._ledger

    @property
    def gateway(self) -> OtpGateway:
        return self._gateway

    def phase(self) -> ElectionPhase | None:
        with self._lock:
            return self._state.phase

    def otp_window_seconds(self) -> int:
        with self._lock:
            self._require_initialized()
            return self._state.config.otp_window_seconds

    def is_trusted(self, address: Address) -> bool:
        with self._lock:
            return self._state.initialized and address in self._state.config.trusted

    def voter_record(self, address: Address) -> VoterRecord | None:
        with self._lock:
            return self._state.voters.get(address)

    def state(self) -> ElectionState:
        with self._lock:
            return self._state.snapshot()

    def state_digest(self) -> bytes:
        return self.state().digest()

    # --- internals ---

    def _require_initialized(self) -> None:
        if not self._state.initialized:
            raise NotInitialized("election contract is not initialized")

    def _append(self, sender: Address, kind: TxKind, payload: bytes, timestamp: int) -> TxReceipt:
        secret = self._accounts.secret_for(sender)
        if secret is None:
            raise BadSignature(f"no account secret for {sender}")
        tx = make_transaction(sender, secret, self._ledger.next_nonce(sender), kind, payload, timestamp)
        ref = self._ledger.append_transaction(tx)
        return TxReceipt(tx.tx_hash, ref)

    # --- operations ---

    def init_election(self, sender: Address, config: ElectionConfig) -> TxReceipt:
        with self._lock:
            if self._state.initialized:
                raise AlreadyInitialized("election already initialized")
            validate_config(config)
            if sender not in config.trusted:
                raise Unauthorized(f"{sender} is not a trusted address")
            receipt = self._append(sender, TxKind.CONTRACT_INIT, encode_config_payload(config), self._clock.now())
            self._state.apply_init(config)
            return receipt

    def advance_phase(self, sender: Address) -> TxReceipt:
        with self._lock:
            self._require_initialized()
            if sender not in self._state.config.trusted:
                raise Unauthorized(f"{sender} is not a trusted address")
            if self._state.phase == ElectionPhase.CLOSED:
                raise AlreadyClosed("election is closed")
            new_phase = ElectionPhase(self._state.phase + 1)
            receipt = self._append(sender, TxKind.PHASE_ADVANCE, encode_phase_payload(new_phase), self._clock.now())
            self._state.apply_phase(new_phase)
            return receipt

    def register_citizen(self, sender: Address, voter: Address, data: PersonalData) -> TxReceipt:
        with self._lock:
            self._require_initialized()
            if sender not in self._state.config.trusted:
                raise Unauthorized(f"{sender} is not a trusted address")
            if self._state.phase != ElectionPhase.REGISTRATION:
                raise WrongPhase(f"registration requires Registration phase, now {self._state.phase.name}")
            if voter in self._state.config.trusted:
                raise Unauthorized("trusted addresses may not register as voters")
            if voter in self._state.voters or self._gateway.has_channel(voter):
                raise AlreadyRegistered(f"{voter} is already registered")
            commitment = commit(data)  # raises InvalidPersonalData subclasses
            receipt = self._append(
                sender, TxKind.REGISTER, encode_register_payload(voter, commitment), self._clock.now()
            )
            self._state.apply_register(voter, commitment)
            self._gateway.register_channel(voter, data.phone)
            return receipt

    def authenticate(self, sender: Address, data: PersonalData, now: int | None = None) -> TxReceipt:
        """Second-factor identification: on a commitment match, issue a code.

        The code is delivered through the gateway and never returned here;
        only its digest and the issue time reach the chain. Re-authenticating
        before expiry replaces the previous code.
        """
        with self._lock:
            self._require_initialized()
            if now is None:
                now = self._clock.now()
            if self._state.phase != ElectionPhase.VOTING:
                raise WrongPhase(f"authentication requires Voting phase, now {self._state.phase.name}")
            record = self._state.voters.get(sender)
            if record is None:
                raise NotRegistered(f"{sender} is not a registered voter")
            try:
                presented = commit(data)
            except InvalidPersonalData as exc:
                raise AuthFailed(f"personal data does not match registration: {exc.code}") from exc
            if presented != record.commitment:
                raise AuthFailed("personal data does not match registration")
            if record.status == VoterStatus.VOTED:
                raise AlreadyVoted(f"{sender} has already voted")
            code = self._otp.generate()
            digest = otp_digest(code, sender)
            receipt = self._append(sender, TxKind.OTP_ISSUE, encode_otp_payload(digest, now), now)
            self._state.apply_otp(sender, digest, now)
            self._gateway.deliver(sender, code)
            return receipt

    def cast_vote(self, sender: Address, candidate_id: int, code: str, now: int | None = None) -> TxReceipt:
        """Accept the vote if the code matches and the window has not passed.

        The validity interval is closed at the upper bound: a vote at
        exactly issued_at + window is accepted, one second later it is
        expired. The returned transaction hash is the voter's receipt.
        """
        with self._lock:
            self._require_initialized()
            if now is None:
                now = self._clock.now()
            if self._state.phase != ElectionPhase.VOTING:
                raise WrongPhase(f"voting requires Voting phase, now {self._state.phase.name}")
            record = self._state.voters.get(sender)
            if record is None:
                raise NoOtpIssued(f"no code has been issued for {sender}")
            if record.status == VoterStatus.VOTED:
                raise AlreadyVoted(f"{sender} has already voted")
            if record.status != VoterStatus.OTP_ISSUED:
                raise NoOtpIssued(f"no code has been issued for {sender}")
            if candidate_id not in self._state.counts:
                raise UnknownCandidate(f"no candidate with id {candidate_id}")
            if otp_digest(code, sender) != record.otp_digest:
                raise OtpInvalid("code does not match")
            window = self._state.config.otp_window_seconds
            if now > record.otp_issued_at + window:
                raise OtpExpired("code window has passed; re-authenticate for a new code")
            receipt = self._append(sender, TxKind.VOTE_CAST, encode_vote_payload(candidate_id), now)
            self._state.apply_vote(sender, candidate_id)
            return receipt

    def results(self, sender: Address) -> TallySnapshot:
        with self._lock:
            self._require_initialized()
            if self._state.phase != ElectionPhase.CLOSED and sender not in self._state.config.trusted:
                raise Unauthorized("results are public only after the election closes")
            counts = tuple(
                (c.id, c.name, self._state.counts[c.id]) for c in self._state.config.candidates
            )
            return TallySnapshot(counts, sum(self._state.counts.values()), self._state.phase)

    def verify_receipt(self, tx_hash: bytes) -> VoteReceiptView:
        tx, ref = self._ledger.get_transaction(tx_hash)  # raises NotFound
        if tx.kind != TxKind.VOTE_CAST:
            raise NotAVote(f"transaction {tx_hash.hex()} is not a vote")
        return VoteReceiptView(
            tx_hash=tx.tx_hash,
            block_index=ref.index,
            sender=tx.sender,
            candidate_id=parse_vote_payload(tx.payload),
        )


def replay_state(ledger: Ledger) -> ElectionState:
    """Rebuild election state from the chain alone.

    Raises ReplayError when the transaction sequence is not a legal history
    of the state machine (possible only for crafted or corrupted chains).
    """
    core = _StateCore()
    for tx, block_index in ledger.transactions():
        where = f"block {block_index}"
        try:
            if tx.kind == TxKind.CONTRACT_INIT:
                if core.initialized:
                    raise ReplayError(f"second contract init at {where}")
                config = parse_config_payload(tx.payload)
                validate_config(config)
                if tx.sender not in config.trusted:
                    raise ReplayError(f"init from untrusted sender at {where}")
                core.apply_init(config)
                continue
            if not core.initialized:
                raise ReplayError(f"{tx.kind.name} before contract init at {where}")
            if tx.kind == TxKind.PHASE_ADVANCE:
                if tx.sender not in core.config.trusted:
                    raise ReplayError(f"phase advance from untrusted sender at {where}")
                new_phase = parse_phase_payload(tx.payload)
                if new_phase != core.phase + 1:
                    raise ReplayError(f"phase skip {core.phase.name} -> {new_phase.name} at {where}")
                core.apply_phase(new_phase)
            elif tx.kind == TxKind.REGISTER:
                if core.phase != ElectionPhase.REGISTRATION:
                    raise ReplayError(f"registration outside Registration phase at {where}")
                if tx.sender not in core.config.trusted:
                    raise ReplayError(f"registration from untrusted sender at {where}")
                voter, commitment = parse_register_payload(tx.payload)
                if voter in core.voters or voter in core.config.trusted:
                    raise ReplayError(f"illegal registration of {voter} at {where}")
                core.apply_register(voter, commitment)
            elif tx.kind == TxKind.OTP_ISSUE:
                if core.phase != ElectionPhase.VOTING:
                    raise ReplayError(f"code issue outside Voting phase at {where}")
                record = core.voters.get(tx.sender)
                if record is None or record.status == VoterStatus.VOTED:
                    raise ReplayError(f"illegal code issue for {tx.sender} at {where}")
                digest, issued_at = parse_otp_payload(tx.payload)
                core.apply_otp(tx.sender, digest, issued_at)
            elif tx.kind == TxKind.VOTE_CAST:
                if core.phase != ElectionPhase.VOTING:
                    raise ReplayError(f"vote outside Voting phase at {where}")
                record = core.voters.get(tx.sender)
                if record is None or record.status != VoterStatus.OTP_ISSUED:
                    raise ReplayError(f"vote without issued code for {tx.sender} at {where}")
                candidate_id = parse_vote_payload(tx.payload)
                if candidate_id not in core.counts:
                    raise ReplayError(f"vote for unknown candidate {candidate_id} at {where}")
                core.apply_vote(tx.sender, candidate_id)
            else:
                raise ReplayError(f"unknown transaction kind at {where}")
        except EncodingError as exc:
            raise ReplayError(f"undecodable payload at {where}: {exc}") from exc
    return core.snapshot()
