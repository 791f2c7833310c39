"""HTTP facade over the election contract.

Thin by contract: every route maps 1:1 onto a contract or ledger call and
adds no semantics of its own, so any request sequence leaves the chain in
exactly the state the same direct calls would. Protocol errors map to a
stable (status, error code) pair; the error code is the exception class
name.

Wallet unlock is modeled as a session: POST /session with an address and
its account password yields a bearer token that signs for exactly that
address until it expires (sliding 30-minute window by default).
"""

from __future__ import annotations

import secrets
import threading

from fastapi import Depends, FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .accounts import AccountStore, Address, NULL_ADDRESS
from .clock import Clock
from .contract import Candidate, ElectionConfig, ElectionContract
from .errors import (
    AlreadyClosed,
    AlreadyInitialized,
    AlreadyRegistered,
    AlreadyVoted,
    AuthFailed,
    DuplicateChannel,
    InvalidConfig,
    InvalidPersonalData,
    NoOtpIssued,
    NotAVote,
    NotFound,
    NotInitialized,
    NotRegistered,
    OtpExpired,
    OtpInvalid,
    OutOfRange,
    Unauthorized,
    UnknownCandidate,
    VoteChainError,
    WrongPhase,
)
from .gateway import MockSmsTransport
from .identity import PersonalData
from .ledger import Block

DEFAULT_SESSION_TTL_SECONDS = 1800

_STATUS_MAP: tuple[tuple[type[VoteChainError], int], ...] = (
    (Unauthorized, 403),
    (AuthFailed, 403),
    (OtpInvalid, 403),
    (NotRegistered, 403),
    (NotFound, 404),
    (NotAVote, 404),
    (OutOfRange, 404),
    (AlreadyRegistered, 409),
    (AlreadyVoted, 409),
    (AlreadyInitialized, 409),
    (AlreadyClosed, 409),
    (NoOtpIssued, 409),
    (DuplicateChannel, 409),
    (OtpExpired, 410),
    (WrongPhase, 422),
    (InvalidConfig, 422),
    (InvalidPersonalData, 422),
    (UnknownCandidate, 422),
    (NotInitialized, 422),
)


def status_for(exc: VoteChainError) -> int:
    for exc_type, status in _STATUS_MAP:
        if isinstance(exc, exc_type):
            return status
    return 500


class _BadRequest(Exception):
    def __init__(self, detail: str):
        self.detail = detail


class SessionStore:
    """Bearer tokens bound to one address each, with sliding expiry."""

    def __init__(self, clock: Clock, ttl_seconds: int = DEFAULT_SESSION_TTL_SECONDS):
        self._clock = clock
        self._ttl = ttl_seconds
        self._sessions: dict[str, tuple[Address, int]] = {}
        self._lock = threading.Lock()

    def create(self, address: Address) -> tuple[str, int]:
        token = secrets.token_urlsafe(24)
        expires = self._clock.now() + self._ttl
        with self._lock:
            self._sessions[token] = (address, expires)
        return token, expires

    def resolve(self, token: str) -> Address | None:
        now = self._clock.now()
        with self._lock:
            entry = self._sessions.get(token)
            if entry is None:
                return None
            address, expires = entry
            if now > expires:
                del self._sessions[token]
                return None
            self._sessions[token] = (address, now + self._ttl)
            return address


# --- request bodies ---

class LoginBody(BaseModel):
    address: str
    password: str


class CandidateBody(BaseModel):
    name: str
    id: int | None = None


class InitBody(BaseModel):
    trusted: list[str]
    candidates: list[CandidateBody]
    otp_window_seconds: int = Field(default=300)


class PersonalDataBody(BaseModel):
    id_number: str
    first_name: str
    last_name: str
    phone: str

    def to_domain(self) -> PersonalData:
        return PersonalData(self.id_number, self.first_name, self.last_name, self.phone)


class RegisterBody(BaseModel):
    personal_data: PersonalDataBody
    voter: str | None = None


class AuthenticateBody(BaseModel):
    personal_data: PersonalDataBody


class VoteBody(BaseModel):
    candidate_id: int
    otp_code: str


def _parse_address(text: str) -> Address:
    try:
        return Address.from_hex(text)
    except ValueError as exc:
        raise _BadRequest(str(exc)) from exc


def _parse_hash(text: str) -> bytes:
    raw = text[2:] if text.startswith("0x") else text
    if len(raw) != 64:
        raise _BadRequest(f"transaction hash must be 64 hex chars: {text!r}")
    try:
        return bytes.fromhex(raw)
    except ValueError as exc:
        raise _BadRequest(f"bad transaction hash: {text!r}") from exc


def _block_json(block: Block) -> dict:
    return {
        "index": block.index,
        "prev_hash": "0x" + block.prev_hash.hex(),
        "timestamp": block.timestamp,
        "tx_hashes": ["0x" + h.hex() for h in block.tx_hashes],
        "block_hash": "0x" + block.block_hash.hex(),
    }


def create_app(
    contract: ElectionContract,
    accounts: AccountStore,
    clock: Clock,
    session_ttl: int = DEFAULT_SESSION_TTL_SECONDS,
    expose_dev_inbox: bool = False,
) -> FastAPI:
    app = FastAPI(title="votechain", docs_url=None, redoc_url=None)
    sessions = SessionStore(clock, session_ttl)
    app.state.contract = contract
    app.state.accounts = accounts
    app.state.clock = clock
    app.state.sessions = sessions

    def require_session(authorization: str | None = Header(default=None)) -> Address:
        if authorization is None or not authorization.startswith("Bearer "):
            raise _BadSession()
        address = sessions.resolve(authorization[len("Bearer "):])
        if address is None:
            raise _BadSession()
        return address

    def optional_session(authorization: str | None = Header(default=None)) -> Address | None:
        if authorization is None:
            return None
        if not authorization.startswith("Bearer "):
            raise _BadSession()
        address = sessions.resolve(authorization[len("Bearer "):])
        if address is None:
            raise _BadSession()
        return address

    class _BadSession(Exception):
        pass

    @app.exception_handler(VoteChainError)
    async def protocol_error(_request: Request, exc: VoteChainError):
        return JSONResponse(status_code=status_for(exc), content={"error": exc.code, "detail": str(exc)})

    @app.exception_handler(_BadRequest)
    async def bad_request(_request: Request, exc: _BadRequest):
        return JSONResponse(status_code=400, content={"error": "MalformedBody", "detail": exc.detail})

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "MalformedBody", "detail": str(exc.errors()[:3])})

    @app.exception_handler(_BadSession)
    async def bad_session(_request: Request, _exc: _BadSession):
        return JSONResponse(status_code=401, content={"error": "BadSession", "detail": "missing, invalid, or expired session"})

    @app.post("/session")
    def login(body: LoginBody):
        address = _parse_address(body.address)
        if not accounts.verify_password(address, body.password):
            return JSONResponse(status_code=401, content={"error": "LoginFailed", "detail": "unknown address or wrong password"})
        token, expires = sessions.create(address)
        return {"token": token, "address": address.hex, "expires_at": expires}

    @app.post("/authority/init")
    def init_election(body: InitBody, sender: Address = Depends(require_session)):
        trusted = frozenset(_parse_address(a) for a in body.trusted)
        candidates = tuple(
            Candidate(c.id if c.id is not None else i + 1, c.name)
            for i, c in enumerate(body.candidates)
        )
        config = ElectionConfig(trusted, candidates, body.otp_window_seconds)
        receipt = contract.init_election(sender, config)
        return {"tx_hash": "0x" + receipt.tx_hash.hex(), "phase": contract.phase().name.lower()}

    @app.post("/authority/phase/advance")
    def advance_phase(sender: Address = Depends(require_session)):
        receipt = contract.advance_phase(sender)
        return {"tx_hash": "0x" + receipt.tx_hash.hex(), "phase": contract.phase().name.lower()}

    @app.post("/authority/register")
    def register(body: RegisterBody, sender: Address = Depends(require_session)):
        data = body.personal_data.to_domain()
        password = None
        if body.voter is not None:
            voter = _parse_address(body.voter)
        else:
            account = accounts.create_account()
            voter = account.address
            password = account.password
        receipt = contract.register_citizen(sender, voter, data)
        out = {"tx_hash": "0x" + receipt.tx_hash.hex(), "voter": voter.hex}
        if password is not None:
            out["password"] = password
        return out

    @app.post("/voter/authenticate")
    def authenticate(body: AuthenticateBody, sender: Address = Depends(require_session)):
        receipt = contract.authenticate(sender, body.personal_data.to_domain())
        return {"tx_hash": "0x" + receipt.tx_hash.hex(), "status": "otp_issued"}

    @app.post("/voter/vote")
    def vote(body: VoteBody, sender: Address = Depends(require_session)):
        receipt = contract.cast_vote(sender, body.candidate_id, body.otp_code)
        return {"tx_hash": "0x" + receipt.tx_hash.hex(), "block_index": receipt.block.index}

    @app.get("/results")
    def results(sender: Address | None = Depends(optional_session)):
        snapshot = contract.results(sender if sender is not None else NULL_ADDRESS)
        return {
            "phase": snapshot.phase.name.lower(),
            "total_votes": snapshot.total_votes,
            "counts": [{"id": cid, "name": name, "votes": votes} for cid, name, votes in snapshot.counts],
        }

    @app.get("/receipt/{tx_hash}")
    def receipt_lookup(tx_hash: str):
        view = contract.verify_receipt(_parse_hash(tx_hash))
        return {
            "tx_hash": "0x" + view.tx_hash.hex(),
            "block_index": view.block_index,
            "sender": view.sender.hex,
            "candidate_id": view.candidate_id,
        }

    @app.get("/chain/verify")
    def chain_verify():
        report = contract.ledger.verify_chain()
        return {"valid": report.valid, "first_bad_index": report.first_bad_index, "reason": report.reason}

    @app.get("/chain/block/{index}")
    def chain_block(index: int, _sender: Address = Depends(require_session)):
        return _block_json(contract.ledger.get_block(index))

    if expose_dev_inbox:
        @app.get("/dev/inbox/{address}")
        def dev_inbox(address: str):
            # Simulation builds only: lets an operator read delivered codes.
            addr = _parse_address(address)
            transport = contract.gateway.transport
            if not isinstance(transport, MockSmsTransport):
                raise NotFound("no inspectable transport")
            codes = transport.codes_for(addr)
            return {"address": addr.hex, "codes": codes, "last": codes[-1] if codes else None}

    return app
