"""Error hierarchy for the election protocol.

Every protocol-level failure is a subclass of VoteChainError carrying a
stable ``code`` (the class name) used by run reports and the HTTP layer.
"""


class VoteChainError(Exception):
    """Base class for all protocol errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class EncodingError(VoteChainError):
    """Malformed canonical byte stream."""


# --- ledger ---

class LedgerError(VoteChainError):
    pass


class BadSignature(LedgerError):
    pass


class BadNonce(LedgerError):
    pass


class NotFound(LedgerError):
    pass


class OutOfRange(LedgerError):
    pass


# --- identity ---

class InvalidPersonalData(VoteChainError):
    pass


class EmptyField(InvalidPersonalData):
    pass


class SeparatorInField(InvalidPersonalData):
    pass


# --- contract ---

class ContractError(VoteChainError):
    pass


class NotInitialized(ContractError):
    pass


class AlreadyInitialized(ContractError):
    pass


class Unauthorized(ContractError):
    pass


class InvalidConfig(ContractError):
    pass


class WrongPhase(ContractError):
    pass


class AlreadyClosed(ContractError):
    pass


class AlreadyRegistered(ContractError):
    pass


class NotRegistered(ContractError):
    pass


class AuthFailed(ContractError):
    pass


class AlreadyVoted(ContractError):
    pass


class NoOtpIssued(ContractError):
    pass


class OtpInvalid(ContractError):
    pass


class OtpExpired(ContractError):
    pass


class UnknownCandidate(ContractError):
    pass


class NotAVote(ContractError):
    pass


class ReplayError(ContractError):
    """Chain does not replay into a consistent election state."""


# --- gateway ---

class GatewayError(VoteChainError):
    pass


class DuplicateChannel(GatewayError):
    pass


class NoDeliveryChannel(GatewayError):
    pass


# --- scenarios ---

class ScenarioError(VoteChainError):
    pass


class ParseError(ScenarioError):
    pass
