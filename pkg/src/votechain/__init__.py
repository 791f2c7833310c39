"""Blockchain-backed election protocol: ledger, contract, gateway, API.

The pieces compose bottom-up: an append-only hash-chained ledger holds
signed transactions; the election contract replays them into phase,
registration, and tally state; an OTP gateway keeps phone numbers and
codes off chain; an HTTP facade and a scenario-driven simulator sit on
top.
"""

from .accounts import Account, AccountStore, Address, NULL_ADDRESS, sign
from .clock import Clock, ManualClock, SystemClock
from .contract import (
    Candidate,
    ElectionConfig,
    ElectionContract,
    ElectionPhase,
    ElectionState,
    TallySnapshot,
    TxReceipt,
    VoteReceiptView,
    VoterStatus,
    replay_state,
)
from .errors import VoteChainError
from .gateway import MockSmsTransport, OtpGateway
from .identity import IdentityCommitment, PersonalData
from .ledger import (
    Block,
    Ledger,
    TransactionRecord,
    TxKind,
    VerificationReport,
    verify_chain_bytes,
)
from .scenario import Scenario, load_scenario, parse_scenario
from .service import create_app
from .simulation import RunDetail, RunReport, run, run_detailed, run_scenario, verify_chain_file

__version__ = "0.1.0"

__all__ = [
    "Account",
    "AccountStore",
    "Address",
    "NULL_ADDRESS",
    "sign",
    "Clock",
    "ManualClock",
    "SystemClock",
    "Candidate",
    "ElectionConfig",
    "ElectionContract",
    "ElectionPhase",
    "ElectionState",
    "TallySnapshot",
    "TxReceipt",
    "VoteReceiptView",
    "VoterStatus",
    "replay_state",
    "VoteChainError",
    "MockSmsTransport",
    "OtpGateway",
    "IdentityCommitment",
    "PersonalData",
    "Block",
    "Ledger",
    "TransactionRecord",
    "TxKind",
    "VerificationReport",
    "verify_chain_bytes",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "create_app",
    "RunDetail",
    "RunReport",
    "run",
    "run_detailed",
    "run_scenario",
    "verify_chain_file",
    "__version__",
]
