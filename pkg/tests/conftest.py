import random

import pytest

from votechain.accounts import AccountStore
from votechain.clock import ManualClock
from votechain.contract import ElectionConfig, ElectionContract, ElectionPhase, SeededOtpGenerator
from votechain.gateway import MockSmsTransport, OtpGateway
from votechain.identity import PersonalData
from votechain.ledger import Ledger

START = 1_700_000_000


class Stack:
    """One self-contained election stack with deterministic randomness."""

    def __init__(self, seed: int = 99, persist_path=None):
        self.rng = random.Random(seed)
        self.clock = ManualClock(START)
        self.accounts = AccountStore(rng=self.rng)
        self.ledger = Ledger(self.accounts, self.clock, persist_path=persist_path)
        self.transport = MockSmsTransport()
        self.gateway = OtpGateway(self.clock, self.transport)
        self.contract = ElectionContract(
            self.ledger, self.gateway, self.accounts, self.clock,
            otp_generator=SeededOtpGenerator(self.rng),
        )
        self.authority = self.accounts.create_account()

    def init(self, names=("Alice", "Bob"), window=300, extra_trusted=()):
        trusted = [self.authority.address, *extra_trusted]
        config = ElectionConfig.from_names(trusted, names, window)
        self.contract.init_election(self.authority.address, config)
        return config

    def to_phase(self, phase: ElectionPhase):
        while self.contract.phase() < phase:
            self.contract.advance_phase(self.authority.address)

    def new_voter(self, tag: str):
        account = self.accounts.create_account()
        data = PersonalData(
            id_number=f"card-{tag}-0001",
            first_name=f"given-{tag}",
            last_name=f"family-{tag}",
            phone="6912" + f"{int.from_bytes(tag.encode(), 'big') % 10 ** 6:06d}",
        )
        return account, data

    def register(self, tag: str):
        account, data = self.new_voter(tag)
        self.contract.register_citizen(self.authority.address, account.address, data)
        return account, data

    def issue_code(self, account, data) -> str:
        self.contract.authenticate(account.address, data)
        return self.transport.last_code(account.address)


@pytest.fixture
def stack():
    return Stack()


@pytest.fixture
def voting_stack():
    """Initialized stack already in the Voting phase with two registered voters."""
    s = Stack()
    s.init()
    s.to_phase(ElectionPhase.REGISTRATION)
    s.voter_a = s.register("ada")
    s.voter_b = s.register("bob")
    s.to_phase(ElectionPhase.VOTING)
    return s
