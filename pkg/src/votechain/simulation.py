"""Deterministic end-to-end election runs.

The runner expands a scenario into a concrete action sequence against a
fresh in-process stack (ledger, gateway, contract) and executes all four
phases single-threaded. Every random choice (addresses, codes, voter
order, candidate picks) is drawn from one generator seeded by the
scenario, and time comes from a manual clock, so the same scenario and
seed reproduce the chain byte for byte.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from random import Random

from .accounts import Account, AccountStore
from .clock import ManualClock
from .contract import (
    ElectionConfig,
    ElectionContract,
    SeededOtpGenerator,
    parse_vote_payload,
    replay_state,
)
from .errors import ParseError, ReplayError, VoteChainError
from .gateway import MockSmsTransport, OtpGateway
from .identity import PersonalData
from .ledger import Ledger, TxKind, VerificationReport, verify_chain_bytes
from .scenario import Scenario, load_scenario

START_TIME = 1_700_000_000


@dataclass(frozen=True)
class RunReport:
    """Outcome of one simulated election.

    Accounting invariant: accepted plus the sum of per-code rejections
    equals vote_attempts, and the same identity holds for the
    authentication columns.
    """

    seed: int
    voters: int
    auth_attempts: int
    auth_rejections: tuple[tuple[str, int], ...]
    vote_attempts: int
    accepted: int
    rejections: tuple[tuple[str, int], ...]
    tally: tuple[tuple[int, str, int], ...]
    total_votes: int
    blocks: int
    head_hash: bytes
    chain_valid: bool
    replay_match: bool
    tally_consistent: bool
    vote_receipts: tuple[str, ...]
    elapsed_seconds: float

    def ok(self) -> bool:
        accounted = self.accepted + sum(n for _, n in self.rejections) == self.vote_attempts
        return (
            self.chain_valid
            and self.replay_match
            and self.tally_consistent
            and accounted
            and self.total_votes == self.accepted
        )

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "voters": self.voters,
            "auth_attempts": self.auth_attempts,
            "auth_rejections": dict(self.auth_rejections),
            "vote_attempts": self.vote_attempts,
            "accepted": self.accepted,
            "rejections": dict(self.rejections),
            "tally": [{"id": cid, "name": name, "votes": votes} for cid, name, votes in self.tally],
            "total_votes": self.total_votes,
            "blocks": self.blocks,
            "head_hash": "0x" + self.head_hash.hex(),
            "chain_valid": self.chain_valid,
            "replay_match": self.replay_match,
            "tally_consistent": self.tally_consistent,
            "elapsed_seconds": round(self.elapsed_seconds, 3),
            "ok": self.ok(),
        }


@dataclass(frozen=True)
class RunDetail:
    """A run's report plus the off-chain plaintexts the harness scripted.

    Privacy checks need exactly this: the generated personal fields and
    delivered codes, to prove none of them leaked into the chain bytes.
    """

    report: RunReport
    personal_fields: tuple[str, ...]
    delivered_codes: tuple[str, ...]
    chain: bytes
    state_digest: bytes


@dataclass
class _Voter:
    account: Account
    data: PersonalData
    behavior: str
    pinned_candidate: int | None


def _perturb(code: str, position: int) -> str:
    """A code guaranteed to differ from the real one at one digit."""
    i = position % len(code)
    digit = (int(code[i]) + 1) % 10
    return code[:i] + str(digit) + code[i + 1:]


def _make_voters(scenario: Scenario, accounts: AccountStore, rng: Random) -> list[_Voter]:
    voters = []
    serial = 0
    for group in scenario.groups:
        pinned = None
        if group.candidate is not None:
            pinned = scenario.candidates.index(group.candidate) + 1
        for _ in range(group.count):
            serial += 1
            data = PersonalData(
                id_number=f"card{serial:05d}x{rng.getrandbits(24):06x}",
                first_name=f"given{rng.getrandbits(28):07x}",
                last_name=f"family{rng.getrandbits(28):07x}",
                phone="69" + f"{rng.getrandbits(40) % 10 ** 8:08d}",
            )
            voters.append(_Voter(accounts.create_account(), data, group.behavior, pinned))
    rng.shuffle(voters)
    return voters


def run(scenario: Scenario, dump_path: str | Path | None = None) -> RunReport:
    """Execute a scenario. The scenario must carry a seed."""
    return run_detailed(scenario, dump_path=dump_path).report


def run_detailed(scenario: Scenario, dump_path: str | Path | None = None) -> RunDetail:
    """Like run(), but also returns the plaintexts that stayed off-chain."""
    if scenario.seed is None:
        raise ParseError("scenario embeds no seed and none was provided")
    started = time.monotonic()

    rng = Random(scenario.seed)
    clock = ManualClock(START_TIME)
    accounts = AccountStore(rng=rng)
    ledger = Ledger(accounts, clock, persist_path=dump_path)
    transport = MockSmsTransport()
    gateway = OtpGateway(clock, transport)
    contract = ElectionContract(ledger, gateway, accounts, clock, otp_generator=SeededOtpGenerator(rng))

    authorities = [accounts.create_account() for _ in range(scenario.authorities)]
    chair = authorities[0].address
    contract.init_election(
        chair,
        ElectionConfig.from_names(
            (a.address for a in authorities), scenario.candidates, scenario.otp_window_seconds
        ),
    )

    voters = _make_voters(scenario, accounts, rng)

    contract.advance_phase(chair)
    for voter in voters:
        if voter.behavior != "unregistered":
            contract.register_citizen(chair, voter.account.address, voter.data)
            clock.advance(rng.randrange(0, 2))
    contract.advance_phase(chair)

    auth_attempts = 0
    auth_rejections: Counter[str] = Counter()
    vote_attempts = 0
    accepted = 0
    rejections: Counter[str] = Counter()
    receipts: list[str] = []
    captured: list[str] = []

    def authenticate(voter: _Voter, data: PersonalData) -> str | None:
        nonlocal auth_attempts
        auth_attempts += 1
        try:
            contract.authenticate(voter.account.address, data)
        except VoteChainError as exc:
            auth_rejections[exc.code] += 1
            return None
        code = transport.last_code(voter.account.address)
        captured.append(code)
        return code

    def vote(voter: _Voter, candidate_id: int, code: str) -> None:
        nonlocal vote_attempts, accepted
        vote_attempts += 1
        try:
            receipt = contract.cast_vote(voter.account.address, candidate_id, code)
        except VoteChainError as exc:
            rejections[exc.code] += 1
            return
        accepted += 1
        receipts.append(receipt.tx_hash.hex())

    for voter in voters:
        clock.advance(rng.randrange(0, 3))
        candidate_id = voter.pinned_candidate or rng.randrange(1, len(scenario.candidates) + 1)
        behavior = voter.behavior

        if behavior == "abstain":
            continue
        if behavior == "unregistered":
            authenticate(voter, voter.data)
            continue
        if behavior == "wrong-data":
            authenticate(voter, replace(voter.data, first_name=voter.data.first_name + "x"))

        code = authenticate(voter, voter.data)
        if code is None:
            continue

        if behavior in ("honest", "wrong-data"):
            vote(voter, candidate_id, code)
        elif behavior == "double-vote":
            vote(voter, candidate_id, code)
            vote(voter, candidate_id, code)
        elif behavior == "replay-otp":
            pool = [c for c in captured[:-1] if c != code]
            stolen = rng.choice(pool) if pool else _perturb(code, 0)
            vote(voter, candidate_id, stolen)
            vote(voter, candidate_id, code)
        elif behavior == "guess-otp":
            for attempt in range(scenario.guess_attempts):
                vote(voter, candidate_id, _perturb(code, attempt))
            vote(voter, candidate_id, code)
        elif behavior == "late-vote":
            clock.advance(scenario.otp_window_seconds + 1)
            vote(voter, candidate_id, code)
            fresh = authenticate(voter, voter.data)
            if fresh is not None:
                vote(voter, candidate_id, fresh)

    contract.advance_phase(chair)

    snapshot = contract.results(chair)
    recount: Counter[int] = Counter()
    for tx, _block_index in ledger.transactions():
        if tx.kind == TxKind.VOTE_CAST:
            recount[parse_vote_payload(tx.payload)] += 1
    tally_consistent = (
        all(votes == recount.get(cid, 0) for cid, _name, votes in snapshot.counts)
        and sum(recount.values()) == accepted
    )

    chain_report = ledger.verify_chain()
    replayed = replay_state(ledger)
    live = contract.state()
    replay_match = replayed == live and replayed.digest() == live.digest()

    report = RunReport(
        seed=scenario.seed,
        voters=scenario.total_voters,
        auth_attempts=auth_attempts,
        auth_rejections=tuple(sorted(auth_rejections.items())),
        vote_attempts=vote_attempts,
        accepted=accepted,
        rejections=tuple(sorted(rejections.items())),
        tally=snapshot.counts,
        total_votes=snapshot.total_votes,
        blocks=len(ledger),
        head_hash=ledger.head().block_hash,
        chain_valid=chain_report.valid,
        replay_match=replay_match,
        tally_consistent=tally_consistent,
        vote_receipts=tuple(receipts),
        elapsed_seconds=time.monotonic() - started,
    )
    fields: list[str] = []
    for voter in voters:
        fields.extend(
            (voter.data.id_number, voter.data.first_name, voter.data.last_name, voter.data.phone)
        )
    return RunDetail(
        report=report,
        personal_fields=tuple(fields),
        delivered_codes=tuple(transport.all_codes()),
        chain=ledger.serialize(),
        state_digest=live.digest(),
    )


def run_scenario(path: str | Path, seed: int | None = None, dump_path: str | Path | None = None) -> RunReport:
    """Load and execute a scenario file. An explicit seed overrides the
    embedded one; having neither is an error."""
    scenario = load_scenario(path)
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    return run(scenario, dump_path=dump_path)


def verify_chain_file(path: str | Path) -> VerificationReport:
    """Structural, hash, and replay verification of a chain dump.

    Corrupt or truncated input comes back as an invalid report, never an
    exception; only a missing file raises (OSError).
    """
    data = Path(path).read_bytes()
    report = verify_chain_bytes(data)
    if not report.valid:
        return report
    try:
        replay_state(Ledger.from_bytes(data))
    except ReplayError as exc:
        return VerificationReport(False, None, f"replay: {exc}")
    return report
