"""Command-line driver.

Three subcommands: run a scenario end to end and print the report,
verify a chain dump, or serve the HTTP API. Exit code 0 only when every
invariant check passes.
"""

from __future__ import annotations

import argparse
import json
import sys

from .accounts import AccountStore
from .clock import SystemClock
from .contract import ElectionContract
from .errors import VoteChainError
from .gateway import OtpGateway
from .ledger import Ledger
from .simulation import RunReport, run_scenario, verify_chain_file


def _print_report(report: RunReport) -> None:
    def fmt(pairs):
        return " ".join(f"{code}:{n}" for code, n in pairs) or "-"

    rows = [
        ("seed", report.seed),
        ("voters", report.voters),
        ("auth attempts", report.auth_attempts),
        ("auth rejections", fmt(report.auth_rejections)),
        ("vote attempts", report.vote_attempts),
        ("accepted", report.accepted),
        ("rejections", fmt(report.rejections)),
        ("total votes", report.total_votes),
        ("blocks", report.blocks),
        ("head", "0x" + report.head_hash.hex()),
        ("chain valid", "yes" if report.chain_valid else "NO"),
        ("replay match", "yes" if report.replay_match else "NO"),
        ("tally consistent", "yes" if report.tally_consistent else "NO"),
        ("elapsed", f"{report.elapsed_seconds:.2f}s"),
        ("ok", "yes" if report.ok() else "NO"),
    ]
    width = max(len(label) for label, _ in rows)
    for label, value in rows:
        print(f"{label:<{width}}  {value}")
    print("tally:")
    for cid, name, votes in report.tally:
        print(f"  {cid:>3}  {name:<24} {votes}")


def _cmd_run(args) -> int:
    report = run_scenario(args.scenario, seed=args.seed, dump_path=args.dump)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        _print_report(report)
    return 0 if report.ok() else 1


def _cmd_verify(args) -> int:
    report = verify_chain_file(args.chain)
    if report.valid:
        print("chain valid")
        return 0
    where = "structure" if report.first_bad_index is None else f"block {report.first_bad_index}"
    print(f"chain INVALID ({where}): {report.reason}")
    return 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    clock = SystemClock()
    accounts = AccountStore()
    ledger = Ledger(accounts, clock, persist_path=args.chain)
    gateway = OtpGateway(clock)
    contract = ElectionContract(ledger, gateway, accounts, clock)

    # Trusted accounts exist only in this process; credentials go to stdout
    # once so the operator can log in and initialize the election.
    for i in range(args.authorities):
        account = accounts.create_account()
        # Flush so the line is visible even when stdout goes to a log file.
        print(f"authority[{i}] address={account.address.hex} password={account.password}", flush=True)

    app = create_app(contract, accounts, clock, expose_dev_inbox=args.dev_inbox)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="votechain")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file and print the report")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=None, help="override the embedded seed")
    p_run.add_argument("--dump", default=None, help="persist the chain to this file")
    p_run.add_argument("--json", action="store_true", help="print the report as JSON")
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="verify a chain dump file")
    p_verify.add_argument("chain")
    p_verify.set_defaults(func=_cmd_verify)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--chain", default=None, help="persist the chain to this file")
    p_serve.add_argument("--authorities", type=int, default=1, help="trusted accounts to create at startup")
    p_serve.add_argument("--dev-inbox", action="store_true", help="expose the delivered-code inbox (simulation only)")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VoteChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
