"""Line-oriented scenario files for simulated elections.

A scenario declares a candidate slate and a voter population split into
behavior groups, so attack scripts stay hand-editable text. Grammar, one
directive per line, '#' starts a comment:

    seed 42                  # embedded default, --seed overrides
    otp-window 300           # seconds a code stays valid (default 300)
    authorities 1            # trusted accounts to create (default 1)
    guess-attempts 3         # wrong codes a guessing voter tries (default 3)
    candidates Alice,Bob     # comma-separated, order fixes ids 1..n
    group honest 50          # <behavior> <count> [candidate name]
    group double-vote 5 Bob  # the whole group votes for Bob

Behaviors:

    honest        register, authenticate, vote once with the delivered code
    double-vote   honest, then submit a second vote (rejected AlreadyVoted)
    replay-otp    try a code captured from an earlier voter first (rejected
                  OtpInvalid), then vote honestly
    wrong-data    authenticate once with wrong personal data (rejected
                  AuthFailed), then proceed honestly
    guess-otp     burn guess-attempts wrong codes (each OtpInvalid), then
                  vote with the real one
    late-vote     let the code expire (rejected OtpExpired), re-authenticate,
                  vote with the fresh code
    abstain       register, never vote
    unregistered  skip registration, attempt to authenticate anyway
                  (rejected NotRegistered)

Same scenario + seed always expands to the same action sequence; the
runner draws every random choice from one seeded generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError

BEHAVIORS = (
    "honest",
    "double-vote",
    "replay-otp",
    "wrong-data",
    "guess-otp",
    "late-vote",
    "abstain",
    "unregistered",
)

DEFAULT_OTP_WINDOW = 300
DEFAULT_AUTHORITIES = 1
DEFAULT_GUESS_ATTEMPTS = 3


@dataclass(frozen=True)
class Group:
    behavior: str
    count: int
    candidate: str | None = None


@dataclass(frozen=True)
class Scenario:
    candidates: tuple[str, ...]
    groups: tuple[Group, ...]
    seed: int | None = None
    otp_window_seconds: int = DEFAULT_OTP_WINDOW
    authorities: int = DEFAULT_AUTHORITIES
    guess_attempts: int = DEFAULT_GUESS_ATTEMPTS

    @property
    def total_voters(self) -> int:
        return sum(g.count for g in self.groups)


def _positive_int(token: str, what: str, lineno: int, minimum: int = 1) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"line {lineno}: {what} must be an integer, got {token!r}") from None
    if value < minimum:
        raise ParseError(f"line {lineno}: {what} must be >= {minimum}, got {value}")
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text. Raises ParseError with the offending line number."""
    seed = None
    otp_window = None
    authorities = None
    guess_attempts = None
    candidates: tuple[str, ...] | None = None
    groups: list[Group] = []
    seen: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key != "group" and key in seen:
            raise ParseError(f"line {lineno}: duplicate directive {key!r}")
        seen.add(key)

        if key == "seed":
            seed = _positive_int(rest, "seed", lineno, minimum=0)
        elif key == "otp-window":
            otp_window = _positive_int(rest, "otp-window", lineno)
        elif key == "authorities":
            authorities = _positive_int(rest, "authorities", lineno)
        elif key == "guess-attempts":
            guess_attempts = _positive_int(rest, "guess-attempts", lineno)
        elif key == "candidates":
            names = tuple(name.strip() for name in rest.split(","))
            if not rest or any(not name for name in names):
                raise ParseError(f"line {lineno}: empty candidate name")
            if len(set(names)) != len(names):
                raise ParseError(f"line {lineno}: duplicate candidate name")
            candidates = names
        elif key == "group":
            parts = rest.split(None, 2)
            if len(parts) < 2:
                raise ParseError(f"line {lineno}: group needs a behavior and a count")
            behavior, count_token = parts[0], parts[1]
            candidate = parts[2].strip() if len(parts) == 3 else None
            if behavior not in BEHAVIORS:
                raise ParseError(f"line {lineno}: unknown behavior {behavior!r}")
            count = _positive_int(count_token, "group count", lineno, minimum=0)
            if count > 0:
                groups.append(Group(behavior, count, candidate))
        else:
            raise ParseError(f"line {lineno}: unknown directive {key!r}")

    if candidates is None:
        raise ParseError("scenario declares no candidates")
    if not groups:
        raise ParseError("scenario declares no voter groups")
    for group in groups:
        if group.candidate is not None and group.candidate not in candidates:
            raise ParseError(f"group {group.behavior!r} references unknown candidate {group.candidate!r}")

    return Scenario(
        candidates=candidates,
        groups=tuple(groups),
        seed=seed,
        otp_window_seconds=otp_window if otp_window is not None else DEFAULT_OTP_WINDOW,
        authorities=authorities if authorities is not None else DEFAULT_AUTHORITIES,
        guess_attempts=guess_attempts if guess_attempts is not None else DEFAULT_GUESS_ATTEMPTS,
    )


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))
