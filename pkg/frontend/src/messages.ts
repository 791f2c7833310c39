// One human-readable line per server error code. Codes are stable; the
// wording here is the UI's only interpretation layer.

const MESSAGES: Record<string, string> = {
  LoginFailed: "That address and password do not match. Check both and try again.",
  BadSession: "Your session has ended. Please log in again.",
  MalformedBody: "The request was not understood. Check the form fields.",
  Unauthorized: "This account is not allowed to do that.",
  NotInitialized: "The election has not been set up yet. Please come back later.",
  AlreadyInitialized: "The election is already set up.",
  InvalidConfig: "The election settings are not valid.",
  WrongPhase: "The election is not in the right phase for that right now.",
  AlreadyClosed: "The election has already closed.",
  AlreadyRegistered: "This account is already registered to vote.",
  NotRegistered: "This account is not registered for the election.",
  AuthFailed: "Those personal details do not match the registration. Check them and try again.",
  InvalidPersonalData: "Those personal details are incomplete or not usable.",
  EmptyField: "Please fill in every field of the form.",
  SeparatorInField: "Fields may not contain the '|' character.",
  AlreadyVoted: "A vote has already been cast from this account. Each account votes once.",
  NoOtpIssued: "No code has been sent yet. Confirm your details first.",
  OtpInvalid: "That code is not right. Check the digits and try again.",
  OtpExpired: "That code has expired. Confirm your details to receive a new one.",
  UnknownCandidate: "That candidate number is not on the ballot.",
  NotFound: "Nothing was found under that receipt hash.",
  NotAVote: "That receipt does not belong to a vote.",
  OutOfRange: "There is no block at that position.",
  DuplicateChannel: "A delivery channel already exists for this account.",
};

const FALLBACK = "Something went wrong. Please try again.";

export function messageFor(code: string): string {
  return MESSAGES[code] ?? FALLBACK;
}

export function knownCodes(): string[] {
  return Object.keys(MESSAGES);
}
