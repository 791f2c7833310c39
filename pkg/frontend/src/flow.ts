// Voter flow state machine. States advance only on confirmed API
// outcomes; the single local transition (typing a complete code) just
// toggles between AwaitingOtp and ReadyToVote so the vote button can
// enable itself.

export type VoterFlowState =
  | { kind: "LoggedOut" }
  | { kind: "LoggedIn"; address: string }
  | { kind: "AwaitingOtp"; address: string }
  | { kind: "ReadyToVote"; address: string }
  | { kind: "Voted"; receipt: string }
  | { kind: "Error"; code: string };

export type FlowEvent =
  | { type: "session-ok"; address: string }
  | { type: "authenticate-ok" }
  | { type: "vote-ok"; receipt: string }
  | { type: "api-error"; code: string }
  | { type: "code-entry"; complete: boolean }
  | { type: "logout" };

export interface Transition {
  state: VoterFlowState;
  notice?: string;
}

export const initialState: VoterFlowState = { kind: "LoggedOut" };

export function transition(state: VoterFlowState, event: FlowEvent): Transition {
  if (event.type === "logout") {
    return { state: initialState };
  }
  switch (state.kind) {
    case "LoggedOut":
      if (event.type === "session-ok") {
        return { state: { kind: "LoggedIn", address: event.address } };
      }
      if (event.type === "api-error") {
        return { state, notice: event.code };
      }
      return { state };
    case "LoggedIn":
      if (event.type === "authenticate-ok") {
        return { state: { kind: "AwaitingOtp", address: state.address } };
      }
      if (event.type === "api-error") {
        if (event.code === "AlreadyVoted") {
          return { state: { kind: "Error", code: "AlreadyVoted" } };
        }
        return { state, notice: event.code };
      }
      return { state };
    case "AwaitingOtp":
    case "ReadyToVote":
      if (event.type === "vote-ok") {
        return { state: { kind: "Voted", receipt: event.receipt } };
      }
      if (event.type === "api-error") {
        if (event.code === "OtpExpired") {
          // Spent window: the voter must identify again for a fresh code.
          return { state: { kind: "LoggedIn", address: state.address }, notice: "OtpExpired" };
        }
        if (event.code === "AlreadyVoted") {
          return { state: { kind: "Error", code: "AlreadyVoted" } };
        }
        return { state, notice: event.code };
      }
      if (event.type === "code-entry") {
        const kind = event.complete ? "ReadyToVote" : "AwaitingOtp";
        return { state: { kind, address: state.address } };
      }
      return { state };
    case "Voted":
    case "Error":
      // Terminal until logout.
      return { state };
  }
}
