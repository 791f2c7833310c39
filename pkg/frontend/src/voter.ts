// Voter panel: login, identify, enter code, vote, keep the receipt.
// The screen is a pure function of the flow state plus the last API
// responses; nothing is assumed ahead of a confirmed response.

import { ApiFault, PersonalData, ReceiptView, ResultsView, VoteApi } from "./api.js";
import { FlowEvent, VoterFlowState, initialState, transition } from "./flow.js";
import { clear, el, textInput } from "./dom.js";
import { messageFor } from "./messages.js";

const SESSION_KEY = "votechain.voter.session";

interface StoredSession {
  token: string;
  address: string;
}

function loadStoredSession(): StoredSession | null {
  try {
    const raw = sessionStorage.getItem(SESSION_KEY);
    return raw === null ? null : (JSON.parse(raw) as StoredSession);
  } catch {
    return null;
  }
}

export class VoterPanel {
  state: VoterFlowState = initialState;
  private notice: string | null = null;
  private receiptView: ReceiptView | null = null;
  private resultsView: ResultsView | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: VoteApi,
  ) {
    const stored = loadStoredSession();
    if (stored !== null) {
      // A token alone proves at most a login; everything past LoggedIn
      // needs fresh API confirmation, so that is where a reload lands.
      this.api.restoreSession(stored.token);
      this.state = { kind: "LoggedIn", address: stored.address };
    }
    this.render();
  }

  currentAddress(): string | null {
    const s = this.state;
    return s.kind === "LoggedIn" || s.kind === "AwaitingOtp" || s.kind === "ReadyToVote"
      ? s.address
      : null;
  }

  private apply(event: FlowEvent): void {
    const result = transition(this.state, event);
    this.state = result.state;
    this.notice = result.notice === undefined ? null : messageFor(result.notice);
    if (this.state.kind === "LoggedOut") {
      this.api.clearSession();
      sessionStorage.removeItem(SESSION_KEY);
    }
    this.render();
  }

  private fault(error: unknown): void {
    if (error instanceof ApiFault) {
      if (error.code === "BadSession") {
        sessionStorage.removeItem(SESSION_KEY);
        this.api.clearSession();
        this.state = initialState;
        this.notice = messageFor("BadSession");
        this.render();
        return;
      }
      this.apply({ type: "api-error", code: error.code });
    } else {
      this.notice = "The server could not be reached.";
      this.render();
    }
  }

  private render(): void {
    clear(this.root);
    if (this.notice !== null) {
      this.root.append(el("p", { class: "notice", "data-role": "notice" }, [this.notice]));
    }
    switch (this.state.kind) {
      case "LoggedOut":
        this.renderLogin();
        break;
      case "LoggedIn":
        this.renderIdentify();
        break;
      case "AwaitingOtp":
      case "ReadyToVote":
        this.renderVote();
        break;
      case "Voted":
        this.renderReceipt(this.state.receipt);
        break;
      case "Error":
        this.renderTerminal(this.state.code);
        break;
    }
  }

  private renderLogin(): void {
    const address = textInput("address", "0x account address");
    const password = textInput("password", "password", "password");
    const form = el("form", { "data-role": "login-form" }, [
      el("h2", {}, ["Voter login"]),
      address,
      password,
      el("button", { type: "submit" }, ["Log in"]),
    ]);
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      try {
        const session = await this.api.login(address.value.trim(), password.value);
        sessionStorage.setItem(
          SESSION_KEY,
          JSON.stringify({ token: session.token, address: session.address }),
        );
        this.apply({ type: "session-ok", address: session.address });
      } catch (error) {
        this.fault(error);
      }
    });
    this.root.append(form);
  }

  private renderIdentify(): void {
    const idNumber = textInput("id_number", "ID card number");
    const firstName = textInput("first_name", "first name");
    const lastName = textInput("last_name", "last name");
    const phone = textInput("phone", "mobile number");
    const form = el("form", { "data-role": "identify-form" }, [
      el("h2", {}, ["Confirm your identity"]),
      el("p", {}, ["A one-time code will be sent to your registered phone."]),
      idNumber,
      firstName,
      lastName,
      phone,
      el("button", { type: "submit" }, ["Send my code"]),
    ]);
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const data: PersonalData = {
        id_number: idNumber.value.trim(),
        first_name: firstName.value.trim(),
        last_name: lastName.value.trim(),
        phone: phone.value.trim(),
      };
      try {
        await this.api.authenticate(data);
        this.apply({ type: "authenticate-ok" });
      } catch (error) {
        this.fault(error);
      }
    });
    this.root.append(form, this.logoutButton());
  }

  private renderVote(): void {
    const code = textInput("otp_code", "6-digit code");
    code.setAttribute("maxlength", "6");
    code.setAttribute("inputmode", "numeric");
    const candidate = textInput("candidate_id", "candidate number");
    candidate.setAttribute("inputmode", "numeric");
    const submit = el("button", { type: "submit", "data-role": "vote-button" }, ["Cast my vote"]);
    submit.disabled = this.state.kind !== "ReadyToVote";
    const form = el("form", { "data-role": "vote-form" }, [
      el("h2", {}, ["Cast your vote"]),
      el("p", {}, ["Enter the code you received and your candidate's number."]),
      candidate,
      code,
      submit,
    ]);
    code.addEventListener("input", () => {
      this.applyQuiet({ type: "code-entry", complete: /^\d{6}$/.test(code.value) });
      submit.disabled = this.state.kind !== "ReadyToVote";
    });
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const entered = code.value;
      code.value = ""; // the code is never kept after submission
      try {
        const result = await this.api.vote(Number(candidate.value), entered);
        this.apply({ type: "vote-ok", receipt: result.tx_hash });
      } catch (error) {
        // The box was cleared, so readiness drops before the error lands.
        this.applyQuiet({ type: "code-entry", complete: false });
        this.fault(error);
      }
    });
    this.root.append(form, this.logoutButton());
  }

  // State bookkeeping without a re-render, for per-keystroke events.
  private applyQuiet(event: FlowEvent): void {
    this.state = transition(this.state, event).state;
  }

  private renderReceipt(receipt: string): void {
    const verify = el("button", { "data-role": "verify-button" }, ["Verify my receipt"]);
    const detail = el("div", { "data-role": "receipt-detail" });
    verify.addEventListener("click", async () => {
      try {
        this.receiptView = await this.api.receipt(receipt);
        clear(detail);
        detail.append(
          el("p", {}, [
            `Recorded in block ${this.receiptView.block_index} for candidate ` +
              `${this.receiptView.candidate_id}.`,
          ]),
        );
      } catch (error) {
        clear(detail);
        detail.append(el("p", { class: "notice" }, [
          error instanceof ApiFault ? messageFor(error.code) : "The server could not be reached.",
        ]));
      }
    });
    const results = el("button", { "data-role": "results-button" }, ["View results"]);
    const resultsBox = el("div", { "data-role": "results-box" });
    results.addEventListener("click", async () => {
      try {
        this.resultsView = await this.api.results();
        clear(resultsBox);
        resultsBox.append(resultsTable(this.resultsView));
      } catch (error) {
        clear(resultsBox);
        resultsBox.append(el("p", { class: "notice" }, [
          error instanceof ApiFault ? messageFor(error.code) : "The server could not be reached.",
        ]));
      }
    });
    this.root.append(
      el("div", { "data-role": "voted-screen" }, [
        el("h2", {}, ["Your vote is in"]),
        el("p", {}, ["Keep this receipt. Anyone can check it later:"]),
        el("code", { "data-role": "receipt" }, [receipt]),
        verify,
        detail,
        results,
        resultsBox,
      ]),
      this.logoutButton(),
    );
  }

  private renderTerminal(code: string): void {
    this.root.append(
      el("div", { "data-role": "terminal-screen" }, [
        el("h2", {}, ["Nothing more to do here"]),
        el("p", {}, [messageFor(code)]),
      ]),
      this.logoutButton(),
    );
  }

  private logoutButton(): HTMLButtonElement {
    const button = el("button", { "data-role": "logout", class: "secondary" }, ["Start over"]);
    button.addEventListener("click", () => this.apply({ type: "logout" }));
    return button;
  }
}

export function resultsTable(view: ResultsView): HTMLTableElement {
  const rows = view.counts.map((row) =>
    el("tr", {}, [
      el("td", {}, [String(row.id)]),
      el("td", {}, [row.name]),
      el("td", {}, [String(row.votes)]),
    ]),
  );
  return el("table", { "data-role": "results-table" }, [
    el("thead", {}, [
      el("tr", {}, [el("th", {}, ["#"]), el("th", {}, ["Candidate"]), el("th", {}, ["Votes"])]),
    ]),
    el("tbody", {}, rows),
  ]);
}
