// Authority panel: set up the election, register citizens, advance
// phases, read the tally. Every control maps straight onto one endpoint
// and the phase indicator only trusts what the server last said.

import { ApiFault, PersonalData, ResultsView, VoteApi } from "./api.js";
import { clear, el, textInput } from "./dom.js";
import { messageFor } from "./messages.js";
import { resultsTable } from "./voter.js";

export class AuthorityPanel {
  phase: string | null = null;
  private address: string | null = null;
  private notice: string | null = null;
  private lastRegistration: { txHash: string; voter: string; password?: string } | null = null;
  private lastResults: ResultsView | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: VoteApi,
  ) {
    this.render();
  }

  private async refreshPhase(): Promise<void> {
    try {
      const view = await this.api.results();
      this.phase = view.phase;
      this.lastResults = view;
    } catch (error) {
      if (error instanceof ApiFault && error.code === "NotInitialized") {
        this.phase = "setup";
        this.lastResults = null;
      } else {
        throw error;
      }
    }
  }

  private fault(error: unknown): void {
    this.notice =
      error instanceof ApiFault ? messageFor(error.code) : "The server could not be reached.";
    this.render();
  }

  private render(): void {
    clear(this.root);
    if (this.notice !== null) {
      this.root.append(el("p", { class: "notice", "data-role": "notice" }, [this.notice]));
    }
    if (this.address === null) {
      this.renderLogin();
    } else {
      this.renderDesk();
    }
  }

  private renderLogin(): void {
    const address = textInput("address", "0x authority address");
    const password = textInput("password", "password", "password");
    const form = el("form", { "data-role": "authority-login-form" }, [
      el("h2", {}, ["Authority login"]),
      address,
      password,
      el("button", { type: "submit" }, ["Log in"]),
    ]);
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      try {
        const session = await this.api.login(address.value.trim(), password.value);
        this.address = session.address;
        this.notice = null;
        await this.refreshPhase();
        this.render();
      } catch (error) {
        this.fault(error);
      }
    });
    this.root.append(form);
  }

  private renderDesk(): void {
    this.root.append(
      el("p", { "data-role": "phase" }, [`Current phase: ${this.phase ?? "unknown"}`]),
    );
    if (this.phase === "setup") {
      this.renderInitForm();
    }
    this.renderRegisterForm();
    this.renderAdvanceButton();
    this.renderResults();
  }

  private renderInitForm(): void {
    const candidates = textInput("candidates", "candidates, comma-separated");
    const window = textInput("otp_window", "code validity (seconds)");
    window.value = "300";
    const form = el("form", { "data-role": "init-form" }, [
      el("h2", {}, ["Set up the election"]),
      candidates,
      window,
      el("button", { type: "submit" }, ["Initialize"]),
    ]);
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const names = candidates.value.split(",").map((n) => n.trim()).filter((n) => n !== "");
      try {
        await this.api.initElection([this.address as string], names, Number(window.value));
        this.notice = null;
        await this.refreshPhase();
        this.render();
      } catch (error) {
        this.fault(error);
      }
    });
    this.root.append(form);
  }

  private renderRegisterForm(): void {
    const idNumber = textInput("id_number", "ID card number");
    const firstName = textInput("first_name", "first name");
    const lastName = textInput("last_name", "last name");
    const phone = textInput("phone", "mobile number");
    const submit = el("button", { type: "submit" }, ["Register citizen"]);
    const open = this.phase === "registration";
    for (const input of [idNumber, firstName, lastName, phone, submit]) {
      input.disabled = !open;
    }
    const form = el("form", { "data-role": "register-form" }, [
      el("h2", {}, ["Register a citizen"]),
      open
        ? el("p", {}, ["A fresh account and its password are issued on success."])
        : el("p", { class: "notice" }, ["Registration is only open during the registration phase."]),
      idNumber,
      firstName,
      lastName,
      phone,
      submit,
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
        const result = await this.api.register(data);
        this.lastRegistration = {
          txHash: result.tx_hash,
          voter: result.voter,
          password: result.password,
        };
        this.notice = null;
        await this.refreshPhase();
        this.render();
      } catch (error) {
        await this.refreshPhase().catch(() => undefined);
        this.fault(error);
      }
    });
    this.root.append(form);
    if (this.lastRegistration !== null) {
      const { txHash, voter, password } = this.lastRegistration;
      this.root.append(
        el("div", { class: "toast", "data-role": "register-toast" }, [
          el("p", {}, [`Registered ${voter} (receipt ${txHash}).`]),
          password !== undefined
            ? el("p", {}, [`Hand over the one-time password: ${password}`])
            : el("p", {}, ["Existing account registered."]),
        ]),
      );
    }
  }

  private renderAdvanceButton(): void {
    const button = el("button", { "data-role": "advance-button" }, ["Advance phase"]);
    button.addEventListener("click", async () => {
      try {
        await this.api.advancePhase();
        this.notice = null;
        await this.refreshPhase();
        this.render();
      } catch (error) {
        this.fault(error);
      }
    });
    this.root.append(button);
  }

  private renderResults(): void {
    const box = el("div", { "data-role": "authority-results" });
    if (this.lastResults !== null) {
      box.append(
        el("p", {}, [`Total votes: ${this.lastResults.total_votes}`]),
        resultsTable(this.lastResults),
      );
    }
    const refresh = el("button", { "data-role": "refresh-results", class: "secondary" }, [
      "Refresh results",
    ]);
    refresh.addEventListener("click", async () => {
      try {
        await this.refreshPhase();
        this.notice = null;
        this.render();
      } catch (error) {
        this.fault(error);
      }
    });
    this.root.append(el("h2", {}, ["Results"]), box, refresh);
  }
}
