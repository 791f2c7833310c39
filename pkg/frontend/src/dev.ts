// Developer inbox: reads codes delivered through the mock transport so a
// single operator can complete the whole loop. Only ever mounted by the
// dev build; the endpoint itself 404s unless the server enables it.

import { ApiFault, VoteApi } from "./api.js";
import { clear, el, textInput } from "./dom.js";

export class DevInboxPanel {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: VoteApi,
    private readonly defaultAddress: () => string | null,
  ) {
    this.render();
  }

  private render(): void {
    const address = textInput("address", "0x voter address");
    const codes = el("ul", { "data-role": "inbox-codes" });
    const status = el("p", { "data-role": "inbox-status" });
    const refresh = el("button", { "data-role": "inbox-refresh" }, ["Fetch codes"]);
    refresh.addEventListener("click", async () => {
      const target = address.value.trim() || this.defaultAddress() || "";
      try {
        const inbox = await this.api.devInbox(target);
        clear(codes);
        for (const code of inbox.codes) {
          codes.append(el("li", {}, [code]));
        }
        status.textContent = inbox.codes.length === 0 ? "No codes delivered yet." : "";
      } catch (error) {
        clear(codes);
        status.textContent =
          error instanceof ApiFault
            ? `Inbox unavailable (${error.code}).`
            : "The server could not be reached.";
      }
    });
    this.root.append(
      el("div", { class: "dev-panel", "data-role": "dev-panel" }, [
        el("h2", {}, ["Developer inbox"]),
        el("p", {}, ["Codes from the mock delivery channel. Not part of the real flow."]),
        address,
        refresh,
        status,
        codes,
      ]),
    );
  }
}
