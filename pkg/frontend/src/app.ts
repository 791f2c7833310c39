// Application shell: voter and authority tabs, dev inbox only when the
// build says so. Voter and authority keep separate sessions.

import { VoteApi } from "./api.js";
import { AuthorityPanel } from "./authority.js";
import { DevInboxPanel } from "./dev.js";
import { VoterPanel } from "./voter.js";
import { el } from "./dom.js";

export interface AppOptions {
  devPanel: boolean;
  baseUrl?: string;
  fetchFn?: (input: string, init?: RequestInit) => Promise<Response>;
}

export interface AppHandles {
  voter: VoterPanel;
  authority: AuthorityPanel;
  dev: DevInboxPanel | null;
}

export function bootstrap(root: HTMLElement, options: AppOptions): AppHandles {
  const makeApi = () => new VoteApi(options.baseUrl ?? "", options.fetchFn);

  const voterRoot = el("section", { id: "voter-panel" });
  const authorityRoot = el("section", { id: "authority-panel", hidden: "" });
  const tabs = el("nav", { class: "tabs" });
  const sections: Record<string, HTMLElement> = {
    Voter: voterRoot,
    Authority: authorityRoot,
  };

  let devRoot: HTMLElement | null = null;
  if (options.devPanel) {
    devRoot = el("section", { id: "dev-panel-root", hidden: "" });
    sections["Dev inbox"] = devRoot;
  }

  for (const [label, section] of Object.entries(sections)) {
    const button = el("button", { "data-tab": label }, [label]);
    button.addEventListener("click", () => {
      for (const other of Object.values(sections)) {
        other.hidden = other !== section;
      }
    });
    tabs.append(button);
  }

  root.append(el("h1", {}, ["Election portal"]), tabs, ...Object.values(sections));

  const voter = new VoterPanel(voterRoot, makeApi());
  const authority = new AuthorityPanel(authorityRoot, makeApi());
  const dev =
    devRoot !== null
      ? new DevInboxPanel(devRoot, makeApi(), () => voter.currentAddress())
      : null;
  return { voter, authority, dev };
}
