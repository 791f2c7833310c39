// @vitest-environment jsdom
// Scripted voter walks against the fake server: the full happy path with
// the code read from the dev panel, the expired-code detour, and the
// terminal already-voted screen.

import { beforeEach, expect, it } from "vitest";

import { AppHandles, bootstrap } from "../src/app.js";
import { FakeServer } from "./fake-server.js";

const PD = {
  id_number: "AK123456",
  first_name: "Maria",
  last_name: "Papadopoulou",
  phone: "6971234567",
};

let server: FakeServer;
let root: HTMLElement;
let app: AppHandles;

beforeEach(() => {
  sessionStorage.clear();
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.append(root);
  server = new FakeServer();
  server.seedElection(["Alice", "Bob"]);
  app = bootstrap(root, { devPanel: true, fetchFn: server.fetch });
});

async function tick(): Promise<void> {
  for (let i = 0; i < 8; i += 1) {
    await Promise.resolve();
  }
  await new Promise((resolve) => setTimeout(resolve, 0));
}

function fill(scope: ParentNode, name: string, value: string): void {
  const input = scope.querySelector(`input[name="${name}"]`) as HTMLInputElement;
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

async function submit(scope: ParentNode, role: string): Promise<void> {
  const form = scope.querySelector(`form[data-role="${role}"]`) as HTMLFormElement;
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
  await tick();
}

function panel(): HTMLElement {
  return root.querySelector("#voter-panel") as HTMLElement;
}

async function loginAndIdentify(creds: { address: string; password: string }): Promise<void> {
  fill(panel(), "address", creds.address);
  fill(panel(), "password", creds.password);
  await submit(panel(), "login-form");
  expect(panel().querySelector('[data-role="identify-form"]')).not.toBeNull();
  fill(panel(), "id_number", PD.id_number);
  fill(panel(), "first_name", PD.first_name);
  fill(panel(), "last_name", PD.last_name);
  fill(panel(), "phone", PD.phone);
  await submit(panel(), "identify-form");
}

async function readLatestCode(address: string): Promise<string> {
  const dev = root.querySelector("#dev-panel-root") as HTMLElement;
  fill(dev, "address", address);
  (dev.querySelector('[data-role="inbox-refresh"]') as HTMLButtonElement).click();
  await tick();
  const entries = dev.querySelectorAll('[data-role="inbox-codes"] li');
  expect(entries.length).toBeGreaterThan(0);
  return entries[entries.length - 1].textContent as string;
}

it("walks login, identify, code from the dev panel, vote, and a resolving receipt", async () => {
  const voter = server.seedVoter(PD);
  await loginAndIdentify(voter);
  expect(panel().querySelector('[data-role="vote-form"]')).not.toBeNull();

  const voteButton = panel().querySelector('[data-role="vote-button"]') as HTMLButtonElement;
  expect(voteButton.disabled).toBe(true);

  const code = await readLatestCode(voter.address);
  expect(code).toMatch(/^\d{6}$/);

  fill(panel(), "candidate_id", "1");
  fill(panel(), "otp_code", code);
  expect(
    (panel().querySelector('[data-role="vote-button"]') as HTMLButtonElement).disabled,
  ).toBe(false);
  await submit(panel(), "vote-form");

  const receipt = panel().querySelector('code[data-role="receipt"]');
  expect(receipt).not.toBeNull();
  const hash = receipt?.textContent as string;
  expect(hash).toMatch(/^0x[0-9a-f]{64}$/);

  // The displayed hash must resolve through the receipt endpoint.
  (panel().querySelector('[data-role="verify-button"]') as HTMLButtonElement).click();
  await tick();
  expect(server.receiptLookups).toContain(hash);
  const detail = panel().querySelector('[data-role="receipt-detail"]')?.textContent ?? "";
  expect(detail).toContain("block");
  expect(detail).toContain("candidate 1");

  // Once the election closes, the voted screen can show public results.
  server.phase = "closed";
  (panel().querySelector('[data-role="results-button"]') as HTMLButtonElement).click();
  await tick();
  const table = panel().querySelector('[data-role="results-table"]');
  expect(table?.textContent).toContain("Alice");
  expect(table?.textContent).toContain("1");
});

it("returns to the identify step when the code expired, then recovers", async () => {
  const voter = server.seedVoter(PD);
  await loginAndIdentify(voter);

  server.forcedVoteFault = "OtpExpired";
  fill(panel(), "candidate_id", "1");
  fill(panel(), "otp_code", "123456");
  await submit(panel(), "vote-form");

  expect(panel().querySelector('[data-role="identify-form"]')).not.toBeNull();
  expect(panel().querySelector('[data-role="notice"]')?.textContent).toContain("expired");

  // Re-identifying issues a fresh code and the vote goes through.
  fill(panel(), "id_number", PD.id_number);
  fill(panel(), "first_name", PD.first_name);
  fill(panel(), "last_name", PD.last_name);
  fill(panel(), "phone", PD.phone);
  await submit(panel(), "identify-form");
  const code = await readLatestCode(voter.address);
  fill(panel(), "candidate_id", "2");
  fill(panel(), "otp_code", code);
  await submit(panel(), "vote-form");
  expect(panel().querySelector('code[data-role="receipt"]')).not.toBeNull();
});

it("rejects a wrong code but lets the voter retry with the right one", async () => {
  const voter = server.seedVoter(PD);
  await loginAndIdentify(voter);
  const code = await readLatestCode(voter.address);

  fill(panel(), "candidate_id", "1");
  fill(panel(), "otp_code", "000000");
  await submit(panel(), "vote-form");
  expect(panel().querySelector('[data-role="vote-form"]')).not.toBeNull();
  expect(panel().querySelector('[data-role="notice"]')?.textContent).toContain("not right");
  expect(
    (panel().querySelector('[data-role="vote-button"]') as HTMLButtonElement).disabled,
  ).toBe(true);

  fill(panel(), "candidate_id", "1");
  fill(panel(), "otp_code", code);
  await submit(panel(), "vote-form");
  expect(panel().querySelector('code[data-role="receipt"]')).not.toBeNull();
});

it("shows the terminal screen when this account already voted", async () => {
  const voter = server.seedVoter(PD);
  await loginAndIdentify(voter);
  const code = await readLatestCode(voter.address);
  fill(panel(), "candidate_id", "1");
  fill(panel(), "otp_code", code);
  await submit(panel(), "vote-form");

  (panel().querySelector('[data-role="logout"]') as HTMLButtonElement).click();
  await tick();
  await loginAndIdentify(voter);

  expect(panel().querySelector('[data-role="terminal-screen"]')).not.toBeNull();
  expect(panel().textContent).toContain("already been cast");
});

it("survives a reload: the stored session lands back on the identify step", async () => {
  const voter = server.seedVoter(PD);
  fill(panel(), "address", voter.address);
  fill(panel(), "password", voter.password);
  await submit(panel(), "login-form");

  const second = document.createElement("div");
  document.body.append(second);
  bootstrap(second, { devPanel: true, fetchFn: server.fetch });
  expect(
    second.querySelector("#voter-panel [data-role='identify-form']"),
  ).not.toBeNull();
});

it("mounts no dev panel unless the build asks for one", () => {
  expect(root.querySelector("#dev-panel-root")).not.toBeNull();
  expect(app.dev).not.toBeNull();

  const plain = document.createElement("div");
  document.body.append(plain);
  const handles = bootstrap(plain, { devPanel: false, fetchFn: server.fetch });
  expect(plain.querySelector("#dev-panel-root")).toBeNull();
  expect(handles.dev).toBeNull();
});
