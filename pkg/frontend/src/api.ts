// Typed client for the election HTTP API. Every method maps 1:1 to a
// documented endpoint; nothing else is called.

export interface SessionInfo {
  token: string;
  address: string;
  expires_at: number;
}

export interface PersonalData {
  id_number: string;
  first_name: string;
  last_name: string;
  phone: string;
}

export interface TxResult {
  tx_hash: string;
}

export interface RegisterResult extends TxResult {
  voter: string;
  password?: string;
}

export interface CandidateRow {
  id: number;
  name: string;
  votes: number;
}

export interface ResultsView {
  phase: string;
  total_votes: number;
  counts: CandidateRow[];
}

export interface ReceiptView {
  tx_hash: string;
  block_index: number;
  sender: string;
  candidate_id: number;
}

export interface ChainStatus {
  valid: boolean;
  first_bad_index: number | null;
  reason: string | null;
}

export interface InboxView {
  address: string;
  codes: string[];
}

// A failed request, carrying the server's stable error code.
export class ApiFault extends Error {
  constructor(
    public readonly code: string,
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class VoteApi {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  hasSession(): boolean {
    return this.token !== null;
  }

  restoreSession(token: string): void {
    this.token = token;
  }

  clearSession(): void {
    this.token = null;
  }

  async login(address: string, password: string): Promise<SessionInfo> {
    const session = await this.request<SessionInfo>("POST", "/session", {
      address,
      password,
    });
    this.token = session.token;
    return session;
  }

  initElection(trusted: string[], candidates: string[], otpWindowSeconds: number) {
    return this.request<TxResult>("POST", "/authority/init", {
      trusted,
      candidates: candidates.map((name) => ({ name })),
      otp_window_seconds: otpWindowSeconds,
    });
  }

  advancePhase() {
    return this.request<TxResult & { phase: string }>("POST", "/authority/phase/advance", {});
  }

  register(personalData: PersonalData, voter?: string) {
    const body: Record<string, unknown> = { personal_data: personalData };
    if (voter !== undefined) {
      body.voter = voter;
    }
    return this.request<RegisterResult>("POST", "/authority/register", body);
  }

  authenticate(personalData: PersonalData) {
    return this.request<TxResult & { status: string }>("POST", "/voter/authenticate", {
      personal_data: personalData,
    });
  }

  vote(candidateId: number, otpCode: string) {
    return this.request<TxResult & { block_index: number }>("POST", "/voter/vote", {
      candidate_id: candidateId,
      otp_code: otpCode,
    });
  }

  results() {
    return this.request<ResultsView>("GET", "/results");
  }

  receipt(txHash: string) {
    return this.request<ReceiptView>("GET", `/receipt/${txHash}`);
  }

  chainVerify() {
    return this.request<ChainStatus>("GET", "/chain/verify");
  }

  devInbox(address: string) {
    return this.request<InboxView>("GET", `/dev/inbox/${address}`);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token !== null) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "Unknown";
      let detail = response.statusText;
      try {
        const payload = await response.json();
        if (typeof payload.error === "string") {
          code = payload.error;
        }
        if (typeof payload.detail === "string") {
          detail = payload.detail;
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiFault(code, response.status, detail);
    }
    return (await response.json()) as T;
  }
}
