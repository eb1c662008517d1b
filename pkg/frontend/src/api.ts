import type {
  ActorRow,
  Bbox,
  LegalityMatrix,
  PushMessage,
  Reliability,
  ReportDict,
  ReportFilter,
  ReportView,
} from "./types.js";

/**
 * Error raised for any non-2xx response. `name` carries the server's
 * error identifier verbatim (Forbidden, IllegalTransition, ...) so UI
 * code can show exactly what the server said.
 */
export class ApiError extends Error {
  readonly status: number;
  readonly violations: string[];

  constructor(status: number, name: string, message: string, violations: string[] = []) {
    super(message);
    this.name = name || `HTTP${status}`;
    this.status = status;
    this.violations = violations;
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let name = "";
  let message = res.statusText;
  let violations: string[] = [];
  try {
    const body = await res.json();
    name = body.error ?? "";
    message = body.message ?? message;
    if (Array.isArray(body.violations)) violations = body.violations;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(res.status, name, message, violations);
}

export interface PollOptions {
  cursors?: Record<string, number>;
  timeoutMs?: number;
  topics?: string[];
}

/** Thin typed client over the alert server's HTTP API. */
export class ApiClient {
  readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  health(): Promise<{ status: string; reports: number }> {
    return this.request("GET", "/health");
  }

  listReports(filter: ReportFilter = {}, bbox?: Bbox): Promise<ReportDict[]> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(filter)) {
      if (value) query.set(key, value);
    }
    if (bbox) query.set("bbox", bbox.join(","));
    const qs = query.toString();
    return this.request<{ reports: ReportDict[] }>(
      "GET", "/reports" + (qs ? `?${qs}` : ""),
    ).then((body) => body.reports);
  }

  getView(reportId: string): Promise<ReportView> {
    return this.request("GET", `/reports/${encodeURIComponent(reportId)}`);
  }

  submit(report: Record<string, unknown>, idempotencyKey: string): Promise<string> {
    return this.request<{ id: string }>("POST", "/reports", {
      report,
      idempotency_key: idempotencyKey,
    }).then((body) => body.id);
  }

  /** Runs a workflow action; the server answers with the fresh view. */
  action(
    reportId: string,
    actor: string,
    action: string,
    params: Record<string, unknown> = {},
  ): Promise<ReportView> {
    return this.request("POST", `/reports/${encodeURIComponent(reportId)}/actions`, {
      actor,
      action,
      params,
    });
  }

  verify(reportId: string, actor: string, note = ""): Promise<ReportView> {
    return this.request("POST", `/reports/${encodeURIComponent(reportId)}/verify`, {
      actor,
      note,
    });
  }

  reliability(reportId: string): Promise<Reliability> {
    return this.request("GET", `/reports/${encodeURIComponent(reportId)}/reliability`);
  }

  directory(): Promise<ActorRow[]> {
    return this.request<{ actors: ActorRow[] }>("GET", "/directory")
      .then((body) => body.actors);
  }

  legality(): Promise<LegalityMatrix> {
    return this.request<{ matrix: LegalityMatrix }>("GET", "/legality")
      .then((body) => body.matrix);
  }

  subscribe(subscriber: string, topics: string[]): Promise<string[]> {
    return this.request<{ subscriber: string; topics: string[] }>(
      "POST", "/subscriptions", { subscriber, topics },
    ).then((body) => body.topics);
  }

  poll(subscriber: string, options: PollOptions = {}): Promise<PushMessage[]> {
    return this.request<{ messages: PushMessage[] }>("POST", "/poll", {
      subscriber,
      cursors: options.cursors,
      timeout_ms: options.timeoutMs ?? 0,
      topics: options.topics,
    }).then((body) => body.messages);
  }

  async exportCap(reportId: string): Promise<string> {
    const res = await fetch(
      `${this.baseUrl}/reports/${encodeURIComponent(reportId)}/cap`,
    );
    if (!res.ok) throw await parseError(res);
    return res.text();
  }
}
