// Typed client for the reqforge JSON API. The UI performs no semantics of
// its own: every formula, key, diagram and verdict comes from the service.

export type Span = [number, number] | null;

export interface TemplateKey {
  scope: string;
  condition: string;
  timing: string;
}

export interface DiagramSegment {
  label: string;
  kind: "scope-active" | "condition-trigger" | "response-window";
  start: string;
  end: string;
}

export interface ParseOk {
  requirement: { id: string; component: string; text: string };
  spans: Record<string, Span>;
  template_key: TemplateKey;
  future_ltl: string;
  past_ltl: string | null;
  past_omitted_reason?: string;
  diagram: DiagramSegment[];
  never_rewrite?: { text: string; future_ltl: string };
  revision: number | null;
}

export interface ParseIssue {
  message: string;
  offset: number;
  line: number;
  col: number;
}

export interface ParseErr {
  errors: ParseIssue[];
  revision: number | null;
}

export type ParseResult =
  | { ok: true; body: ParseOk }
  | { ok: false; body: ParseErr };

export interface RequirementRow {
  id: string;
  parent_id: string | null;
  text: string;
  rationale: string | null;
  template_key: TemplateKey;
}

export interface MetricsReport {
  project: string;
  total: number;
  scope: Record<string, number>;
  condition: Record<string, number>;
  timing: Record<string, number>;
  child_count: number;
}

export interface SimulateStart {
  session: string;
  formula: string;
  vars: string[];
  verdict: string;
  verdicts: string[];
  final: boolean;
  closed: boolean;
}

export interface StepResult {
  verdict: string;
  verdicts: string[];
  final: boolean;
  closed: boolean;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class Api {
  constructor(readonly base: string = "") {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    return fetch(this.base + path, init);
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.request(method, path, body);
    const payload = await res.json().catch(() => ({}));
    if (!res.ok) {
      const detail = (payload as { error?: string }).error ?? res.statusText;
      throw new ApiError(res.status, detail);
    }
    return payload as T;
  }

  async parse(text: string, revision: number): Promise<ParseResult> {
    const res = await this.request("POST", "/api/requirements/parse", {
      text,
      revision,
    });
    const body = await res.json();
    if (res.status === 200) return { ok: true, body: body as ParseOk };
    if (res.status === 422) return { ok: false, body: body as ParseErr };
    throw new ApiError(res.status, "parse request failed");
  }

  listProjects(): Promise<{ projects: string[] }> {
    return this.json("GET", "/api/sets");
  }

  listRequirements(project: string): Promise<{ requirements: RequirementRow[] }> {
    return this.json("GET", `/api/sets/${encodeURIComponent(project)}/requirements`);
  }

  upsertRequirement(project: string, row: {
    id: string; text: string; parent_id?: string | null; rationale?: string | null;
  }): Promise<RequirementRow> {
    return this.json("PUT",
      `/api/sets/${encodeURIComponent(project)}/requirements/${encodeURIComponent(row.id)}`,
      row);
  }

  metrics(project: string): Promise<MetricsReport> {
    return this.json("GET", `/api/sets/${encodeURIComponent(project)}/metrics`);
  }

  simulate(body: {
    formula?: string; requirement_id?: string; project?: string;
  }): Promise<SimulateStart> {
    return this.json("POST", "/api/simulate", { ...body, events: [] });
  }

  step(session: string, event: Record<string, unknown>): Promise<StepResult> {
    return this.json("PATCH", `/api/simulate/${session}`, { event });
  }
}
