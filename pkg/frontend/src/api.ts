/** Typed client for the designer backend HTTP service. */

import type {
  ComposePreview,
  RenderRequest,
  RenderStats,
  TemplateDoc,
  Violation,
} from "./types.js";

export class ValidationError extends Error {
  constructor(public violations: Violation[]) {
    super(violations.map((v) => `${v.path}: ${v.message}`).join("; "));
    this.name = "ValidationError";
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function fail(res: Response): Promise<never> {
  let detail = res.statusText;
  let payload: unknown;
  try {
    payload = await res.json();
  } catch {
    payload = undefined;
  }
  if (
    payload &&
    typeof payload === "object" &&
    Array.isArray((payload as { violations?: unknown }).violations)
  ) {
    throw new ValidationError(
      (payload as { violations: Violation[] }).violations,
    );
  }
  if (payload && typeof payload === "object" && "error" in payload) {
    detail = String((payload as { error: unknown }).error);
  }
  throw new ApiError(res.status, detail);
}

export class FacadeClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!res.ok) await fail(res);
    return (await res.json()) as T;
  }

  async listTemplates(): Promise<string[]> {
    const payload = await this.json<{ templates: string[] }>("/templates");
    return payload.templates;
  }

  getTemplate(id: string): Promise<TemplateDoc> {
    return this.json<TemplateDoc>(`/templates/${encodeURIComponent(id)}`);
  }

  /** Persist a document; throws ValidationError when the server rejects it. */
  async putTemplate(doc: TemplateDoc): Promise<void> {
    await this.json<{ ok: boolean }>(
      `/templates/${encodeURIComponent(doc.id)}`,
      { method: "PUT", body: JSON.stringify(doc) },
    );
  }

  async validate(doc: TemplateDoc): Promise<Violation[]> {
    const payload = await this.json<{ ok: boolean; violations: Violation[] }>(
      "/validate",
      { method: "POST", body: JSON.stringify(doc) },
    );
    return payload.violations;
  }

  /** Render with stats so the preview, timing, and luminance arrive as JSON. */
  renderStats(req: RenderRequest): Promise<RenderStats> {
    return this.json<RenderStats>("/render", {
      method: "POST",
      body: JSON.stringify({ ...req, stats: true }),
    });
  }

  composePreview(
    doc: TemplateDoc,
    seed: number,
  ): Promise<ComposePreview> {
    return this.json<ComposePreview>("/compose-preview", {
      method: "POST",
      body: JSON.stringify({ template: doc, seed }),
    });
  }
}
