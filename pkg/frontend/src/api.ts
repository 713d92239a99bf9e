/** Typed client for the prediction service.

The four endpoints here are the only backend surface the UI touches.
Server errors arrive as {"type", "message"} bodies; they are mapped to
ApiError with a coarse kind so callers can choose a banner style without
string-matching messages.
*/

import type { AlternativesResponse, JobDocument } from "./types.js";

export type ApiErrorKind =
  | "validation"
  | "busy"
  | "not_found"
  | "provider"
  | "network"
  | "protocol";

export class ApiError extends Error {
  readonly kind: ApiErrorKind;
  readonly status: number | null;
  readonly retryAfterS: number | null;

  constructor(kind: ApiErrorKind, message: string, status: number | null = null, retryAfterS: number | null = null) {
    super(message);
    this.name = "ApiError";
    this.kind = kind;
    this.status = status;
    this.retryAfterS = retryAfterS;
  }
}

function kindForStatus(status: number): ApiErrorKind {
  if (status === 429) return "busy";
  if (status === 404) return "not_found";
  if (status === 422 || status === 400) return "validation";
  if (status >= 500) return "provider";
  return "protocol";
}

export interface PredictRequest {
  query: string;
  alternatives?: string[];
  domain?: string;
  n_images?: number;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: typeof fetch;

  constructor(base = "", fetchFn: typeof fetch = fetch) {
    // strip one trailing slash so base + "/api/..." never doubles up
    this.base = base.endsWith("/") ? base.slice(0, -1) : base;
    this.fetchFn = fetchFn;
  }

  imageUrl(ref: string): string {
    return `${this.base}/api/images/${ref}`;
  }

  async suggestAlternatives(query: string, domain?: string, signal?: AbortSignal): Promise<AlternativesResponse> {
    const body: Record<string, string> = { query };
    if (domain) body.domain = domain;
    return (await this.postJson("/api/alternatives", body, signal)) as AlternativesResponse;
  }

  async submitPredict(request: PredictRequest, signal?: AbortSignal): Promise<string> {
    const doc = (await this.postJson("/api/predict", request, signal)) as { job_id?: unknown };
    if (typeof doc.job_id !== "string") {
      throw new ApiError("protocol", "service accepted the job but returned no job_id");
    }
    return doc.job_id;
  }

  async getJob(jobId: string, signal?: AbortSignal): Promise<JobDocument> {
    const resp = await this.send(`/api/jobs/${jobId}`, { method: "GET", signal });
    return (await this.parseOk(resp)) as JobDocument;
  }

  private async postJson(path: string, body: unknown, signal?: AbortSignal): Promise<unknown> {
    const resp = await this.send(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    return this.parseOk(resp);
  }

  private async send(path: string, init: RequestInit): Promise<Response> {
    try {
      return await this.fetchFn(`${this.base}${path}`, init);
    } catch (exc) {
      if (exc instanceof DOMException && exc.name === "AbortError") throw exc;
      throw new ApiError("network", "cannot reach the prediction service");
    }
  }

  private async parseOk(resp: Response): Promise<unknown> {
    if (resp.ok) {
      try {
        return await resp.json();
      } catch {
        throw new ApiError("protocol", "service returned a non-JSON body");
      }
    }
    let message = `service error (HTTP ${resp.status})`;
    try {
      const body = (await resp.json()) as { message?: unknown };
      if (typeof body.message === "string" && body.message) message = body.message;
    } catch {
      // non-JSON error body: keep the generic message
    }
    const retryAfter = resp.headers.get("retry-after");
    const retryAfterS = retryAfter !== null && /^\d+$/.test(retryAfter) ? Number(retryAfter) : null;
    throw new ApiError(kindForStatus(resp.status), message, resp.status, retryAfterS);
  }
}
