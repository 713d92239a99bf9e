/** Query session state: the query, its editable alternatives, the one
in-flight job, the latest result, and an append-only history of runs.

All methods are DOM-free; the app layer renders outcomes. Validation
here is a convenience mirror of the server rules (the server remains
authoritative); no score arithmetic happens on this side.
*/

import { ApiClient, ApiError } from "./api.js";
import { JobPoller } from "./poller.js";
import type { HistoryEntry, JobDocument, JobErrorBody, PredictionResult } from "./types.js";

export type SessionStatus = "idle" | "suggesting" | "submitting" | "polling" | "paused";

export interface ActionOutcome {
  ok: boolean;
  message?: string;
}

export interface SubmitHandlers {
  /** Every non-terminal job document while polling. */
  onStage?: (doc: JobDocument) => void;
  onDone?: (result: PredictionResult) => void;
  onFailed?: (error: JobErrorBody) => void;
  /** Network loss while polling; retryPolling() resumes. */
  onPause?: (err: ApiError) => void;
  /** Submit-time or fatal API errors (429 busy, 422, 502, ...). */
  onError?: (err: ApiError) => void;
}

interface SessionApi {
  suggestAlternatives(query: string, domain?: string): Promise<{ query: string; alternatives: string[] }>;
  submitPredict(request: {
    query: string;
    alternatives?: string[];
    domain?: string;
    n_images?: number;
  }): Promise<string>;
  getJob(jobId: string): Promise<JobDocument>;
}

const ok: ActionOutcome = { ok: true };

function fail(message: string): ActionOutcome {
  return { ok: false, message };
}

export class QuerySession {
  query = "";
  domain = "";
  alternatives: string[] = [];
  nImages: number | null = null;
  jobId: string | null = null;
  latest: PredictionResult | null = null;
  readonly history: HistoryEntry[] = [];
  status: SessionStatus = "idle";

  private readonly api: SessionApi;
  private readonly poller: JobPoller;

  constructor(api: SessionApi | ApiClient, pollIntervalMs = 1000) {
    this.api = api;
    this.poller = new JobPoller(api, pollIntervalMs);
  }

  setQuery(raw: string): void {
    this.query = raw.trim();
  }

  setDomain(raw: string): void {
    this.domain = raw.trim();
  }

  setImagesPerClass(n: number | null): void {
    this.nImages = n !== null && Number.isInteger(n) && n >= 1 ? n : null;
  }

  get busy(): boolean {
    return this.status === "submitting" || this.status === "polling" || this.status === "paused";
  }

  addAlternative(raw: string): ActionOutcome {
    const label = raw.trim();
    const check = this.checkLabel(label, null);
    if (!check.ok) return check;
    this.alternatives.push(label);
    return ok;
  }

  removeAlternative(index: number): void {
    this.alternatives.splice(index, 1);
  }

  replaceAlternative(index: number, raw: string): ActionOutcome {
    const label = raw.trim();
    const check = this.checkLabel(label, index);
    if (!check.ok) return check;
    this.alternatives[index] = label;
    return ok;
  }

  /** Reject empty labels, the query itself, and case-insensitive duplicates. */
  private checkLabel(label: string, selfIndex: number | null): ActionOutcome {
    if (!label) return fail("alternative label is empty");
    if (label.toLowerCase() === this.query.toLowerCase() && this.query !== "") {
      return fail(`'${label}' is the query itself; alternatives must name other things`);
    }
    const clash = this.alternatives.findIndex(
      (a, i) => i !== selfIndex && a.toLowerCase() === label.toLowerCase(),
    );
    if (clash >= 0) return fail(`'${label}' is already in the list`);
    return ok;
  }

  async suggest(): Promise<ActionOutcome> {
    if (!this.query) return fail("enter a query before asking for suggestions");
    if (this.status !== "idle") return fail("another request is in progress");
    this.status = "suggesting";
    try {
      const resp = await this.api.suggestAlternatives(this.query, this.domain || undefined);
      this.alternatives = resp.alternatives.slice();
      return ok;
    } catch (exc) {
      const err = exc instanceof ApiError ? exc : new ApiError("network", String(exc));
      return fail(err.message);
    } finally {
      this.status = "idle";
    }
  }

  /** Submit the current query; polls to a terminal state via handlers.

  With an empty alternatives list this invokes suggest() first so a
  submission always carries at least one alternative.
  */
  async submit(handlers: SubmitHandlers = {}): Promise<ActionOutcome> {
    if (this.busy) return fail("a prediction is already running; wait for it to finish");
    if (!this.query) return fail("enter a query before submitting");
    if (this.alternatives.length === 0) {
      const suggested = await this.suggest();
      if (!suggested.ok) return suggested;
    }
    this.status = "submitting";
    let jobId: string;
    try {
      jobId = await this.api.submitPredict({
        query: this.query,
        alternatives: this.alternatives.slice(),
        ...(this.domain ? { domain: this.domain } : {}),
        ...(this.nImages !== null ? { n_images: this.nImages } : {}),
      });
    } catch (exc) {
      this.status = "idle";
      const err = exc instanceof ApiError ? exc : new ApiError("network", String(exc));
      handlers.onError?.(err);
      return fail(err.message);
    }
    this.jobId = jobId;
    this.status = "polling";
    this.poller.start(jobId, {
      onUpdate: (doc) => handlers.onStage?.(doc),
      onTerminal: (doc) => {
        this.status = "idle";
        if (doc.state === "done" && doc.result) {
          this.latest = doc.result;
          // start the next iteration from exactly what this run used
          this.query = doc.result.query;
          this.alternatives = doc.result.alternatives.slice();
          this.history.push({
            query: doc.result.query,
            alternatives: doc.result.alternatives.slice(),
            predicted_accuracy: doc.result.predicted_accuracy,
          });
          handlers.onDone?.(doc.result);
        } else {
          handlers.onFailed?.(doc.error ?? { type: "JobFailed", message: "job failed" });
        }
      },
      onPause: (err) => {
        this.status = "paused";
        handlers.onPause?.(err);
      },
      onFatal: (err) => {
        this.status = "idle";
        handlers.onError?.(err);
      },
    });
    return ok;
  }

  retryPolling(): void {
    if (this.status !== "paused") return;
    this.status = "polling";
    this.poller.retry();
  }

  cancelJob(): void {
    this.poller.cancel();
    if (this.busy) this.status = "idle";
  }

  /** Rephrase one class from the latest result and leave the form ready
  to resubmit: the query row edits the query, any other row edits that
  alternative. Image regeneration happens server-side on the next run.
  */
  rephrase(classId: string, raw: string): ActionOutcome {
    const label = raw.trim();
    if (!label) return fail("new phrasing is empty");
    if (classId === this.query || (this.latest !== null && classId === this.latest.query)) {
      const clash = this.alternatives.findIndex((a) => a.toLowerCase() === label.toLowerCase());
      if (clash >= 0) return fail(`'${label}' is already an alternative`);
      this.query = label;
      return ok;
    }
    const index = this.alternatives.indexOf(classId);
    if (index < 0) return fail(`'${classId}' is not in the current alternatives`);
    return this.replaceAlternative(index, label);
  }

  /** Load a history row back into the form for another round. */
  reuse(entry: HistoryEntry): void {
    if (this.busy) return;
    this.query = entry.query;
    this.alternatives = entry.alternatives.slice();
  }
}
