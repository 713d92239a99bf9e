/** Sequential job poller.

One GET /api/jobs/{id} per second, and never more than one outstanding:
the next request is scheduled only after the previous response lands, so
a slow server stretches the interval instead of stacking requests.
Network loss pauses the loop (retry() resumes it); terminal states and
cancel() stop it for good.
*/

import { ApiError } from "./api.js";
import type { JobDocument } from "./types.js";
import { TERMINAL_STATES } from "./types.js";

export type PollPhase = "idle" | "running" | "paused" | "stopped";

export interface PollHandlers {
  /** Called with every non-terminal document. */
  onUpdate?: (doc: JobDocument) => void;
  /** Called once with the done/failed document; polling stops. */
  onTerminal: (doc: JobDocument) => void;
  /** Network failure: polling pauses until retry(). */
  onPause?: (err: ApiError) => void;
  /** Non-network API error (e.g. job id unknown): polling stops. */
  onFatal?: (err: ApiError) => void;
}

interface JobSource {
  getJob(jobId: string): Promise<JobDocument>;
}

export class JobPoller {
  phase: PollPhase = "idle";

  private readonly api: JobSource;
  private readonly intervalMs: number;
  private jobId = "";
  private handlers: PollHandlers | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  // bumped on start/cancel so responses from a superseded loop are ignored
  private generation = 0;

  constructor(api: JobSource, intervalMs = 1000) {
    this.api = api;
    this.intervalMs = intervalMs;
  }

  start(jobId: string, handlers: PollHandlers): void {
    this.cancel();
    this.jobId = jobId;
    this.handlers = handlers;
    this.phase = "running";
    void this.tick(this.generation);
  }

  /** Resume after a network pause; no-op in any other phase. */
  retry(): void {
    if (this.phase !== "paused") return;
    this.phase = "running";
    void this.tick(this.generation);
  }

  cancel(): void {
    this.generation += 1;
    this.phase = this.phase === "idle" ? "idle" : "stopped";
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private async tick(gen: number): Promise<void> {
    const handlers = this.handlers;
    if (handlers === null) return;
    let doc: JobDocument;
    try {
      doc = await this.api.getJob(this.jobId);
    } catch (exc) {
      if (gen !== this.generation) return;
      const err = exc instanceof ApiError ? exc : new ApiError("network", String(exc));
      if (err.kind === "network") {
        this.phase = "paused";
        handlers.onPause?.(err);
      } else {
        this.phase = "stopped";
        handlers.onFatal?.(err);
      }
      return;
    }
    if (gen !== this.generation) return;
    if (TERMINAL_STATES.has(doc.state)) {
      this.phase = "stopped";
      handlers.onTerminal(doc);
      return;
    }
    handlers.onUpdate?.(doc);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.tick(gen);
    }, this.intervalMs);
  }
}
