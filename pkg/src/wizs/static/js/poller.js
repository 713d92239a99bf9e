/** Sequential job poller.

One GET /api/jobs/{id} per second, and never more than one outstanding:
the next request is scheduled only after the previous response lands, so
a slow server stretches the interval instead of stacking requests.
Network loss pauses the loop (retry() resumes it); terminal states and
cancel() stop it for good.
*/
import { ApiError } from "./api.js";
import { TERMINAL_STATES } from "./types.js";
export class JobPoller {
    constructor(api, intervalMs = 1000) {
        this.phase = "idle";
        this.jobId = "";
        this.handlers = null;
        this.timer = null;
        // bumped on start/cancel so responses from a superseded loop are ignored
        this.generation = 0;
        this.api = api;
        this.intervalMs = intervalMs;
    }
    start(jobId, handlers) {
        this.cancel();
        this.jobId = jobId;
        this.handlers = handlers;
        this.phase = "running";
        void this.tick(this.generation);
    }
    /** Resume after a network pause; no-op in any other phase. */
    retry() {
        if (this.phase !== "paused")
            return;
        this.phase = "running";
        void this.tick(this.generation);
    }
    cancel() {
        this.generation += 1;
        this.phase = this.phase === "idle" ? "idle" : "stopped";
        if (this.timer !== null) {
            clearTimeout(this.timer);
            this.timer = null;
        }
    }
    async tick(gen) {
        const handlers = this.handlers;
        if (handlers === null)
            return;
        let doc;
        try {
            doc = await this.api.getJob(this.jobId);
        }
        catch (exc) {
            if (gen !== this.generation)
                return;
            const err = exc instanceof ApiError ? exc : new ApiError("network", String(exc));
            if (err.kind === "network") {
                this.phase = "paused";
                handlers.onPause?.(err);
            }
            else {
                this.phase = "stopped";
                handlers.onFatal?.(err);
            }
            return;
        }
        if (gen !== this.generation)
            return;
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
