import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError } from "../src/api.js";
import { JobPoller } from "../src/poller.js";
import type { JobDocument, JobState } from "../src/types.js";
import { doneDoc, jobDoc, makeResult } from "./fixtures.js";

function sequenceApi(docs: JobDocument[]) {
  let i = 0;
  return {
    getJob: vi.fn(async () => {
      const doc = docs[Math.min(i, docs.length - 1)] as JobDocument;
      i += 1;
      return doc;
    }),
  };
}

describe("JobPoller", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("polls once per interval and stops on the terminal state", async () => {
    const api = sequenceApi([jobDoc("queued"), jobDoc("scoring"), doneDoc(makeResult())]);
    const poller = new JobPoller(api, 1000);
    const updates: JobState[] = [];
    let terminal: JobDocument | null = null;
    poller.start("job-1", {
      onUpdate: (doc) => updates.push(doc.state),
      onTerminal: (doc) => {
        terminal = doc;
      },
    });

    await vi.advanceTimersByTimeAsync(0);
    expect(updates).toEqual(["queued"]);
    await vi.advanceTimersByTimeAsync(999);
    expect(api.getJob).toHaveBeenCalledTimes(1);
    await vi.advanceTimersByTimeAsync(1);
    expect(updates).toEqual(["queued", "scoring"]);
    await vi.advanceTimersByTimeAsync(1000);
    expect(terminal).not.toBeNull();
    expect((terminal as unknown as JobDocument).state).toBe("done");
    expect(poller.phase).toBe("stopped");

    // no request storm after the terminal document
    await vi.advanceTimersByTimeAsync(10_000);
    expect(api.getJob).toHaveBeenCalledTimes(3);
  });

  it("never has more than one request outstanding", async () => {
    let release: ((doc: JobDocument) => void) | null = null;
    const api = {
      getJob: vi.fn(
        () =>
          new Promise<JobDocument>((resolve) => {
            release = resolve;
          }),
      ),
    };
    const poller = new JobPoller(api, 1000);
    poller.start("job-1", { onTerminal: () => undefined });

    // the server is slow: 5 intervals pass with the first request in flight
    await vi.advanceTimersByTimeAsync(5000);
    expect(api.getJob).toHaveBeenCalledTimes(1);

    (release as unknown as (doc: JobDocument) => void)(jobDoc("embedding"));
    await vi.advanceTimersByTimeAsync(0);
    expect(api.getJob).toHaveBeenCalledTimes(1);
    await vi.advanceTimersByTimeAsync(1000);
    expect(api.getJob).toHaveBeenCalledTimes(2);
  });

  it("pauses on network loss and resumes via retry()", async () => {
    let failuresLeft = 1;
    const api = {
      getJob: vi.fn(async () => {
        if (failuresLeft > 0) {
          failuresLeft -= 1;
          throw new ApiError("network", "cannot reach the prediction service");
        }
        return doneDoc(makeResult());
      }),
    };
    const poller = new JobPoller(api, 1000);
    const paused = vi.fn();
    let terminal: JobDocument | null = null;
    poller.start("job-1", {
      onTerminal: (doc) => {
        terminal = doc;
      },
      onPause: paused,
    });

    await vi.advanceTimersByTimeAsync(0);
    expect(paused).toHaveBeenCalledTimes(1);
    expect(poller.phase).toBe("paused");

    // paused means paused: no background requests
    await vi.advanceTimersByTimeAsync(30_000);
    expect(api.getJob).toHaveBeenCalledTimes(1);

    poller.retry();
    await vi.advanceTimersByTimeAsync(0);
    expect(terminal).not.toBeNull();
    expect(poller.phase).toBe("stopped");
  });

  it("treats non-network API errors as fatal", async () => {
    const api = {
      getJob: vi.fn(async () => {
        throw new ApiError("not_found", "unknown job id", 404);
      }),
    };
    const poller = new JobPoller(api, 1000);
    const fatal = vi.fn();
    poller.start("job-1", { onTerminal: () => undefined, onFatal: fatal });
    await vi.advanceTimersByTimeAsync(0);
    expect(fatal).toHaveBeenCalledTimes(1);
    expect(poller.phase).toBe("stopped");
    await vi.advanceTimersByTimeAsync(5000);
    expect(api.getJob).toHaveBeenCalledTimes(1);
  });

  it("ignores responses that land after cancel()", async () => {
    let release: ((doc: JobDocument) => void) | null = null;
    const api = {
      getJob: vi.fn(
        () =>
          new Promise<JobDocument>((resolve) => {
            release = resolve;
          }),
      ),
    };
    const poller = new JobPoller(api, 1000);
    const onTerminal = vi.fn();
    const onUpdate = vi.fn();
    poller.start("job-1", { onTerminal, onUpdate });
    await vi.advanceTimersByTimeAsync(0);
    poller.cancel();

    (release as unknown as (doc: JobDocument) => void)(doneDoc(makeResult()));
    await vi.advanceTimersByTimeAsync(5000);
    expect(onTerminal).not.toHaveBeenCalled();
    expect(onUpdate).not.toHaveBeenCalled();
    expect(api.getJob).toHaveBeenCalledTimes(1);
  });
});
