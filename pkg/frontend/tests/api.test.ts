import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { doneDoc, makeResult } from "./fixtures.js";

function jsonResponse(status: number, body: unknown, headers: Record<string, string> = {}): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json", ...headers },
  });
}

function clientWith(fetchMock: ReturnType<typeof vi.fn>): ApiClient {
  return new ApiClient("", fetchMock as unknown as typeof fetch);
}

describe("ApiClient", () => {
  it("posts alternatives requests and parses the response", async () => {
    const fetchMock = vi.fn(async (_url: string, _init?: RequestInit) =>
      jsonResponse(200, { query: "spotted lanternfly", alternatives: ["cicada"] }),
    );
    const api = clientWith(fetchMock);
    const resp = await api.suggestAlternatives("spotted lanternfly", "insects");
    expect(resp.alternatives).toEqual(["cicada"]);
    const [url, init] = fetchMock.mock.calls[0] ?? [];
    expect(url).toBe("/api/alternatives");
    expect(init?.method).toBe("POST");
    expect(JSON.parse(String(init?.body))).toEqual({
      query: "spotted lanternfly",
      domain: "insects",
    });
  });

  it("omits the domain field when blank", async () => {
    const fetchMock = vi.fn(async (_url: string, _init?: RequestInit) =>
      jsonResponse(200, { query: "q", alternatives: [] }),
    );
    await clientWith(fetchMock).suggestAlternatives("q");
    const [, init] = fetchMock.mock.calls[0] ?? [];
    expect(JSON.parse(String(init?.body))).toEqual({ query: "q" });
  });

  it("returns the job id from an accepted prediction", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(202, { job_id: "abc123" }));
    const jobId = await clientWith(fetchMock).submitPredict({ query: "q", alternatives: ["a"] });
    expect(jobId).toBe("abc123");
  });

  it("maps 429 to a busy error carrying Retry-After", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(429, { type: "QueueFull", message: "job queue is full" }, { "retry-after": "30" }),
    );
    const err = await clientWith(fetchMock)
      .submitPredict({ query: "q" })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).kind).toBe("busy");
    expect((err as ApiError).message).toBe("job queue is full");
    expect((err as ApiError).retryAfterS).toBe(30);
  });

  it("maps 422 to a validation error with the server message", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(422, { type: "ValidationError", message: "field 'query' must be a non-empty string" }),
    );
    const err = await clientWith(fetchMock)
      .submitPredict({ query: "" })
      .catch((e: unknown) => e);
    expect((err as ApiError).kind).toBe("validation");
    expect((err as ApiError).message).toContain("query");
  });

  it("maps 5xx to a provider error", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(502, { type: "ProviderUnavailableError", message: "image provider unreachable" }),
    );
    const err = await clientWith(fetchMock)
      .submitPredict({ query: "q" })
      .catch((e: unknown) => e);
    expect((err as ApiError).kind).toBe("provider");
    expect((err as ApiError).status).toBe(502);
  });

  it("maps a thrown fetch to a network error", async () => {
    const fetchMock = vi.fn(async () => {
      throw new TypeError("fetch failed");
    });
    const err = await clientWith(fetchMock)
      .getJob("abc")
      .catch((e: unknown) => e);
    expect((err as ApiError).kind).toBe("network");
  });

  it("flags a non-JSON success body as a protocol error", async () => {
    const fetchMock = vi.fn(async () => new Response("<html>", { status: 200 }));
    const err = await clientWith(fetchMock)
      .getJob("abc")
      .catch((e: unknown) => e);
    expect((err as ApiError).kind).toBe("protocol");
  });

  it("parses job documents", async () => {
    const doc = doneDoc(makeResult());
    const fetchMock = vi.fn(async (_url: string, _init?: RequestInit) => jsonResponse(200, doc));
    const got = await clientWith(fetchMock).getJob("job-1");
    expect(got.state).toBe("done");
    expect(got.result?.predicted_accuracy).toBe(0.63);
    expect(fetchMock.mock.calls[0]?.[0]).toBe("/api/jobs/job-1");
  });

  it("builds image URLs without doubled slashes", () => {
    expect(new ApiClient().imageUrl("ff00")).toBe("/api/images/ff00");
    const based = new ApiClient("http://127.0.0.1:8000/", vi.fn() as unknown as typeof fetch);
    expect(based.imageUrl("ff00")).toBe("http://127.0.0.1:8000/api/images/ff00");
  });
});
