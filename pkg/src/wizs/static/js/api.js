/** Typed client for the prediction service.

The four endpoints here are the only backend surface the UI touches.
Server errors arrive as {"type", "message"} bodies; they are mapped to
ApiError with a coarse kind so callers can choose a banner style without
string-matching messages.
*/
export class ApiError extends Error {
    constructor(kind, message, status = null, retryAfterS = null) {
        super(message);
        this.name = "ApiError";
        this.kind = kind;
        this.status = status;
        this.retryAfterS = retryAfterS;
    }
}
function kindForStatus(status) {
    if (status === 429)
        return "busy";
    if (status === 404)
        return "not_found";
    if (status === 422 || status === 400)
        return "validation";
    if (status >= 500)
        return "provider";
    return "protocol";
}
export class ApiClient {
    constructor(base = "", fetchFn = fetch) {
        // strip one trailing slash so base + "/api/..." never doubles up
        this.base = base.endsWith("/") ? base.slice(0, -1) : base;
        this.fetchFn = fetchFn;
    }
    imageUrl(ref) {
        return `${this.base}/api/images/${ref}`;
    }
    async suggestAlternatives(query, domain, signal) {
        const body = { query };
        if (domain)
            body.domain = domain;
        return (await this.postJson("/api/alternatives", body, signal));
    }
    async submitPredict(request, signal) {
        const doc = (await this.postJson("/api/predict", request, signal));
        if (typeof doc.job_id !== "string") {
            throw new ApiError("protocol", "service accepted the job but returned no job_id");
        }
        return doc.job_id;
    }
    async getJob(jobId, signal) {
        const resp = await this.send(`/api/jobs/${jobId}`, { method: "GET", signal });
        return (await this.parseOk(resp));
    }
    async postJson(path, body, signal) {
        const resp = await this.send(path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(body),
            signal,
        });
        return this.parseOk(resp);
    }
    async send(path, init) {
        try {
            return await this.fetchFn(`${this.base}${path}`, init);
        }
        catch (exc) {
            if (exc instanceof DOMException && exc.name === "AbortError")
                throw exc;
            throw new ApiError("network", "cannot reach the prediction service");
        }
    }
    async parseOk(resp) {
        if (resp.ok) {
            try {
                return await resp.json();
            }
            catch {
                throw new ApiError("protocol", "service returned a non-JSON body");
            }
        }
        let message = `service error (HTTP ${resp.status})`;
        try {
            const body = (await resp.json());
            if (typeof body.message === "string" && body.message)
                message = body.message;
        }
        catch {
            // non-JSON error body: keep the generic message
        }
        const retryAfter = resp.headers.get("retry-after");
        const retryAfterS = retryAfter !== null && /^\d+$/.test(retryAfter) ? Number(retryAfter) : null;
        throw new ApiError(kindForStatus(resp.status), message, resp.status, retryAfterS);
    }
}
