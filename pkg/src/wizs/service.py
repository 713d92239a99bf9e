"""HTTP service exposing the prediction pipeline as async jobs.

Endpoints:

    POST /api/alternatives       {"query": ..., "domain"?} -> {"alternatives": [...]}
    POST /api/predict            {"query", "alternatives"?, "domain"?, "n_images"?}
                                 -> 202 {"job_id": ...}
    GET  /api/jobs/{job_id}      job document; result holds scores and image
                                 refs, never raw image bytes
    GET  /api/images/{ref}       the image bytes for a ref (immutable)
    GET  /                       the bundled web UI

Jobs advance monotonically through queued -> generating_alternatives ->
captioning -> generating_images -> embedding -> scoring -> done; failures can
interrupt any non-terminal state. Terminal jobs never change, so a finished
job polled twice returns byte-identical documents.

Error bodies are always {"type": ..., "message": ...}. Provider outages map
to 502 with a Retry-After header, a full job queue to 429, and invalid
requests to 422.
"""
from __future__ import annotations

import logging
import threading
import uuid
from pathlib import Path

import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .calibration import CalibrationModel, load_default_model, load_model
from .errors import (
    ComputationError,
    ProviderError,
    ProviderUnavailableError,
    ValidationError,
    WizsError,
)
from .pipeline import (
    PredictionRequest,
    normalize_alternatives,
    result_to_dict,
    run_prediction,
)
from .providers import (
    ProviderSet,
    build_provider_set,
    load_provider_config,
    provider_config_from_dict,
)
from .scoring import ScoringConfig

logger = logging.getLogger("wizs.service")

DEFAULT_QUEUE_CAP = 8
RETRY_AFTER_SECONDS = 2

_STATE_ORDER = {
    "queued": 0,
    "generating_alternatives": 1,
    "captioning": 2,
    "generating_images": 3,
    "embedding": 4,
    "scoring": 5,
    "done": 6,
}
TERMINAL_STATES = ("done", "failed")

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>accuracy predictor</title></head>
<body style="font-family: sans-serif; max-width: 40em; margin: 3em auto;">
<h1>Zero-shot accuracy predictor</h1>
<p>The web UI bundle is not installed. The JSON API is live:</p>
<pre>
POST /api/alternatives   {"query": "spotted lanternfly"}
POST /api/predict        {"query": "spotted lanternfly"}
GET  /api/jobs/{job_id}
GET  /api/images/{ref}
</pre>
</body></html>
"""


def _error_body(exc: Exception) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


def _error_response(status: int, exc: Exception, **headers) -> JSONResponse:
    return JSONResponse(
        status_code=status, content=_error_body(exc), headers=headers or None
    )


class JobRegistry:
    """In-memory job store with monotone state transitions."""

    def __init__(self, queue_cap: int = DEFAULT_QUEUE_CAP):
        self.queue_cap = queue_cap
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()

    def create(self, request_doc: dict) -> str | None:
        """Register a queued job; None if the queue is at capacity."""
        with self._lock:
            active = sum(
                1 for j in self._jobs.values() if j["state"] not in TERMINAL_STATES
            )
            if active >= self.queue_cap:
                return None
            job_id = uuid.uuid4().hex
            self._jobs[job_id] = {
                "job_id": job_id,
                "state": "queued",
                "request": request_doc,
                "result": None,
                "error": None,
                "history": ["queued"],
            }
            return job_id

    def advance(self, job_id: str, state: str) -> None:
        with self._lock:
            job = self._jobs[job_id]
            current = job["state"]
            if current in TERMINAL_STATES:
                raise RuntimeError(f"job {job_id} is terminal ({current})")
            if state == "failed" or _STATE_ORDER[state] > _STATE_ORDER[current]:
                job["state"] = state
                job["history"].append(state)
            else:
                raise RuntimeError(
                    f"job {job_id}: illegal transition {current} -> {state}"
                )

    def complete(self, job_id: str, result: dict) -> None:
        with self._lock:
            job = self._jobs[job_id]
            if job["state"] in TERMINAL_STATES:
                raise RuntimeError(f"job {job_id} is terminal")
            job["result"] = result
            job["state"] = "done"
            job["history"].append("done")

    def fail(self, job_id: str, exc: Exception) -> None:
        with self._lock:
            job = self._jobs[job_id]
            if job["state"] in TERMINAL_STATES:
                return
            job["error"] = _error_body(exc)
            job["state"] = "failed"
            job["history"].append("failed")

    def document(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                return None
            return {
                "job_id": job["job_id"],
                "state": job["state"],
                "request": job["request"],
                "result": job["result"],
                "error": job["error"],
            }

    def history(self, job_id: str) -> list[str]:
        with self._lock:
            return list(self._jobs[job_id]["history"])


def create_app(
    providers: ProviderSet,
    calibration_model: CalibrationModel | None = None,
    *,
    queue_cap: int = DEFAULT_QUEUE_CAP,
    static_dir: str | Path | None = None,
    scoring_config: ScoringConfig | None = None,
) -> FastAPI:
    model = calibration_model or load_default_model()
    config = scoring_config or ScoringConfig()
    app = FastAPI(title="zero-shot accuracy predictor", docs_url=None, redoc_url=None)
    jobs = JobRegistry(queue_cap=queue_cap)
    app.state.jobs = jobs
    app.state.providers = providers

    @app.exception_handler(RequestValidationError)
    async def on_body_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"type": "ValidationError", "message": "request body must be a JSON object"},
        )

    @app.exception_handler(WizsError)
    async def on_wizs_error(request: Request, exc: WizsError):
        if isinstance(exc, ProviderUnavailableError):
            return _error_response(502, exc, **{"Retry-After": str(RETRY_AFTER_SECONDS)})
        if isinstance(exc, ValidationError):
            return _error_response(422, exc)
        if isinstance(exc, ProviderError):
            return _error_response(502, exc)
        if isinstance(exc, ComputationError):
            return _error_response(500, exc)
        return _error_response(500, exc)

    def _require_query(body: dict) -> str:
        if not isinstance(body, dict):
            raise ValidationError("request body must be a JSON object")
        query = body.get("query")
        if not isinstance(query, str) or not query.strip():
            raise ValidationError("field 'query' must be a non-empty string")
        return query.strip()

    @app.post("/api/alternatives")
    def post_alternatives(body: dict):
        query = _require_query(body)
        domain = body.get("domain") or None
        alternatives = providers.generate_alternatives(query, domain)
        return {"query": query, "alternatives": alternatives}

    @app.post("/api/predict", status_code=202)
    def post_predict(body: dict):
        query = _require_query(body)
        domain = body.get("domain") or None
        n_images = body.get("n_images", providers.images_per_class)
        if not isinstance(n_images, int) or isinstance(n_images, bool) or n_images < 1:
            raise ValidationError(f"field 'n_images' must be an integer >= 1, got {n_images!r}")
        raw_alternatives = body.get("alternatives")
        alternatives = None
        if raw_alternatives is not None:
            if not isinstance(raw_alternatives, list) or any(
                not isinstance(a, str) for a in raw_alternatives
            ):
                raise ValidationError("field 'alternatives' must be a list of strings")
            # the service is lenient: the query is filtered out rather than
            # rejected, and only an effectively empty list is an error
            alternatives = [
                a
                for a in normalize_alternatives(raw_alternatives)
                if a.casefold() != query.casefold()
            ]
            if not alternatives:
                raise ValidationError(
                    "field 'alternatives' leaves no contrast classes after "
                    "removing the query itself"
                )
        request_doc = {
            "query": query,
            "alternatives": alternatives,
            "domain": domain,
            "n_images": n_images,
        }
        job_id = jobs.create(request_doc)
        if job_id is None:
            return JSONResponse(
                status_code=429,
                content={
                    "type": "QueueFull",
                    "message": f"job queue is at capacity ({jobs.queue_cap})",
                },
            )
        prediction_request = PredictionRequest(
            query=query,
            alternatives=alternatives,
            domain=domain,
            n_images=n_images,
        )
        worker = threading.Thread(
            target=_run_job,
            args=(jobs, job_id, prediction_request, providers, model, config),
            daemon=True,
        )
        worker.start()
        return {"job_id": job_id}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        doc = jobs.document(job_id)
        if doc is None:
            return JSONResponse(
                status_code=404,
                content={"type": "NotFound", "message": f"no such job: {job_id}"},
            )
        return doc

    @app.get("/api/images/{ref}")
    def get_image(ref: str):
        data = providers.image_store.get(ref)
        if data is None:
            return JSONResponse(
                status_code=404,
                content={"type": "NotFound", "message": f"no such image: {ref}"},
            )
        media = "image/png" if data.startswith(b"\x89PNG") else "application/octet-stream"
        return Response(
            content=data,
            media_type=media,
            headers={
                "Cache-Control": "public, max-age=31536000, immutable",
                "ETag": f'"{ref}"',
            },
        )

    _mount_static(app, static_dir)
    return app


def _run_job(jobs, job_id, request, providers, model, config):
    try:
        result = run_prediction(
            request,
            providers,
            model,
            config,
            on_stage=lambda stage: jobs.advance(job_id, stage),
        )
        jobs.complete(job_id, result_to_dict(result))
    except Exception as exc:  # job errors become documents, not tracebacks
        logger.warning("job %s failed: %s", job_id, exc)
        jobs.fail(job_id, exc)


def _mount_static(app: FastAPI, static_dir) -> None:
    candidates = []
    if static_dir:
        candidates.append(Path(static_dir))
    candidates.append(Path(__file__).resolve().parent / "static")
    for candidate in candidates:
        if candidate.is_dir() and (candidate / "index.html").is_file():
            app.mount("/", StaticFiles(directory=candidate, html=True), name="ui")
            return

    @app.get("/", response_class=HTMLResponse)
    async def fallback_index():
        return _FALLBACK_PAGE


def app_from_config(doc: dict) -> FastAPI:
    """Build the app from one JSON config document.

    Keys: providers (inline provider config object) or providers_path,
    calibration_model_path (default: packaged synthetic model), queue_cap,
    static_dir.
    """
    if "providers_path" in doc:
        provider_config = load_provider_config(doc["providers_path"])
    else:
        provider_config = provider_config_from_dict(doc.get("providers", {}))
    providers = build_provider_set(provider_config)
    model_path = doc.get("calibration_model_path")
    model = load_model(model_path) if model_path else load_default_model()
    return create_app(
        providers,
        model,
        queue_cap=int(doc.get("queue_cap", DEFAULT_QUEUE_CAP)),
        static_dir=doc.get("static_dir"),
    )


def serve(app: FastAPI, host: str = "127.0.0.1", port: int = 8000) -> None:
    uvicorn.run(app, host=host, port=port, log_level="info")
