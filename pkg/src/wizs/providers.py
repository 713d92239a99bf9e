"""Embedding, text-generation, and image-generation providers.

The numerical core never runs model inference in-process; it talks to three
JSON-over-HTTP endpoints:

    embed     {"texts": [...]} or {"images_b64": [...]} -> {"dim": d, "vectors": [[...], ...]}
    textgen   {"prompt": "...", "n": k} -> {"completions": [...]}
    imagegen  {"prompt": "...", "n": k} -> {"images_b64": [...]}

API keys come from WIZS_EMBED_KEY / WIZS_TEXTGEN_KEY / WIZS_IMAGEGEN_KEY and
are read at request time, never stored or logged. Transient failures (5xx,
transport errors) are retried up to 3 times with exponential backoff starting
at 500 ms.

Deterministic in-process stubs implement the same interfaces so the whole
pipeline runs offline: embeddings are seeded by a hash of the input, captions
follow the required template prefix, and generated "images" are tiny PNGs
colored by a hash of the prompt.

ProviderSet bundles the three providers with a write-through request cache and
a content-addressed image store, and exposes the higher-level operations the
pipeline uses (fetch embeddings, generate alternatives / captions / images).
"""
from __future__ import annotations

import base64
import binascii
import hashlib
import json
import logging
import os
import struct
import threading
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx
import numpy as np

from .cache import ByteStore, ContentStore, RequestCache, canonical_json
from .errors import (
    EmptySetError,
    PartialResultError,
    ProviderShapeError,
    ProviderUnavailableError,
    ValidationError,
)

logger = logging.getLogger("wizs.providers")

EMBED_KEY_ENV = "WIZS_EMBED_KEY"
TEXTGEN_KEY_ENV = "WIZS_TEXTGEN_KEY"
IMAGEGEN_KEY_ENV = "WIZS_IMAGEGEN_KEY"

DEFAULT_PROMPT_TEMPLATE = "a photo of a {class_name}"
DEFAULT_IMAGES_PER_CLASS = 20
DEFAULT_MAX_CONCURRENCY = 4
CAPTION_RETRY_ROUNDS = 2  # re-requests after the first attempt

ALTERNATIVES_PROMPT = (
    "Create 10 realistic alternatives to the following input label by suggesting "
    "alternatives that are somewhat similar. I don't want the same label reworded "
    "or a subclass of the input label. The given label is: {query}"
)
# appended when the caller supplies a domain, to help disambiguate the label
ALTERNATIVES_DOMAIN_SUFFIX = " The label belongs to the domain: {domain}."

CAPTION_STAGE1_PROMPT = (
    "You are an AI assistant that generates creative and diverse image captions "
    "suitable for use with image generation models like DALL-E. Given a subject, "
    "provide {num_captions} distinct, diverse and descriptive captions, considering "
    "the following global taxonomical traits when generating captions: {global_traits}."
)
CAPTION_STAGE2_PROMPT = (
    "Please generate {num_captions} diverse and creative alternative captions for "
    "the subject '{subject}'. Each caption should be compatible with the CLIP model "
    "so your caption should share the same prefix with the original prompt template "
    "provided: '{prompt_template}'. An example can be, the template is 'a photo of a "
    "{{c}}' and the descriptive caption is 'a photo of a {{c}}, [descriptive "
    "content]'. Here {{c}} is the class name of the subject."
)


@dataclass(frozen=True)
class RetryPolicy:
    max_retries: int = 3
    backoff_base_ms: float = 500.0


@dataclass(frozen=True)
class ProviderConfig:
    """Provider wiring. mode 'stub' needs no endpoints; mode 'http' needs all
    three. Secrets are environment-only by construction: there is no key field
    here, so serializing a config can never leak one."""

    mode: str = "stub"
    embedding_endpoint: str = ""
    textgen_endpoint: str = ""
    imagegen_endpoint: str = ""
    timeout_s: float = 30.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    embedding_dim: int = 16  # stub mode only
    images_per_class: int = DEFAULT_IMAGES_PER_CLASS
    max_concurrency: int = DEFAULT_MAX_CONCURRENCY
    cache_dir: str | None = None


def provider_config_from_dict(doc: dict) -> ProviderConfig:
    if not isinstance(doc, dict):
        raise ValidationError("provider config must be a JSON object")
    mode = doc.get("mode", "stub")
    if mode not in ("stub", "http"):
        raise ValidationError(f"provider config mode must be 'stub' or 'http', got {mode!r}")
    retry_doc = doc.get("retry", {})
    if not isinstance(retry_doc, dict):
        raise ValidationError("provider config field 'retry' must be an object")
    cfg = ProviderConfig(
        mode=mode,
        embedding_endpoint=doc.get("embedding_endpoint", ""),
        textgen_endpoint=doc.get("textgen_endpoint", ""),
        imagegen_endpoint=doc.get("imagegen_endpoint", ""),
        timeout_s=float(doc.get("timeout_s", 30.0)),
        retry=RetryPolicy(
            max_retries=int(retry_doc.get("max_retries", 3)),
            backoff_base_ms=float(retry_doc.get("backoff_base_ms", 500.0)),
        ),
        embedding_dim=int(doc.get("embedding_dim", 16)),
        images_per_class=int(doc.get("images_per_class", DEFAULT_IMAGES_PER_CLASS)),
        max_concurrency=int(doc.get("max_concurrency", DEFAULT_MAX_CONCURRENCY)),
        cache_dir=doc.get("cache_dir"),
    )
    if cfg.mode == "http":
        for fld in ("embedding_endpoint", "textgen_endpoint", "imagegen_endpoint"):
            url = getattr(cfg, fld)
            if not isinstance(url, str) or not url.startswith(("http://", "https://")):
                raise ValidationError(
                    f"provider config field '{fld}' must be an http(s) URL, got {url!r}"
                )
    if cfg.embedding_dim < 2:
        raise ValidationError("provider config embedding_dim must be >= 2")
    if cfg.images_per_class < 1:
        raise ValidationError("provider config images_per_class must be >= 1")
    if cfg.max_concurrency < 1:
        raise ValidationError("provider config max_concurrency must be >= 1")
    return cfg


def load_provider_config(path) -> ProviderConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"provider config not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"provider config is not valid JSON: {exc}") from exc
    return provider_config_from_dict(doc)


# ------------------------------------------------------------------------------
# provider interfaces
# ------------------------------------------------------------------------------


class EmbeddingProvider(Protocol):
    provider_id: str

    def embed_texts(self, texts: Sequence[str]) -> dict: ...

    def embed_images(self, images_b64: Sequence[str]) -> dict: ...


class TextgenProvider(Protocol):
    provider_id: str

    def complete(self, prompt: str, n: int) -> list[str]: ...


class ImagegenProvider(Protocol):
    provider_id: str

    def generate(self, prompt: str, n: int) -> list[str]: ...


# ------------------------------------------------------------------------------
# HTTP transport with retries
# ------------------------------------------------------------------------------


class HttpJsonCaller:
    """POSTs JSON with auth-from-env, bounded retries, exponential backoff."""

    def __init__(
        self,
        retry: RetryPolicy = RetryPolicy(),
        timeout_s: float = 30.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.retry = retry
        self.sleep = sleep
        self.client = httpx.Client(timeout=timeout_s, transport=transport)

    def post(self, url: str, payload: dict, key_env: str) -> dict:
        headers = {}
        key = os.environ.get(key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        delay = self.retry.backoff_base_ms / 1000.0
        attempts = self.retry.max_retries + 1
        last = "no attempt made"
        for attempt in range(attempts):
            try:
                resp = self.client.post(url, json=payload, headers=headers)
            except httpx.HTTPError as exc:
                last = f"transport error: {type(exc).__name__}"
            else:
                if resp.status_code < 400:
                    try:
                        return resp.json()
                    except (json.JSONDecodeError, ValueError) as exc:
                        raise ProviderShapeError(
                            f"{url}: response is not valid JSON: {exc}"
                        ) from exc
                if 400 <= resp.status_code < 500:
                    raise ProviderUnavailableError(
                        f"{url}: provider rejected the request with HTTP "
                        f"{resp.status_code}"
                    )
                last = f"HTTP {resp.status_code}"
            if attempt + 1 < attempts:
                logger.warning(
                    "provider retry %d/%d for %s after %s",
                    attempt + 1,
                    self.retry.max_retries,
                    url,
                    last,
                )
                self.sleep(delay)
                delay *= 2.0
        raise ProviderUnavailableError(
            f"{url}: unavailable after {attempts} attempts (last: {last})"
        )


class HttpEmbeddingProvider:
    def __init__(self, endpoint: str, caller: HttpJsonCaller):
        self.endpoint = endpoint
        self.caller = caller
        self.provider_id = f"embed:{endpoint}"

    def embed_texts(self, texts):
        return self.caller.post(self.endpoint, {"texts": list(texts)}, EMBED_KEY_ENV)

    def embed_images(self, images_b64):
        return self.caller.post(
            self.endpoint, {"images_b64": list(images_b64)}, EMBED_KEY_ENV
        )


class HttpTextgenProvider:
    def __init__(self, endpoint: str, caller: HttpJsonCaller):
        self.endpoint = endpoint
        self.caller = caller
        self.provider_id = f"textgen:{endpoint}"

    def complete(self, prompt, n):
        doc = self.caller.post(self.endpoint, {"prompt": prompt, "n": n}, TEXTGEN_KEY_ENV)
        completions = doc.get("completions") if isinstance(doc, dict) else None
        if not isinstance(completions, list) or any(
            not isinstance(c, str) for c in completions
        ):
            raise ProviderShapeError(
                f"{self.endpoint}: expected {{'completions': [str, ...]}}"
            )
        return completions


class HttpImagegenProvider:
    def __init__(self, endpoint: str, caller: HttpJsonCaller):
        self.endpoint = endpoint
        self.caller = caller
        self.provider_id = f"imagegen:{endpoint}"

    def generate(self, prompt, n):
        doc = self.caller.post(self.endpoint, {"prompt": prompt, "n": n}, IMAGEGEN_KEY_ENV)
        images = doc.get("images_b64") if isinstance(doc, dict) else None
        if not isinstance(images, list) or any(not isinstance(i, str) for i in images):
            raise ProviderShapeError(
                f"{self.endpoint}: expected {{'images_b64': [str, ...]}}"
            )
        return images


# ------------------------------------------------------------------------------
# deterministic stubs
# ------------------------------------------------------------------------------


def _seed_from(key: str) -> int:
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


def _stub_unit_vector(key: str, dim: int) -> list[float]:
    rng = np.random.Generator(np.random.PCG64(_seed_from(key)))
    v = rng.standard_normal(dim)
    return list(v / np.linalg.norm(v))


def _tiny_png(rgb: tuple[int, int, int], size: int = 16) -> bytes:
    """Minimal solid-color PNG so stub image refs render in a browser."""

    def chunk(tag: bytes, data: bytes) -> bytes:
        return (
            struct.pack(">I", len(data))
            + tag
            + data
            + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)
        )

    row = b"\x00" + bytes(rgb) * size
    body = zlib.compress(row * size)
    ihdr = struct.pack(">IIBBBBB", size, size, 8, 2, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", body)
        + chunk(b"IEND", b"")
    )


# canned alternatives for a handful of demo queries; anything else gets
# deterministic hash-derived labels
_STUB_ALTERNATIVES = {
    "spotted lanternfly": [
        "cicada",
        "stink bug",
        "boxelder bug",
        "leafhopper",
        "planthopper",
        "moth",
        "japanese beetle",
        "firefly",
        "assassin bug",
        "ladybug",
    ],
}

_STUB_DETAILS = (
    "in bright natural light",
    "on a weathered wooden table",
    "against a clear blue sky",
    "surrounded by green foliage",
    "in a quiet city street",
    "near a calm body of water",
    "under warm indoor lighting",
    "with mountains in the distance",
    "resting on mossy ground",
    "seen from a low angle",
    "in early morning fog",
    "at golden hour",
)


class StubTextgenProvider:
    """Deterministic text generation driven by the prompt contents.

    Understands the three prompt families used by the pipeline (alternatives,
    stage-1 traits, stage-2 captions) and answers each conformingly, so the
    offline pipeline exercises the same parsing and validation paths as a real
    provider.
    """

    provider_id = "stub:textgen:v1"

    def __init__(self):
        self.calls = 0

    def complete(self, prompt: str, n: int) -> list[str]:
        self.calls += 1
        if "Create 10 realistic alternatives" in prompt:
            return self._alternatives(prompt)
        if "alternative captions for the subject '" in prompt:
            return self._captions(prompt, n)
        if "global taxonomical traits" in prompt:
            return [
                "Subjects in this domain vary in color, texture, and setting; "
                "captions should place them in varied realistic scenes."
            ][:n] or [""]
        key = hashlib.sha256(prompt.encode()).hexdigest()[:8]
        return [f"completion {i + 1} for request {key}" for i in range(n)]

    @staticmethod
    def _extract(prompt: str, start_marker: str, *ends: str) -> str:
        """Text after start_marker, cut at the earliest of the end markers."""
        idx = prompt.find(start_marker)
        if idx < 0:
            return ""
        rest = prompt[idx + len(start_marker):]
        cuts = [c for c in (rest.find(e) for e in ends) if c >= 0]
        if cuts:
            rest = rest[: min(cuts)]
        return rest.strip()

    def _alternatives(self, prompt: str) -> list[str]:
        query = self._extract(prompt, "The given label is: ", " The label belongs")
        query = query.strip().rstrip(".")
        canned = _STUB_ALTERNATIVES.get(query.lower())
        if canned:
            return list(canned)
        rng = np.random.Generator(np.random.PCG64(_seed_from(f"alts:{query}")))
        kinds = ["variant", "relative", "counterpart", "neighbor", "analogue"]
        out = []
        for i in range(10):
            kind = kinds[int(rng.integers(0, len(kinds)))]
            out.append(f"{query} {kind} {i + 1}")
        return out

    def _captions(self, prompt: str, n: int) -> list[str]:
        # the long end markers keep subjects containing apostrophes intact;
        # the bare close-quote covers hand-rolled prompt variants
        subject = self._extract(prompt, "for the subject '", "'. Each caption", "'.")
        template = self._extract(prompt, "template provided: '", "'. An example", "'.")
        try:
            prefix = template.format(class_name=subject)
        except (KeyError, IndexError):
            prefix = f"{template} {subject}"
        rng = np.random.Generator(np.random.PCG64(_seed_from(f"caps:{subject}:{template}")))
        start = int(rng.integers(0, len(_STUB_DETAILS)))
        return [
            f"{prefix}, {_STUB_DETAILS[(start + i) % len(_STUB_DETAILS)]}"
            for i in range(n)
        ]


class StubEmbeddingProvider:
    """Unit vectors seeded by a hash of the input; same input, same vector."""

    def __init__(self, dim: int = 16):
        self.dim = dim
        self.provider_id = f"stub:embed:v1:d{dim}"
        self.calls = 0

    def embed_texts(self, texts):
        self.calls += 1
        return {
            "dim": self.dim,
            "vectors": [_stub_unit_vector(f"text:{t}", self.dim) for t in texts],
        }

    def embed_images(self, images_b64):
        self.calls += 1
        return {
            "dim": self.dim,
            "vectors": [_stub_unit_vector(f"image:{b}", self.dim) for b in images_b64],
        }


class StubImagegenProvider:
    """Tiny solid-color PNGs, color derived from the prompt hash."""

    provider_id = "stub:imagegen:v1"

    def __init__(self):
        self.calls = 0

    def generate(self, prompt, n):
        self.calls += 1
        out = []
        for i in range(n):
            h = hashlib.sha256(f"{prompt}|{i}".encode()).digest()
            png = _tiny_png((h[0], h[1], h[2]))
            out.append(base64.b64encode(png).decode("ascii"))
        return out


# ------------------------------------------------------------------------------
# orchestration
# ------------------------------------------------------------------------------


class ProviderSet:
    """The three providers plus caching and image storage, as one unit."""

    def __init__(
        self,
        embeddings: EmbeddingProvider,
        textgen: TextgenProvider,
        imagegen: ImagegenProvider,
        *,
        request_cache: RequestCache | None = None,
        image_store: ContentStore | None = None,
        images_per_class: int = DEFAULT_IMAGES_PER_CLASS,
        max_concurrency: int = DEFAULT_MAX_CONCURRENCY,
    ):
        self.embeddings = embeddings
        self.textgen = textgen
        self.imagegen = imagegen
        self.request_cache = request_cache or RequestCache()
        self.image_store = image_store or ContentStore()
        self.images_per_class = images_per_class
        self.max_concurrency = max_concurrency
        # cap on simultaneous in-flight provider calls across worker threads
        self._slots = threading.Semaphore(max_concurrency)

    # -- embeddings -------------------------------------------------------

    def _embed_cached(self, request: dict, call) -> np.ndarray:
        pid = self.embeddings.provider_id
        doc = self.request_cache.get_json(pid, request)
        if doc is None:
            with self._slots:
                doc = call()
            self._check_embed_shape(doc, request)
            self.request_cache.put_json(pid, request, doc)
        else:
            self._check_embed_shape(doc, request)
        vectors = np.asarray(doc["vectors"], dtype=np.float64)
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        if np.any(norms <= 0) or not np.all(np.isfinite(vectors)):
            raise ProviderShapeError(
                f"{pid}: returned a zero or non-finite embedding vector"
            )
        return vectors / norms

    @staticmethod
    def _check_embed_shape(doc, request) -> None:
        n_inputs = len(next(iter(request.values())))
        if not isinstance(doc, dict) or "dim" not in doc or "vectors" not in doc:
            raise ProviderShapeError("embed response must carry 'dim' and 'vectors'")
        vectors = doc["vectors"]
        if not isinstance(vectors, list) or len(vectors) != n_inputs:
            raise ProviderShapeError(
                f"embed response has {len(vectors) if isinstance(vectors, list) else '??'} "
                f"vectors for {n_inputs} inputs"
            )
        dim = doc["dim"]
        if any(not isinstance(v, list) or len(v) != dim for v in vectors):
            raise ProviderShapeError(
                f"embed response vectors do not all have the declared dim {dim}"
            )

    def fetch_text_embeddings(self, texts: Sequence[str]) -> np.ndarray:
        """Unit-normalized float64 embeddings, one row per text, via cache."""
        texts = list(texts)
        if not texts:
            raise EmptySetError("fetch_text_embeddings needs at least one text")
        request = {"texts": texts}
        return self._embed_cached(request, lambda: self.embeddings.embed_texts(texts))

    def fetch_image_embeddings(self, images: Sequence[bytes]) -> np.ndarray:
        """Unit-normalized float64 embeddings, one row per image, via cache."""
        images = list(images)
        if not images:
            raise EmptySetError("fetch_image_embeddings needs at least one image")
        b64 = [base64.b64encode(b).decode("ascii") for b in images]
        request = {"images_b64": b64}
        return self._embed_cached(request, lambda: self.embeddings.embed_images(b64))

    # -- text generation --------------------------------------------------

    def generate_alternatives(self, query: str, domain: str | None = None) -> list[str]:
        """Up to 10 distinct non-empty labels, the query itself excluded."""
        query = (query or "").strip()
        if not query:
            raise ValidationError("query must be non-empty")
        prompt = ALTERNATIVES_PROMPT.format(query=query)
        if domain:
            prompt += ALTERNATIVES_DOMAIN_SUFFIX.format(domain=domain)
        completions = self._complete_cached(prompt, n=10)
        labels: list[str] = []
        seen: set[str] = set()
        dropped = 0
        for comp in completions:
            for line in comp.splitlines():
                label = line.strip().strip("-*").strip()
                label = label.lstrip("0123456789.) ").strip()
                if not label:
                    continue
                folded = label.casefold()
                if folded == query.casefold() or folded in seen:
                    dropped += 1
                    continue
                seen.add(folded)
                labels.append(label)
        if dropped:
            logger.info(
                "generate_alternatives dropped %d duplicate/echo labels for query %r",
                dropped,
                query,
            )
        return labels[:10]

    def _complete_cached(self, prompt: str, n: int) -> list[str]:
        pid = self.textgen.provider_id
        request = {"prompt": prompt, "n": n}
        doc = self.request_cache.get_json(pid, request)
        if doc is None:
            with self._slots:
                completions = self.textgen.complete(prompt, n)
            doc = {"completions": completions}
            self.request_cache.put_json(pid, request, doc)
        completions = doc.get("completions")
        if not isinstance(completions, list) or any(
            not isinstance(c, str) for c in completions
        ):
            raise ProviderShapeError(f"{pid}: expected {{'completions': [str, ...]}}")
        return completions

    def generate_captions(
        self,
        class_name: str,
        domain: str,
        n: int,
        prompt_template: str = DEFAULT_PROMPT_TEMPLATE,
    ) -> list[str]:
        """n descriptive captions, each starting with the instantiated template.

        Non-conforming completions are rejected and re-requested up to 2 more
        times; if still short, PartialResultError carries the conforming subset.
        """
        if n < 1:
            raise ValidationError(f"caption count must be >= 1, got {n}")
        try:
            prefix = prompt_template.format(class_name=class_name)
        except (KeyError, IndexError) as exc:
            raise ValidationError(
                f"prompt template {prompt_template!r} must use {{class_name}}"
            ) from exc
        stage1 = CAPTION_STAGE1_PROMPT.format(
            num_captions=n, global_traits=domain or "general subjects"
        )
        traits = self._complete_cached(stage1, n=1)
        context = traits[0].strip() if traits else ""
        stage2_base = CAPTION_STAGE2_PROMPT.format(
            num_captions=n, subject=class_name, prompt_template=prompt_template
        )
        if context:
            stage2_base += f" Consider these traits: {context}"
        accepted: list[str] = []
        rejected = 0
        prefix_fold = prefix.casefold()
        for round_no in range(1 + CAPTION_RETRY_ROUNDS):
            missing = n - len(accepted)
            if missing <= 0:
                break
            prompt = stage2_base if round_no == 0 else (
                f"{stage2_base} (attempt {round_no + 1}: previous captions did not "
                f"start with '{prefix}')"
            )
            for cand in self._complete_cached(prompt, n=missing):
                cand = cand.strip()
                if cand.casefold().startswith(prefix_fold):
                    accepted.append(cand)
                else:
                    rejected += 1
            if rejected and len(accepted) < n:
                logger.info(
                    "generate_captions: %d non-conforming captions for %r so far",
                    rejected,
                    class_name,
                )
        if len(accepted) < n:
            raise PartialResultError(
                f"only {len(accepted)}/{n} captions for '{class_name}' begin with "
                f"the required prefix '{prefix}' after {1 + CAPTION_RETRY_ROUNDS} attempts",
                partial=accepted,
            )
        return accepted[:n]

    # -- image generation --------------------------------------------------

    def generate_images(self, caption: str, n: int | None = None) -> list[str]:
        """Generate n images for a caption; returns content-store refs."""
        if n is None:
            n = self.images_per_class
        if n < 1:
            raise ValidationError(f"image count must be >= 1, got {n}")
        pid = self.imagegen.provider_id
        request = {"prompt": caption, "n": n}
        doc = self.request_cache.get_json(pid, request)
        if doc is None:
            with self._slots:
                images_b64 = self.imagegen.generate(caption, n)
            if not isinstance(images_b64, list) or any(
                not isinstance(i, str) for i in images_b64
            ):
                raise ProviderShapeError(f"{pid}: expected {{'images_b64': [str, ...]}}")
            if len(images_b64) > n:
                raise ProviderShapeError(
                    f"{pid}: returned {len(images_b64)} images for a request of {n}"
                )
            doc = {"images_b64": images_b64}
            # cache even partial batches: the bytes are real, the shortfall is
            # reported through PartialResultError below
            self.request_cache.put_json(pid, request, doc)
        refs = []
        for b64 in doc["images_b64"]:
            try:
                blob = base64.b64decode(b64, validate=True)
            except (binascii.Error, ValueError) as exc:
                raise ProviderShapeError(f"{pid}: invalid base64 image payload") from exc
            refs.append(self.image_store.add(blob))
        if len(refs) < n:
            raise PartialResultError(
                f"imagegen produced {len(refs)}/{n} images for caption {caption!r}",
                partial=refs,
            )
        return refs


def build_provider_set(
    config: ProviderConfig,
    *,
    transport: httpx.BaseTransport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> ProviderSet:
    """Construct a ProviderSet (stub or HTTP) from its config."""
    store_dir = Path(config.cache_dir) if config.cache_dir else None
    request_cache = RequestCache(
        ByteStore(store_dir / "requests" if store_dir else None)
    )
    image_store = ContentStore(ByteStore(store_dir / "images" if store_dir else None))
    if config.mode == "stub":
        return ProviderSet(
            StubEmbeddingProvider(dim=config.embedding_dim),
            StubTextgenProvider(),
            StubImagegenProvider(),
            request_cache=request_cache,
            image_store=image_store,
            images_per_class=config.images_per_class,
            max_concurrency=config.max_concurrency,
        )
    caller = HttpJsonCaller(
        retry=config.retry,
        timeout_s=config.timeout_s,
        transport=transport,
        sleep=sleep,
    )
    return ProviderSet(
        HttpEmbeddingProvider(config.embedding_endpoint, caller),
        HttpTextgenProvider(config.textgen_endpoint, caller),
        HttpImagegenProvider(config.imagegen_endpoint, caller),
        request_cache=request_cache,
        image_store=image_store,
        images_per_class=config.images_per_class,
        max_concurrency=config.max_concurrency,
    )
