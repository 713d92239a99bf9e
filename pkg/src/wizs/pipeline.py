"""End-to-end zero-shot accuracy prediction for a single query label.

Orchestrates the generated-content flow shared by the CLI and the HTTP
service: alternatives -> captions -> images -> embeddings -> scores ->
calibrated accuracy. The headline number is the calibrated accuracy of the
query class, computed from its image-variant compound score.

All content fetching goes through a ProviderSet, so results are cached and
fully deterministic with the stub providers. Stage transitions are reported
through an optional callback, which the service maps to job states.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .calibration import CalibrationModel, predict_accuracy
from .errors import NoAlternativesError, PartialResultError, ValidationError
from .providers import DEFAULT_PROMPT_TEMPLATE, ProviderSet
from .scoring import ClassEmbeddings, ClassScores, ScoringConfig, score_bundle

logger = logging.getLogger("wizs.pipeline")

STAGES = (
    "generating_alternatives",
    "captioning",
    "generating_images",
    "embedding",
    "scoring",
)

DEFAULT_N_IMAGES = 20


@dataclass(frozen=True)
class PredictionRequest:
    """One query to predict accuracy for.

    alternatives=None means "generate them"; a provided list is used as-is
    after normalization and must not contain the query itself (front ends
    that prefer filtering to rejection filter before building the request).
    n_images is the generated image count per class; captions are generated
    1:1 with images.
    """

    query: str
    alternatives: Sequence[str] | None = None
    domain: str | None = None
    n_images: int = DEFAULT_N_IMAGES
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE


@dataclass(frozen=True)
class PredictionResult:
    query: str
    alternatives: tuple[str, ...]
    predicted_accuracy: float
    compound_score: float
    per_class: tuple[ClassScores, ...]  # query first, then alternatives
    captions: Mapping[str, tuple[str, ...]]
    image_refs: Mapping[str, tuple[str, ...]]
    calibration_model_id: str
    notes: tuple[str, ...] = field(default=())


def result_to_dict(result: "PredictionResult") -> dict:
    """JSON-ready document: scores and content refs, never raw image bytes."""
    return {
        "query": result.query,
        "alternatives": list(result.alternatives),
        "predicted_accuracy": result.predicted_accuracy,
        "compound_score": result.compound_score,
        "calibration_model_id": result.calibration_model_id,
        "per_class": [
            {
                "class_id": s.class_id,
                "consistency": s.consistency,
                "silhouette": s.silhouette,
                "compound": s.compound,
            }
            for s in result.per_class
        ],
        "captions": {k: list(v) for k, v in result.captions.items()},
        "image_refs": {k: list(v) for k, v in result.image_refs.items()},
        "notes": list(result.notes),
    }


def normalize_alternatives(raw: Sequence[str]) -> list[str]:
    """Strip, drop empties, dedupe case-insensitively, preserve order."""
    out: list[str] = []
    seen: set[str] = set()
    for item in raw:
        label = str(item).strip()
        if not label or label.casefold() in seen:
            continue
        seen.add(label.casefold())
        out.append(label)
    return out


def _stage(on_stage: Callable[[str], None] | None, stage: str) -> None:
    if on_stage is not None:
        on_stage(stage)


def run_prediction(
    request: PredictionRequest,
    providers: ProviderSet,
    model: CalibrationModel,
    config: ScoringConfig | None = None,
    on_stage: Callable[[str], None] | None = None,
) -> PredictionResult:
    """Predict zero-shot accuracy for request.query against its alternatives.

    Partial caption or image batches degrade gracefully (the class keeps what
    was produced, with a note) as long as at least one caption and one image
    per class survive; an empty class is a hard provider error.
    """
    config = config or ScoringConfig()
    query = (request.query or "").strip()
    if not query:
        raise ValidationError("query must be a non-empty string")
    if request.n_images < 1:
        raise ValidationError(f"n_images must be >= 1, got {request.n_images}")
    notes: list[str] = []

    _stage(on_stage, "generating_alternatives")
    if request.alternatives is None:
        alternatives = providers.generate_alternatives(query, request.domain)
    else:
        alternatives = normalize_alternatives(request.alternatives)
        if query.casefold() in {a.casefold() for a in alternatives}:
            raise ValidationError(
                "alternatives must not contain the query label itself"
            )
    if not alternatives:
        raise NoAlternativesError(
            f"no usable alternative labels for query '{query}'"
        )
    names = [query] + alternatives

    _stage(on_stage, "captioning")
    captions: dict[str, list[str]] = {}
    for name in names:
        try:
            caps = providers.generate_captions(
                name, request.domain or "", request.n_images, request.prompt_template
            )
        except PartialResultError as exc:
            if not exc.partial:
                raise
            caps = list(exc.partial)
            notes.append(
                f"class '{name}': only {len(caps)}/{request.n_images} captions"
            )
            logger.warning("degraded caption batch for %r: %s", name, exc)
        captions[name] = caps

    _stage(on_stage, "generating_images")
    image_refs: dict[str, list[str]] = {}
    for name in names:
        refs: list[str] = []
        for cap in captions[name]:
            try:
                refs.extend(providers.generate_images(cap, 1))
            except PartialResultError as exc:
                refs.extend(exc.partial)
        if not refs:
            raise PartialResultError(
                f"image generation produced nothing for class '{name}'", partial=[]
            )
        if len(refs) < len(captions[name]):
            notes.append(
                f"class '{name}': only {len(refs)}/{len(captions[name])} images"
            )
        image_refs[name] = refs

    _stage(on_stage, "embedding")
    plain = providers.fetch_text_embeddings(
        [request.prompt_template.format(class_name=n) for n in names]
    )
    classes: list[ClassEmbeddings] = []
    for i, name in enumerate(names):
        images = [providers.image_store.get(r) for r in image_refs[name]]
        classes.append(
            ClassEmbeddings(
                class_id=name,
                plain_text=plain[i],
                image_set=providers.fetch_image_embeddings(images),
                descriptive_text_set=providers.fetch_text_embeddings(captions[name]),
            )
        )

    _stage(on_stage, "scoring")
    scores = score_bundle(classes, config, "image")
    compound = scores[0].compound
    predicted = predict_accuracy(model, compound)
    return PredictionResult(
        query=query,
        alternatives=tuple(alternatives),
        predicted_accuracy=predicted,
        compound_score=compound,
        per_class=tuple(scores),
        captions={n: tuple(c) for n, c in captions.items()},
        image_refs={n: tuple(r) for n, r in image_refs.items()},
        calibration_model_id=model.model_id,
        notes=tuple(notes),
    )
