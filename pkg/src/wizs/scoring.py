"""Per-class suitability scores over a multimodal embedding bundle.

For each class the bundle holds a plain-text prompt embedding (unit vector),
a set of generated-image embeddings, and optionally a set of descriptive-text
(caption) embeddings. Three scores are computed per class, each in an image
variant and a text variant:

consistency   For each sample k of class i, take the worst-case (minimum over
              contrast classes j) cosine between the sample-to-centroid
              difference (sample_k - centroid_j) and the text difference
              (text_i - text_j); average over samples. Near +1 means the
              class's samples relate to every other class the same way the
              class texts do.

silhouette    Multimodal silhouette: per-sample cohesion
              a = (1 - cos(sample, own_centroid)) + lam * (1 - cos(sample, own_text))
              and separation
              b = min_j [(1 - cos(sample, centroid_j)) + lam * (1 - cos(sample, text_j))],
              silhouette = (b - a) / max(a, b), averaged over samples.

compound      consistency + alpha * silhouette.

The text variant substitutes the per-class descriptive-text embeddings (and
their centroids) for image embeddings everywhere. Difference vectors and means
are taken on unit inputs and deliberately NOT renormalized.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from . import vectors
from .errors import (
    DegenerateDifferenceError,
    DegenerateSilhouetteError,
    DimensionMismatchError,
    EmptyClassError,
    NoAlternativesError,
    NonFiniteError,
    ValidationError,
)
from .vectors import NORM_EPS, MeanVector

Variant = Literal["image", "text"]
VARIANTS: tuple[str, ...] = ("image", "text")


@dataclass(frozen=True)
class ScoringConfig:
    """Scoring constants.

    lam weights the text term inside silhouette distances; alpha weights
    silhouette inside the compound score. Defaults are load-bearing: changing
    them changes every downstream calibration.
    """

    lam: float = 2.5
    alpha: float = 4.0
    min_images_per_class: int = 1

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValidationError(f"lam must be finite and >= 0, got {self.lam!r}")
        if not np.isfinite(self.alpha):
            raise ValidationError(f"alpha must be finite, got {self.alpha!r}")
        if self.min_images_per_class < 1:
            raise ValidationError("min_images_per_class must be >= 1")


@dataclass
class ClassEmbeddings:
    """All embeddings belonging to one class.

    plain_text is the embedded prompt ("a photo of a {class_name}"), unit norm.
    image_set rows are generated-image embeddings; descriptive_text_set rows are
    caption embeddings; labeled_real_images rows are ground-truth images known
    to depict this class. All rows unit norm, all dimensions equal.
    """

    class_id: str
    plain_text: np.ndarray
    image_set: np.ndarray | None = None
    descriptive_text_set: np.ndarray | None = None
    labeled_real_images: np.ndarray | None = None

    def __post_init__(self):
        self.plain_text = vectors.as_vector(
            self.plain_text, name=f"class '{self.class_id}' plain_text"
        )
        for attr in ("image_set", "descriptive_text_set", "labeled_real_images"):
            val = getattr(self, attr)
            if val is None:
                continue
            mat = vectors.as_matrix(val, name=f"class '{self.class_id}' {attr}")
            if mat.shape[1] != self.plain_text.shape[0]:
                raise DimensionMismatchError(
                    f"class '{self.class_id}' {attr} is {mat.shape[1]}-dim but "
                    f"plain_text is {self.plain_text.shape[0]}-dim"
                )
            setattr(self, attr, mat)

    @property
    def dim(self) -> int:
        return int(self.plain_text.shape[0])


@dataclass(frozen=True)
class ClassScores:
    class_id: str
    variant: str
    consistency: float
    silhouette: float
    compound: float


# ------------------------------------------------------------------------------
# cores shared by the image and text variants
# ------------------------------------------------------------------------------


def _sample_matrix(cls: ClassEmbeddings, variant: str) -> np.ndarray:
    attr = "image_set" if variant == "image" else "descriptive_text_set"
    mat = getattr(cls, attr)
    if mat is None or mat.shape[0] == 0:
        raise EmptyClassError(f"class '{cls.class_id}' has no {attr} samples")
    return mat


def _row_cosines(mat: np.ndarray, v: np.ndarray) -> np.ndarray:
    # rows and v are nonzero by construction (unit embeddings / validated means)
    denom = vectors.row_norms(mat) * float(np.linalg.norm(v))
    return np.clip((mat @ v) / denom, -1.0, 1.0)


def _consistency_core(
    target_id: str,
    samples: np.ndarray,
    target_text: np.ndarray,
    others: Sequence[tuple[str, np.ndarray, np.ndarray]],
) -> float:
    """min over contrast classes of cos(sample - centroid_j, text_i - text_j),
    averaged over samples. others holds (class_id, centroid_j, text_j)."""
    if not others:
        raise NoAlternativesError(
            f"class '{target_id}' has no contrast classes to score against"
        )
    worst = np.full(samples.shape[0], np.inf)
    for other_id, centroid_j, text_j in others:
        dt = target_text - text_j
        ndt = float(np.linalg.norm(dt))
        if ndt <= NORM_EPS:
            raise DegenerateDifferenceError(
                f"classes '{target_id}' and '{other_id}' have identical "
                "plain-text embeddings"
            )
        diffs = samples - centroid_j
        ndi = vectors.row_norms(diffs)
        bad = np.nonzero(ndi <= NORM_EPS)[0]
        if bad.size:
            raise DegenerateDifferenceError(
                f"sample {int(bad[0])} of class '{target_id}' coincides with "
                f"the centroid of class '{other_id}'"
            )
        cos = np.clip((diffs @ dt) / (ndi * ndt), -1.0, 1.0)
        worst = np.minimum(worst, cos)
    return float(worst.mean())


def _silhouette_core(
    target_id: str,
    samples: np.ndarray,
    own_centroid: np.ndarray,
    own_text: np.ndarray,
    others: Sequence[tuple[str, np.ndarray, np.ndarray]],
    lam: float,
) -> float:
    if not others:
        raise NoAlternativesError(
            f"class '{target_id}' has no contrast classes to score against"
        )
    a = (1.0 - _row_cosines(samples, own_centroid)) + lam * (
        1.0 - _row_cosines(samples, own_text)
    )
    b = np.full(samples.shape[0], np.inf)
    for _, centroid_j, text_j in others:
        d = (1.0 - _row_cosines(samples, centroid_j)) + lam * (
            1.0 - _row_cosines(samples, text_j)
        )
        b = np.minimum(b, d)
    denom = np.maximum(a, b)
    bad = np.nonzero(denom <= NORM_EPS)[0]
    if bad.size:
        raise DegenerateSilhouetteError(
            f"sample {int(bad[0])} of class '{target_id}' has zero cohesion and "
            "zero separation; silhouette undefined"
        )
    return float(np.mean((b - a) / denom))


def _contrast_tuples(
    classes: Sequence[ClassEmbeddings], skip: int, variant: str
) -> list[tuple[str, np.ndarray, np.ndarray]]:
    out = []
    for j, cls in enumerate(classes):
        if j == skip:
            continue
        centroid = vectors.mean(_sample_matrix(cls, variant)).values
        out.append((cls.class_id, centroid, cls.plain_text))
    return out


# ------------------------------------------------------------------------------
# public scoring operations
# ------------------------------------------------------------------------------


def consistency_score(
    target: ClassEmbeddings,
    others: Iterable[ClassEmbeddings],
    config: ScoringConfig = ScoringConfig(),
) -> float:
    """Image-variant consistency of ``target`` against contrast classes."""
    classes = [target, *others]
    _validate_bundle(classes, config, variant="image")
    samples = _sample_matrix(target, "image")
    return _consistency_core(
        target.class_id, samples, target.plain_text, _contrast_tuples(classes, 0, "image")
    )


def silhouette_score(
    target: ClassEmbeddings,
    others: Iterable[ClassEmbeddings],
    config: ScoringConfig = ScoringConfig(),
) -> float:
    """Image-variant multimodal silhouette of ``target``; result in [-1, 1]."""
    classes = [target, *others]
    _validate_bundle(classes, config, variant="image")
    samples = _sample_matrix(target, "image")
    own_centroid = vectors.mean(samples).values
    return _silhouette_core(
        target.class_id,
        samples,
        own_centroid,
        target.plain_text,
        _contrast_tuples(classes, 0, "image"),
        config.lam,
    )


def text_consistency_score(
    target: ClassEmbeddings,
    others: Iterable[ClassEmbeddings],
    config: ScoringConfig = ScoringConfig(),
) -> float:
    """Consistency computed over descriptive-text embeddings instead of images."""
    classes = [target, *others]
    _validate_bundle(classes, config, variant="text")
    samples = _sample_matrix(target, "text")
    return _consistency_core(
        target.class_id, samples, target.plain_text, _contrast_tuples(classes, 0, "text")
    )


def text_silhouette_score(
    target: ClassEmbeddings,
    others: Iterable[ClassEmbeddings],
    config: ScoringConfig = ScoringConfig(),
) -> float:
    """Silhouette computed over descriptive-text embeddings instead of images."""
    classes = [target, *others]
    _validate_bundle(classes, config, variant="text")
    samples = _sample_matrix(target, "text")
    own_centroid = vectors.mean(samples).values
    return _silhouette_core(
        target.class_id,
        samples,
        own_centroid,
        target.plain_text,
        _contrast_tuples(classes, 0, "text"),
        config.lam,
    )


def compound_score(
    consistency: float, silhouette: float, config: ScoringConfig = ScoringConfig()
) -> float:
    """consistency + alpha * silhouette."""
    if not (np.isfinite(consistency) and np.isfinite(silhouette)):
        raise NonFiniteError("compound_score inputs must be finite")
    return float(consistency + config.alpha * silhouette)


def score_bundle(
    classes: Sequence[ClassEmbeddings],
    config: ScoringConfig = ScoringConfig(),
    variant: Variant = "image",
) -> list[ClassScores]:
    """Score every class in the bundle against all the others.

    Returns one ClassScores per class, in input order. Degeneracies raise with
    the offending class named; nothing is silently skipped.
    """
    classes = list(classes)
    _validate_bundle(classes, config, variant=variant)
    results = []
    for i, cls in enumerate(classes):
        samples = _sample_matrix(cls, variant)
        contrast = _contrast_tuples(classes, i, variant)
        own_centroid = vectors.mean(samples).values
        cons = _consistency_core(cls.class_id, samples, cls.plain_text, contrast)
        sil = _silhouette_core(
            cls.class_id, samples, own_centroid, cls.plain_text, contrast, config.lam
        )
        results.append(
            ClassScores(
                class_id=cls.class_id,
                variant=variant,
                consistency=cons,
                silhouette=sil,
                compound=compound_score(cons, sil, config),
            )
        )
    return results


def _validate_bundle(
    classes: Sequence[ClassEmbeddings], config: ScoringConfig, variant: str
) -> None:
    if variant not in VARIANTS:
        raise ValidationError(f"unknown variant {variant!r}; expected image or text")
    if len(classes) < 2:
        raise NoAlternativesError(
            f"scoring needs at least 2 classes, got {len(classes)}"
        )
    seen: set[str] = set()
    for cls in classes:
        if cls.class_id in seen:
            raise ValidationError(f"duplicate class_id '{cls.class_id}' in bundle")
        seen.add(cls.class_id)
    dims = {cls.dim for cls in classes}
    if len(dims) > 1:
        raise DimensionMismatchError(f"bundle mixes dimensions {sorted(dims)}")
    if dims and min(dims) < 2:
        raise DimensionMismatchError("embeddings must have dimension >= 2")
    for cls in classes:
        samples = _sample_matrix(cls, variant)  # raises EmptyClassError if absent
        if variant == "image" and samples.shape[0] < config.min_images_per_class:
            raise ValidationError(
                f"class '{cls.class_id}' has {samples.shape[0]} images, "
                f"fewer than min_images_per_class={config.min_images_per_class}"
            )
