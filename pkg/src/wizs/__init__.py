"""wizs: predict zero-shot classification accuracy without labels.

Given a class list, the library scores how cleanly a vision-language embedding
space separates the classes, using only generated probes (captions and images),
then calibrates those scores into an accuracy estimate.

Module map:

    vectors      unit-vector primitives (normalize, cosine, mean)
    scoring      per-class consistency / silhouette / compound scores
    evaluation   zero-shot classification, accuracy, Spearman, reports
    calibration  beta-regression score -> accuracy mapping (+ digamma kernel)
    blobfile     binary embedding-blob format
    manifest     bundle manifests tying blobs to a class list
    cache        content-addressed stores for responses and images
    providers    embedding / text / image providers (HTTP + offline stubs)
    pipeline     end-to-end prediction for one query
    service      HTTP job API over the pipeline
    cli          command-line interface
"""
from .errors import WizsError, ValidationError, ComputationError, ProviderError
from .scoring import (
    ClassEmbeddings,
    ClassScores,
    ScoringConfig,
    compound_score,
    consistency_score,
    score_bundle,
    silhouette_score,
    text_consistency_score,
    text_silhouette_score,
)
from .vectors import MeanVector, cosine, mean, normalize

__version__ = "0.1.0"

__all__ = [
    "WizsError",
    "ValidationError",
    "ComputationError",
    "ProviderError",
    "ClassEmbeddings",
    "ClassScores",
    "ScoringConfig",
    "compound_score",
    "consistency_score",
    "score_bundle",
    "silhouette_score",
    "text_consistency_score",
    "text_silhouette_score",
    "MeanVector",
    "cosine",
    "mean",
    "normalize",
    "__version__",
]
