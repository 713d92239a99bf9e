"""Ground-truth harness: zero-shot classification, accuracy, rank correlation.

This is the labeled side of the system. Given a bundle whose classes carry
labeled real-image embeddings, it measures actual zero-shot accuracy per class
and correlates it (Spearman) with every label-free score, producing a report
that can be exported as CSV or an aligned-column text table.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import vectors
from .errors import (
    DegenerateRanksError,
    EmptyClassError,
    LengthMismatchError,
    NonFiniteError,
    ValidationError,
)
from .scoring import ClassEmbeddings, ScoringConfig, score_bundle

REPORT_COLUMNS = ("dataset", "model", "score_kind", "variant", "spearman_rho", "n_classes")
SCORE_KINDS = ("consistency", "silhouette", "compound")
BASELINE_KIND = "generated_zero_shot"


def classify(image, classes: Sequence[ClassEmbeddings]) -> str:
    """Zero-shot label for one image embedding: the class whose plain-text
    embedding has the highest cosine with it. Exact ties go to the
    lexicographically smallest class_id. The query may have any nonzero norm.
    """
    classes = list(classes)
    if len(classes) < 2:
        raise ValidationError(f"classify needs at least 2 classes, got {len(classes)}")
    sims = {c.class_id: vectors.cosine(image, c.plain_text) for c in classes}
    best = max(sims.values())
    return min(cid for cid, s in sims.items() if s == best)


def _accuracy_over(classes: Sequence[ClassEmbeddings], attr: str) -> dict[str, float]:
    classes = list(classes)
    if len(classes) < 2:
        raise ValidationError("accuracy needs at least 2 classes")
    for cls in classes:
        samples = getattr(cls, attr)
        if samples is None or samples.shape[0] == 0:
            raise EmptyClassError(f"class '{cls.class_id}' has no {attr} samples")
    out: dict[str, float] = {}
    for cls in classes:
        samples = getattr(cls, attr)
        hits = sum(1 for row in samples if classify(row, classes) == cls.class_id)
        out[cls.class_id] = hits / samples.shape[0]
    return out


def per_class_accuracy(classes: Sequence[ClassEmbeddings]) -> dict[str, float]:
    """Fraction of each class's labeled real images classified as that class."""
    return _accuracy_over(classes, "labeled_real_images")


def generated_zero_shot_baseline(classes: Sequence[ClassEmbeddings]) -> dict[str, float]:
    """Same accuracy measurement run on the generated images instead of real
    ones: the label-free baseline the scores compete with."""
    return _accuracy_over(classes, "image_set")


def average_ranks(x) -> np.ndarray:
    """1-based fractional ranks; ties share the mean of their positions."""
    arr = vectors.as_vector(x, name="values")
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.shape[0], dtype=np.float64)
    sorted_vals = arr[order]
    # boundaries of runs of equal values
    boundaries = np.flatnonzero(np.diff(sorted_vals) != 0) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [arr.shape[0]]))
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = 0.5 * (s + e - 1) + 1.0
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks.

    Identical rank vectors give exactly 1.0 and exactly mirrored ones exactly
    -1.0 (this includes every strictly monotone transform of the data); other
    cases are computed in floating point and clamped to [-1, 1]. A constant
    input has no defined ranking and raises DegenerateRanksError.
    """
    vx = vectors.as_vector(x, name="x")
    vy = vectors.as_vector(y, name="y")
    if vx.shape[0] != vy.shape[0]:
        raise LengthMismatchError(
            f"spearman inputs have lengths {vx.shape[0]} and {vy.shape[0]}"
        )
    n = vx.shape[0]
    if n < 3:
        raise ValidationError(f"spearman needs at least 3 points, got {n}")
    if vx.min() == vx.max():
        raise DegenerateRanksError("x is constant; ranks are degenerate")
    if vy.min() == vy.max():
        raise DegenerateRanksError("y is constant; ranks are degenerate")
    rx = average_ranks(vx)
    ry = average_ranks(vy)
    if np.array_equal(rx, ry):
        return 1.0
    if np.array_equal(rx, (n + 1.0) - ry):
        return -1.0
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    r = float((dx @ dy) / np.sqrt((dx @ dx) * (dy @ dy)))
    return float(np.clip(r, -1.0, 1.0))


@dataclass(frozen=True)
class CorrelationRow:
    score_kind: str
    variant: str
    spearman_rho: float | None
    n_classes: int
    note: str = ""


@dataclass
class CorrelationReport:
    dataset_id: str
    model_id: str
    rows: list[CorrelationRow]
    accuracy: dict[str, float]
    scores: dict[tuple[str, str], dict[str, float]] = field(default_factory=dict)


def correlation_report(
    classes: Sequence[ClassEmbeddings],
    config: ScoringConfig = ScoringConfig(),
    *,
    dataset_id: str = "dataset",
    model_id: str = "model",
    variants: Sequence[str] = ("image", "text"),
) -> CorrelationReport:
    """Spearman of every score against measured real-image accuracy.

    One row per (score_kind, variant) plus the generated-image zero-shot
    baseline. A constant score or accuracy vector yields a row with rho None
    and an explanatory note instead of failing the whole report.
    """
    classes = sorted(classes, key=lambda c: c.class_id)
    if len(classes) < 3:
        raise ValidationError(
            f"correlation needs at least 3 classes, got {len(classes)}"
        )
    ids = [c.class_id for c in classes]
    acc_map = per_class_accuracy(classes)
    acc = np.array([acc_map[c] for c in ids])

    report = CorrelationReport(
        dataset_id=dataset_id, model_id=model_id, rows=[], accuracy=dict(acc_map)
    )

    def add_row(kind: str, variant: str, values: np.ndarray) -> None:
        report.scores[(kind, variant)] = dict(zip(ids, (float(v) for v in values)))
        try:
            rho = spearman(values, acc)
            note = ""
        except DegenerateRanksError as exc:
            rho = None
            note = str(exc)
        report.rows.append(
            CorrelationRow(
                score_kind=kind,
                variant=variant,
                spearman_rho=rho,
                n_classes=len(ids),
                note=note,
            )
        )

    for variant in variants:
        scored = score_bundle(classes, config, variant=variant)  # input order kept
        by_kind = {
            "consistency": np.array([r.consistency for r in scored]),
            "silhouette": np.array([r.silhouette for r in scored]),
            "compound": np.array([r.compound for r in scored]),
        }
        for kind in SCORE_KINDS:
            add_row(kind, variant, by_kind[kind])

    baseline = generated_zero_shot_baseline(classes)
    add_row(BASELINE_KIND, "image", np.array([baseline[c] for c in ids]))
    return report


# ------------------------------------------------------------------------------
# export
# ------------------------------------------------------------------------------


def _format_value(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def report_to_csv(report: CorrelationReport) -> str:
    """CSV with one row per correlation; rho formatted with full precision so
    reruns are byte-identical."""
    buf = io.StringIO()
    buf.write(",".join(REPORT_COLUMNS) + "\n")
    for row in report.rows:
        buf.write(
            ",".join(
                (
                    report.dataset_id,
                    report.model_id,
                    row.score_kind,
                    row.variant,
                    _format_value(row.spearman_rho),
                    str(row.n_classes),
                )
            )
            + "\n"
        )
    return buf.getvalue()


def report_rows_from_csv(text: str) -> list[dict[str, str]]:
    """Parse a report CSV back into dict rows (inverse of report_to_csv)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != ",".join(REPORT_COLUMNS):
        raise ValidationError(
            f"report CSV must start with header {','.join(REPORT_COLUMNS)!r}"
        )
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(REPORT_COLUMNS):
            raise ValidationError(f"report CSV line {i} has {len(parts)} columns")
        rows.append(dict(zip(REPORT_COLUMNS, parts)))
    return rows


def render_report_table(rows: list[dict[str, str]]) -> str:
    """Aligned-column plain-text table for terminal viewing."""
    headers = list(REPORT_COLUMNS)
    display = [headers] + [[r[c] for c in headers] for r in rows]
    widths = [max(len(line[i]) for line in display) for i in range(len(headers))]
    out_lines = []
    for j, line in enumerate(display):
        out_lines.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
        if j == 0:
            out_lines.append("  ".join("-" * w for w in widths))
    return "\n".join(out_lines) + "\n"


def report_to_text(report: CorrelationReport) -> str:
    return render_report_table(report_rows_from_csv(report_to_csv(report)))


CALIBRATION_CSV_HEADER = "dataset_id,class_id,compound_score,accuracy"
SCORE_CSV_HEADER = "class_id,variant,consistency,silhouette,compound"


def calibration_rows_to_csv(
    dataset_id: str, compound: dict[str, float], accuracy: dict[str, float]
) -> str:
    """Per-class (compound score, measured accuracy) pairs: the interchange
    format consumed by calibration fitting. Sorted by class_id."""
    missing = sorted(set(compound) ^ set(accuracy))
    if missing:
        raise ValidationError(f"score/accuracy class sets differ: {missing}")
    buf = io.StringIO()
    buf.write(CALIBRATION_CSV_HEADER + "\n")
    for cid in sorted(compound):
        buf.write(
            f"{dataset_id},{cid},{_format_value(compound[cid])},{_format_value(accuracy[cid])}\n"
        )
    return buf.getvalue()


def calibration_rows_from_csv(text: str) -> list[dict]:
    """Inverse of calibration_rows_to_csv; numeric fields parsed to float."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CALIBRATION_CSV_HEADER:
        raise ValidationError(
            f"calibration CSV must start with header {CALIBRATION_CSV_HEADER!r}"
        )
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise ValidationError(
                f"calibration CSV line {i} has {len(parts)} columns, expected 4"
            )
        try:
            score = float(parts[2])
            accuracy = float(parts[3])
        except ValueError:
            raise ValidationError(
                f"calibration CSV line {i}: non-numeric score or accuracy"
            ) from None
        rows.append(
            {
                "dataset_id": parts[0],
                "class_id": parts[1],
                "compound_score": score,
                "accuracy": accuracy,
            }
        )
    return rows


def scores_to_csv(scores) -> str:
    """One row per (class, variant), sorted by class_id then variant."""
    buf = io.StringIO()
    buf.write(SCORE_CSV_HEADER + "\n")
    for s in sorted(scores, key=lambda s: (s.class_id, s.variant)):
        buf.write(
            f"{s.class_id},{s.variant},{_format_value(s.consistency)},"
            f"{_format_value(s.silhouette)},{_format_value(s.compound)}\n"
        )
    return buf.getvalue()
