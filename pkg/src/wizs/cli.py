"""Command-line interface.

Subcommands: ingest, score, eval, fit-calibration, predict, report, serve.
Every command is deterministic and idempotent: identical inputs produce
byte-identical output files.

Exit codes: 0 success, 2 invalid input, 3 computation failure (degenerate
geometry, singular fits), 4 provider failure.
"""
from __future__ import annotations

import functools
import hashlib
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import blobfile, calibration, evaluation, manifest
from .errors import ComputationError, ProviderError, ValidationError
from .pipeline import PredictionRequest, result_to_dict, run_prediction
from .providers import (
    DEFAULT_PROMPT_TEMPLATE,
    ProviderConfig,
    build_provider_set,
    load_provider_config,
)
from .scoring import ScoringConfig, score_bundle

EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_PROVIDER = 4


def _die(code: int, exc: Exception):
    click.echo(f"error: {exc}", err=True)
    raise SystemExit(code)


def mapped_errors(fn):
    """Translate library errors into documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            _die(EXIT_VALIDATION, exc)
        except ComputationError as exc:
            _die(EXIT_COMPUTATION, exc)
        except ProviderError as exc:
            _die(EXIT_PROVIDER, exc)

    return wrapper


def _write_text(path, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValidationError(f"input file not found: {path}") from None


def _providers_from(path):
    config = load_provider_config(path) if path else ProviderConfig()
    return build_provider_set(config)


def _calibration_from(path):
    return calibration.load_model(path) if path else calibration.load_default_model()


@click.group()
@click.version_option(package_name="wizs")
def main():
    """Predict zero-shot accuracy from embedding-space consistency."""


# ------------------------------------------------------------------------ score


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(), help="bundle manifest.json")
@click.option("--out", "out_path", required=True, type=click.Path(), help="output CSV")
@click.option(
    "--variant",
    type=click.Choice(["image", "text", "both"]),
    default="image",
    show_default=True,
    help="score generated images, descriptive captions, or both",
)
@mapped_errors
def score(manifest_path, out_path, variant):
    """Score every class in a bundle (consistency, silhouette, compound)."""
    bundle = manifest.load_bundle(manifest_path)
    config = ScoringConfig()
    variants = ("image", "text") if variant == "both" else (variant,)
    scores = []
    for v in variants:
        scores.extend(score_bundle(bundle.classes, config, v))
    _write_text(out_path, evaluation.scores_to_csv(scores))
    click.echo(f"scored {len(bundle.classes)} classes ({', '.join(variants)}) -> {out_path}")


# ------------------------------------------------------------------------ eval


@main.command("eval")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path(), help="report CSV")
@click.option("--dataset", default=None, help="dataset id override")
@click.option("--model", default=None, help="model id override")
@click.option(
    "--calibration-out",
    default=None,
    type=click.Path(),
    help="also write per-class (compound, accuracy) calibration rows",
)
@mapped_errors
def eval_cmd(manifest_path, out_path, dataset, model, calibration_out):
    """Correlate scores with real-image accuracy on a labeled bundle."""
    bundle = manifest.load_bundle(manifest_path)
    report = evaluation.correlation_report(
        bundle.classes,
        ScoringConfig(),
        dataset_id=dataset or bundle.manifest.dataset_id,
        model_id=model or bundle.manifest.model_id,
    )
    _write_text(out_path, evaluation.report_to_csv(report))
    for row in report.rows:
        if row.note:
            click.echo(f"warning: {row.score_kind}/{row.variant}: {row.note}", err=True)
    if calibration_out:
        _write_text(
            calibration_out,
            evaluation.calibration_rows_to_csv(
                report.dataset_id,
                report.scores[("compound", "image")],
                report.accuracy,
            ),
        )
    click.echo(evaluation.report_to_text(report), nl=False)


# ------------------------------------------------------------- fit-calibration


@main.command("fit-calibration")
@click.option(
    "--scores",
    "score_paths",
    multiple=True,
    required=True,
    type=click.Path(),
    help="calibration CSV (one per dataset); repeatable",
)
@click.option("--out", "out_path", required=True, type=click.Path(), help="model JSON")
@click.option("--loo", is_flag=True, help="report leave-one-dataset-out errors first")
@mapped_errors
def fit_calibration(score_paths, out_path, loo):
    """Fit the score -> accuracy calibration model from evaluation CSVs."""
    texts = [_read_text(p) for p in score_paths]
    groups = []
    for path, text in zip(score_paths, texts):
        rows = evaluation.calibration_rows_from_csv(text)
        ids = sorted({r["dataset_id"] for r in rows})
        if len(ids) != 1:
            raise ValidationError(
                f"{path}: one file must hold one dataset, found ids {ids}"
            )
        groups.append(
            calibration.CalibrationGroup(
                dataset_id=ids[0],
                scores=np.array([r["compound_score"] for r in rows]),
                accuracies=np.array([r["accuracy"] for r in rows]),
            )
        )
    if loo:
        if len(groups) < 3:
            raise ValidationError(
                f"--loo needs at least 3 score files, got {len(groups)}"
            )
        for fold in calibration.loo_cv(groups):
            click.echo(
                f"fold {fold.dataset_id}: held-out MAE {fold.held_out_mae:.4f} "
                f"over {fold.n_points} classes"
            )
    all_scores = np.concatenate([g.scores for g in groups])
    all_accuracies = np.concatenate([g.accuracies for g in groups])
    model_id = "cal-" + hashlib.sha256("\0".join(texts).encode("utf-8")).hexdigest()[:12]
    model = calibration.fit(all_scores, all_accuracies, model_id=model_id)
    calibration.save_model(model, out_path)
    click.echo(
        f"fitted {model.model_id} on {all_scores.size} points from "
        f"{len(groups)} datasets ({model.fit_meta.iterations} iterations, "
        f"termination: {model.fit_meta.termination}) -> {out_path}"
    )


# ---------------------------------------------------------------------- predict


@main.command()
@click.option("--query", required=True, help="the label to predict accuracy for")
@click.option(
    "--alternatives",
    default=None,
    help="comma-separated contrast labels; generated when omitted",
)
@click.option("--domain", default=None, help="domain hint for generation")
@click.option("--n-images", default=None, type=int, help="generated images per class")
@click.option(
    "--calibration",
    "calibration_path",
    default=None,
    type=click.Path(),
    envvar="WIZS_CALIBRATION",
    help="calibration model JSON (default: packaged synthetic model)",
)
@click.option(
    "--providers",
    "providers_path",
    default=None,
    type=click.Path(),
    envvar="WIZS_PROVIDERS",
    help="provider config JSON (default: offline stub providers)",
)
@click.option("--out", "out_path", default=None, type=click.Path(), help="write full result JSON")
@mapped_errors
def predict(query, alternatives, domain, n_images, calibration_path, providers_path, out_path):
    """Predict zero-shot accuracy for one query label."""
    model = _calibration_from(calibration_path)
    providers = _providers_from(providers_path)
    alternative_list = None
    if alternatives is not None:
        alternative_list = [a.strip() for a in alternatives.split(",") if a.strip()]
    request = PredictionRequest(
        query=query,
        alternatives=alternative_list,
        domain=domain,
        n_images=n_images if n_images is not None else providers.images_per_class,
    )
    result = run_prediction(request, providers, model)

    click.echo(f"query: {result.query}")
    click.echo(
        f"alternatives ({len(result.alternatives)}): "
        + ", ".join(result.alternatives)
    )
    click.echo(
        f"predicted accuracy: {result.predicted_accuracy:.6f} "
        f"(compound {result.compound_score:+.6f}, "
        f"calibration {result.calibration_model_id})"
    )
    click.echo("")
    width = max(len(s.class_id) for s in result.per_class)
    width = max(width, len("class"))
    click.echo(f"{'class'.ljust(width)}  consistency  silhouette    compound")
    for s in result.per_class:
        click.echo(
            f"{s.class_id.ljust(width)}  {s.consistency:+.6f}    {s.silhouette:+.6f}   {s.compound:+.6f}"
        )
    click.echo("")
    click.echo("images:")
    for name, refs in result.image_refs.items():
        click.echo(f"  {name}: {' '.join(refs)}")
    for note in result.notes:
        click.echo(f"note: {note}", err=True)
    if out_path:
        _write_text(
            out_path, json.dumps(result_to_dict(result), indent=2, sort_keys=True) + "\n"
        )
        click.echo(f"result JSON -> {out_path}")


# ----------------------------------------------------------------------- ingest


@main.command()
@click.option("--classes", "class_list", required=True, help="comma-separated class names")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="bundle directory")
@click.option("--domain", default="", help="domain description used in caption prompts")
@click.option("--n-images", default=None, type=int, help="generated images per class")
@click.option("--prompt-template", default=DEFAULT_PROMPT_TEMPLATE, show_default=True)
@click.option("--providers", "providers_path", default=None, type=click.Path(), envvar="WIZS_PROVIDERS")
@click.option("--dataset-id", default="generated", show_default=True)
@click.option("--model-id", default=None, help="default: the embedding provider id")
@click.option(
    "--real-images",
    "real_blobs",
    multiple=True,
    help="CLASS=BLOB_PATH pairs adding labeled real-image embedding blobs",
)
@mapped_errors
def ingest(
    class_list,
    out_dir,
    domain,
    n_images,
    prompt_template,
    providers_path,
    dataset_id,
    model_id,
    real_blobs,
):
    """Generate captions, images, and embeddings; write a scoring bundle."""
    names = [c.strip() for c in class_list.split(",") if c.strip()]
    if len(names) < 2:
        raise ValidationError("--classes needs at least 2 comma-separated names")
    if len({n.casefold() for n in names}) != len(names):
        raise ValidationError("--classes contains duplicate names")
    providers = _providers_from(providers_path)
    count = n_images if n_images is not None else providers.images_per_class

    real_by_class: dict[str, np.ndarray] = {}
    for pair in real_blobs:
        cls, sep, blob_path = pair.partition("=")
        if not sep or not cls or not blob_path:
            raise ValidationError(f"--real-images expects CLASS=BLOB_PATH, got {pair!r}")
        if cls not in names:
            raise ValidationError(f"--real-images class {cls!r} is not in --classes")
        real_by_class[cls] = blobfile.read_blob(blob_path)

    class_data = []
    for name in names:
        captions = providers.generate_captions(name, domain, count, prompt_template)
        refs = [ref for cap in captions for ref in providers.generate_images(cap, 1)]
        images = [providers.image_store.get(r) for r in refs]
        class_data.append(
            manifest.ClassData(
                class_id=name,
                class_name=name,
                plain_text=providers.fetch_text_embeddings(
                    [prompt_template.format(class_name=name)]
                )[0],
                images=providers.fetch_image_embeddings(images),
                captions=providers.fetch_text_embeddings(captions),
                real_images=real_by_class.get(name),
                caption_list=captions,
                image_refs=refs,
            )
        )
    path = manifest.save_bundle(
        out_dir,
        dataset_id=dataset_id,
        model_id=model_id or providers.embeddings.provider_id,
        domain=domain,
        prompt_template=prompt_template,
        classes=class_data,
    )
    click.echo(f"wrote bundle of {len(names)} classes -> {path}")


# ----------------------------------------------------------------------- report


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(), help="report CSV")
@mapped_errors
def report(in_path):
    """Render a correlation-report CSV as an aligned text table."""
    rows = evaluation.report_rows_from_csv(_read_text(in_path))
    click.echo(evaluation.render_report_table(rows), nl=False)


# ------------------------------------------------------------------------ serve


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--providers", "providers_path", default=None, type=click.Path(), envvar="WIZS_PROVIDERS")
@click.option("--calibration", "calibration_path", default=None, type=click.Path(), envvar="WIZS_CALIBRATION")
@click.option("--queue-cap", default=8, show_default=True, type=int)
@click.option("--static-dir", default=None, type=click.Path(), help="web UI directory")
@mapped_errors
def serve(host, port, providers_path, calibration_path, queue_cap, static_dir):
    """Run the prediction HTTP service (and web UI)."""
    from .service import create_app, serve as run_server

    app = create_app(
        _providers_from(providers_path),
        _calibration_from(calibration_path),
        queue_cap=queue_cap,
        static_dir=static_dir,
    )
    click.echo(f"serving on http://{host}:{port}")
    run_server(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
