"""Bundle manifests: versioned JSON tying a class list to embedding blobs.

A bundle directory holds manifest.json plus a blobs/ subdirectory with one
EmbeddingBlob per (class, kind). Kinds: plain_text (the embedded prompt,
exactly one row), images (generated images), captions (descriptive texts),
real_images (labeled ground-truth images). Blob refs in the manifest are
paths relative to the manifest file. All embeddings are 32-bit on disk and are
normalized to unit 64-bit vectors on load.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import blobfile
from .errors import DimensionMismatchError, ManifestError, ZeroVectorError
from .scoring import ClassEmbeddings
from .vectors import NORM_EPS

MANIFEST_FORMAT = "wizs-bundle"
MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"

EMBEDDING_KINDS = ("plain_text", "images", "captions", "real_images")
_KIND_TO_ATTR = {
    "images": "image_set",
    "captions": "descriptive_text_set",
    "real_images": "labeled_real_images",
}


@dataclass
class ManifestClass:
    class_id: str
    class_name: str
    caption_list: list[str] = field(default_factory=list)
    image_refs: list[str] = field(default_factory=list)
    embedding_refs: dict[str, str] = field(default_factory=dict)


@dataclass
class BundleManifest:
    dataset_id: str
    model_id: str
    domain: str
    prompt_template: str
    embedding_dim: int
    classes: list[ManifestClass]


@dataclass
class Bundle:
    manifest: BundleManifest
    classes: list[ClassEmbeddings]


def _fail(class_id: str | None, fld: str, msg: str):
    where = f"class '{class_id}' field '{fld}'" if class_id else f"field '{fld}'"
    raise ManifestError(f"manifest invalid at {where}: {msg}")


def manifest_from_dict(doc) -> BundleManifest:
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a JSON object")
    if doc.get("format") != MANIFEST_FORMAT:
        _fail(None, "format", f"expected {MANIFEST_FORMAT!r}, got {doc.get('format')!r}")
    if doc.get("version") != MANIFEST_VERSION:
        _fail(None, "version", f"unsupported version {doc.get('version')!r}")
    for fld in ("dataset_id", "model_id", "prompt_template"):
        if not isinstance(doc.get(fld), str) or not doc[fld]:
            _fail(None, fld, "must be a non-empty string")
    if not isinstance(doc.get("domain", ""), str):
        _fail(None, "domain", "must be a string")
    dim = doc.get("embedding_dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        _fail(None, "embedding_dim", f"must be an integer >= 2, got {dim!r}")
    raw_classes = doc.get("classes")
    if not isinstance(raw_classes, list) or not raw_classes:
        _fail(None, "classes", "must be a non-empty list")

    classes: list[ManifestClass] = []
    seen: set[str] = set()
    for idx, entry in enumerate(raw_classes):
        if not isinstance(entry, dict):
            _fail(None, f"classes[{idx}]", "must be an object")
        cid = entry.get("class_id")
        if not isinstance(cid, str) or not cid:
            _fail(None, f"classes[{idx}].class_id", "must be a non-empty string")
        if cid in seen:
            _fail(cid, "class_id", "duplicated in manifest")
        seen.add(cid)
        name = entry.get("class_name")
        if not isinstance(name, str) or not name:
            _fail(cid, "class_name", "must be a non-empty string")
        captions = entry.get("caption_list", [])
        if not isinstance(captions, list) or any(not isinstance(c, str) for c in captions):
            _fail(cid, "caption_list", "must be a list of strings")
        image_refs = entry.get("image_refs", [])
        if not isinstance(image_refs, list) or any(
            not isinstance(r, str) for r in image_refs
        ):
            _fail(cid, "image_refs", "must be a list of strings")
        refs = entry.get("embedding_refs")
        if not isinstance(refs, dict):
            _fail(cid, "embedding_refs", "must be an object")
        unknown = sorted(set(refs) - set(EMBEDDING_KINDS))
        if unknown:
            _fail(cid, "embedding_refs", f"unknown kinds {unknown}")
        if "plain_text" not in refs:
            _fail(cid, "embedding_refs.plain_text", "required")
        for kind, ref in refs.items():
            if not isinstance(ref, str) or not ref:
                _fail(cid, f"embedding_refs.{kind}", "must be a non-empty string")
            p = Path(ref)
            if p.is_absolute() or ".." in p.parts:
                _fail(cid, f"embedding_refs.{kind}", "must be a relative path without '..'")
        classes.append(
            ManifestClass(
                class_id=cid,
                class_name=name,
                caption_list=list(captions),
                image_refs=list(image_refs),
                embedding_refs=dict(refs),
            )
        )
    return BundleManifest(
        dataset_id=doc["dataset_id"],
        model_id=doc["model_id"],
        domain=doc.get("domain", ""),
        prompt_template=doc["prompt_template"],
        embedding_dim=dim,
        classes=classes,
    )


def manifest_to_dict(manifest: BundleManifest) -> dict:
    return {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "dataset_id": manifest.dataset_id,
        "model_id": manifest.model_id,
        "domain": manifest.domain,
        "prompt_template": manifest.prompt_template,
        "embedding_dim": manifest.embedding_dim,
        "classes": [
            {
                "class_id": c.class_id,
                "class_name": c.class_name,
                "caption_list": list(c.caption_list),
                "image_refs": list(c.image_refs),
                "embedding_refs": dict(sorted(c.embedding_refs.items())),
            }
            for c in manifest.classes
        ],
    }


def load_manifest(path) -> BundleManifest:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    return manifest_from_dict(doc)


def save_manifest(manifest: BundleManifest, path) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest_to_dict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _normalized_rows(raw: np.ndarray, class_id: str, kind: str) -> np.ndarray:
    rows = np.asarray(raw, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1)
    bad = np.nonzero(norms <= NORM_EPS)[0]
    if bad.size:
        raise ZeroVectorError(
            f"class '{class_id}' {kind} row {int(bad[0])} has zero norm; "
            "cannot normalize on load"
        )
    return rows / norms[:, None]


def load_bundle(manifest_path) -> Bundle:
    """Load manifest + blobs into scoring-ready ClassEmbeddings.

    Every blob header must agree with the manifest dimension; caption blobs
    must have one row per caption string; plain_text blobs exactly one row.
    Rows are unit-normalized float64 after loading.
    """
    manifest_path = Path(manifest_path)
    manifest = load_manifest(manifest_path)
    base = manifest_path.parent
    classes: list[ClassEmbeddings] = []
    for mc in manifest.classes:
        arrays: dict[str, np.ndarray] = {}
        for kind, ref in mc.embedding_refs.items():
            raw = blobfile.read_blob(base / ref)
            if raw.shape[1] != manifest.embedding_dim:
                raise DimensionMismatchError(
                    f"class '{mc.class_id}' {kind} blob is {raw.shape[1]}-dim "
                    f"but manifest says {manifest.embedding_dim}"
                )
            arrays[kind] = raw
        plain = arrays["plain_text"]
        if plain.shape[0] != 1:
            raise ManifestError(
                f"manifest invalid at class '{mc.class_id}' field "
                f"'embedding_refs.plain_text': blob must contain exactly 1 row, "
                f"has {plain.shape[0]}"
            )
        if "captions" in arrays and arrays["captions"].shape[0] != len(mc.caption_list):
            raise ManifestError(
                f"manifest invalid at class '{mc.class_id}' field 'caption_list': "
                f"{len(mc.caption_list)} captions but captions blob has "
                f"{arrays['captions'].shape[0]} rows"
            )
        if mc.image_refs and "images" in arrays and arrays["images"].shape[0] != len(
            mc.image_refs
        ):
            raise ManifestError(
                f"manifest invalid at class '{mc.class_id}' field 'image_refs': "
                f"{len(mc.image_refs)} refs but images blob has "
                f"{arrays['images'].shape[0]} rows"
            )
        kwargs = {}
        for kind, attr in _KIND_TO_ATTR.items():
            if kind in arrays:
                kwargs[attr] = _normalized_rows(arrays[kind], mc.class_id, kind)
        classes.append(
            ClassEmbeddings(
                class_id=mc.class_id,
                plain_text=_normalized_rows(plain, mc.class_id, "plain_text")[0],
                **kwargs,
            )
        )
    return Bundle(manifest=manifest, classes=classes)


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", text).strip("-") or "class"


@dataclass
class ClassData:
    """Builder input for save_bundle: one class's names, texts, and raw arrays."""

    class_id: str
    class_name: str
    plain_text: np.ndarray
    images: np.ndarray | None = None
    captions: np.ndarray | None = None
    real_images: np.ndarray | None = None
    caption_list: list[str] = field(default_factory=list)
    image_refs: list[str] = field(default_factory=list)


def save_bundle(
    out_dir,
    *,
    dataset_id: str,
    model_id: str,
    domain: str,
    prompt_template: str,
    classes: list[ClassData],
) -> Path:
    """Write blobs plus manifest under out_dir; returns the manifest path."""
    out_dir = Path(out_dir)
    (out_dir / "blobs").mkdir(parents=True, exist_ok=True)
    if not classes:
        raise ManifestError("manifest invalid at field 'classes': must be a non-empty list")
    dim = int(np.atleast_2d(np.asarray(classes[0].plain_text)).shape[1])
    entries: list[ManifestClass] = []
    for idx, cd in enumerate(classes):
        refs: dict[str, str] = {}
        arrays = {
            "plain_text": np.atleast_2d(np.asarray(cd.plain_text, dtype=np.float64)),
            "images": cd.images,
            "captions": cd.captions,
            "real_images": cd.real_images,
        }
        for kind, arr in arrays.items():
            if arr is None:
                continue
            rows = np.atleast_2d(np.asarray(arr))
            if rows.shape[1] != dim:
                raise DimensionMismatchError(
                    f"class '{cd.class_id}' {kind} rows are {rows.shape[1]}-dim, "
                    f"bundle is {dim}-dim"
                )
            rel = f"blobs/{idx:03d}_{_slug(cd.class_id)}.{kind}.wizs"
            blobfile.write_blob(out_dir / rel, rows)
            refs[kind] = rel
        entries.append(
            ManifestClass(
                class_id=cd.class_id,
                class_name=cd.class_name,
                caption_list=list(cd.caption_list),
                image_refs=list(cd.image_refs),
                embedding_refs=refs,
            )
        )
    manifest = BundleManifest(
        dataset_id=dataset_id,
        model_id=model_id,
        domain=domain,
        prompt_template=prompt_template,
        embedding_dim=dim,
        classes=entries,
    )
    # validate what we are about to write by round-tripping the document
    manifest = manifest_from_dict(manifest_to_dict(manifest))
    path = out_dir / MANIFEST_NAME
    save_manifest(manifest, path)
    return path
