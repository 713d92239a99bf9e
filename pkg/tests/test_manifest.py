"""Bundle manifests: validation, round-trips, blob cross-checks."""
import json

import numpy as np
import pytest

from wizs import blobfile
from wizs.errors import (
    DimensionMismatchError,
    ManifestError,
    MissingBlobError,
    ZeroVectorError,
)
from wizs.manifest import (
    ClassData,
    load_bundle,
    load_manifest,
    manifest_from_dict,
    manifest_to_dict,
    save_bundle,
    save_manifest,
)


def _doc(**overrides):
    doc = {
        "format": "wizs-bundle",
        "version": 1,
        "dataset_id": "demo",
        "model_id": "clip-test",
        "domain": "insects",
        "prompt_template": "a photo of a {class_name}",
        "embedding_dim": 4,
        "classes": [
            {
                "class_id": "ant",
                "class_name": "ant",
                "caption_list": [],
                "image_refs": [],
                "embedding_refs": {"plain_text": "blobs/ant.plain_text.wizs"},
            }
        ],
    }
    doc.update(overrides)
    return doc


def _write_bundle(tmp_path, rng, n_classes=3, dim=4, n_images=2, n_captions=2):
    classes = []
    for i in range(n_classes):
        t = rng.standard_normal(dim)
        classes.append(
            ClassData(
                class_id=f"c{i}",
                class_name=f"class {i}",
                plain_text=t / np.linalg.norm(t),
                images=rng.standard_normal((n_images, dim)),
                captions=rng.standard_normal((n_captions, dim)),
                caption_list=[f"a photo of a class {i}, view {j}" for j in range(n_captions)],
                image_refs=[f"img-{i}-{j}" for j in range(n_images)],
            )
        )
    return save_bundle(
        tmp_path / "bundle",
        dataset_id="demo",
        model_id="clip-test",
        domain="things",
        prompt_template="a photo of a {class_name}",
        classes=classes,
    )


class TestManifestDocument:
    def test_round_trip(self):
        m = manifest_from_dict(_doc())
        assert manifest_from_dict(manifest_to_dict(m)) == m

    def test_wrong_format(self):
        with pytest.raises(ManifestError, match="field 'format'"):
            manifest_from_dict(_doc(format="something-else"))

    def test_wrong_version(self):
        with pytest.raises(ManifestError, match="field 'version'"):
            manifest_from_dict(_doc(version=2))

    def test_empty_dataset_id(self):
        with pytest.raises(ManifestError, match="field 'dataset_id'"):
            manifest_from_dict(_doc(dataset_id=""))

    def test_bad_embedding_dim(self):
        with pytest.raises(ManifestError, match="field 'embedding_dim'"):
            manifest_from_dict(_doc(embedding_dim=1))
        with pytest.raises(ManifestError, match="field 'embedding_dim'"):
            manifest_from_dict(_doc(embedding_dim="4"))
        with pytest.raises(ManifestError, match="field 'embedding_dim'"):
            manifest_from_dict(_doc(embedding_dim=True))

    def test_empty_classes(self):
        with pytest.raises(ManifestError, match="field 'classes'"):
            manifest_from_dict(_doc(classes=[]))

    def test_duplicate_class_id_names_class(self):
        doc = _doc()
        doc["classes"].append(dict(doc["classes"][0]))
        with pytest.raises(ManifestError, match="class 'ant' field 'class_id'"):
            manifest_from_dict(doc)

    def test_missing_plain_text_ref_names_class_and_field(self):
        doc = _doc()
        doc["classes"][0]["embedding_refs"] = {"images": "blobs/x.wizs"}
        with pytest.raises(
            ManifestError, match="class 'ant' field 'embedding_refs.plain_text'"
        ):
            manifest_from_dict(doc)

    def test_unknown_kind_rejected(self):
        doc = _doc()
        doc["classes"][0]["embedding_refs"]["mystery"] = "blobs/m.wizs"
        with pytest.raises(ManifestError, match="unknown kinds"):
            manifest_from_dict(doc)

    def test_absolute_ref_rejected(self):
        doc = _doc()
        doc["classes"][0]["embedding_refs"]["plain_text"] = "/etc/passwd"
        with pytest.raises(ManifestError, match="relative path"):
            manifest_from_dict(doc)

    def test_parent_escape_rejected(self):
        doc = _doc()
        doc["classes"][0]["embedding_refs"]["plain_text"] = "../../other.wizs"
        with pytest.raises(ManifestError, match="relative path"):
            manifest_from_dict(doc)

    def test_caption_list_type_checked(self):
        doc = _doc()
        doc["classes"][0]["caption_list"] = ["ok", 3]
        with pytest.raises(ManifestError, match="class 'ant' field 'caption_list'"):
            manifest_from_dict(doc)

    def test_save_load_file_round_trip(self, tmp_path):
        m = manifest_from_dict(_doc())
        save_manifest(m, tmp_path / "manifest.json")
        assert load_manifest(tmp_path / "manifest.json") == m

    def test_save_is_deterministic(self, tmp_path):
        m = manifest_from_dict(_doc())
        save_manifest(m, tmp_path / "a.json")
        save_manifest(m, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ManifestError, match="not found"):
            load_manifest(tmp_path / "nope.json")

    def test_load_invalid_json(self, tmp_path):
        (tmp_path / "bad.json").write_text("{not json")
        with pytest.raises(ManifestError, match="not valid JSON"):
            load_manifest(tmp_path / "bad.json")


class TestBundleIO:
    def test_save_load_round_trip(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng)
        bundle = load_bundle(path)
        assert [c.class_id for c in bundle.classes] == ["c0", "c1", "c2"]
        for cls in bundle.classes:
            assert cls.plain_text.shape == (4,)
            assert np.isclose(np.linalg.norm(cls.plain_text), 1.0)
            assert cls.image_set.shape == (2, 4)
            assert np.allclose(np.linalg.norm(cls.image_set, axis=1), 1.0)
            assert cls.descriptive_text_set.shape == (2, 4)

    def test_loaded_vectors_match_saved_direction(self, tmp_path, rng):
        v = rng.standard_normal(4)
        save_bundle(
            tmp_path / "b",
            dataset_id="d",
            model_id="m",
            domain="",
            prompt_template="a photo of a {class_name}",
            classes=[
                ClassData("a", "a", plain_text=v, images=np.atleast_2d(2.5 * v)),
                ClassData("b", "b", plain_text=rng.standard_normal(4)),
            ],
        )
        bundle = load_bundle(tmp_path / "b" / "manifest.json")
        unit = v / np.linalg.norm(v)
        # float32 storage then unit normalization: close, not exact
        assert np.allclose(bundle.classes[0].plain_text, unit, atol=1e-6)
        assert np.allclose(bundle.classes[0].image_set[0], unit, atol=1e-6)

    def test_missing_blob(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng)
        doc = json.loads(path.read_text())
        doc["classes"][0]["embedding_refs"]["plain_text"] = "blobs/ghost.wizs"
        path.write_text(json.dumps(doc))
        with pytest.raises(MissingBlobError):
            load_bundle(path)

    def test_dim_mismatch_names_class_and_kind(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng, dim=4)
        doc = json.loads(path.read_text())
        ref = doc["classes"][1]["embedding_refs"]["images"]
        blobfile.write_blob(path.parent / ref, rng.standard_normal((2, 7)))
        with pytest.raises(DimensionMismatchError, match="class 'c1' images.*7-dim"):
            load_bundle(path)

    def test_plain_text_must_be_single_row(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng)
        doc = json.loads(path.read_text())
        ref = doc["classes"][0]["embedding_refs"]["plain_text"]
        blobfile.write_blob(path.parent / ref, rng.standard_normal((3, 4)))
        with pytest.raises(ManifestError, match="exactly 1 row"):
            load_bundle(path)

    def test_caption_count_cross_checked(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng, n_captions=2)
        doc = json.loads(path.read_text())
        doc["classes"][0]["caption_list"] = ["only one"]
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError, match="class 'c0' field 'caption_list'"):
            load_bundle(path)

    def test_image_ref_count_cross_checked(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng, n_images=2)
        doc = json.loads(path.read_text())
        doc["classes"][2]["image_refs"] = ["a", "b", "c"]
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError, match="class 'c2' field 'image_refs'"):
            load_bundle(path)

    def test_zero_vector_on_load(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng)
        doc = json.loads(path.read_text())
        ref = doc["classes"][0]["embedding_refs"]["images"]
        arr = rng.standard_normal((2, 4))
        arr[1] = 0.0
        blobfile.write_blob(path.parent / ref, arr)
        with pytest.raises(ZeroVectorError, match="class 'c0' images row 1"):
            load_bundle(path)

    def test_corrupt_blob_surfaces_offset(self, tmp_path, rng):
        path = _write_bundle(tmp_path, rng)
        doc = json.loads(path.read_text())
        ref = doc["classes"][0]["embedding_refs"]["plain_text"]
        blob_path = path.parent / ref
        blob_path.write_bytes(blob_path.read_bytes()[:10])
        with pytest.raises(blobfile.CorruptBlobError, match="truncated header"):
            load_bundle(path)

    def test_save_bundle_rejects_empty(self, tmp_path):
        with pytest.raises(ManifestError, match="classes"):
            save_bundle(
                tmp_path / "b",
                dataset_id="d",
                model_id="m",
                domain="",
                prompt_template="t",
                classes=[],
            )

    def test_save_bundle_idempotent_bytes(self, tmp_path, rng):
        seed = int(rng.integers(0, 2**32))
        p1 = _write_bundle(tmp_path / "one", np.random.default_rng(seed))
        p2 = _write_bundle(tmp_path / "two", np.random.default_rng(seed))
        assert p1.read_bytes() == p2.read_bytes()
        for rel in json.loads(p1.read_text())["classes"][0]["embedding_refs"].values():
            assert (p1.parent / rel).read_bytes() == (p2.parent / rel).read_bytes()

    def test_slug_sanitizes_ids(self, tmp_path, rng):
        save_bundle(
            tmp_path / "b",
            dataset_id="d",
            model_id="m",
            domain="",
            prompt_template="a photo of a {class_name}",
            classes=[
                ClassData("weird id/with:chars", "x", plain_text=rng.standard_normal(4)),
                ClassData("ok", "y", plain_text=rng.standard_normal(4)),
            ],
        )
        bundle = load_bundle(tmp_path / "b" / "manifest.json")
        assert bundle.classes[0].class_id == "weird id/with:chars"
        refs = bundle.manifest.classes[0].embedding_refs
        assert "/" not in refs["plain_text"].removeprefix("blobs/")
