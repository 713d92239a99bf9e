import numpy as np
import pytest

import oracles
from conftest import random_bundle, random_unit, random_unit_rows
from wizs.errors import (
    DegenerateRanksError,
    EmptyClassError,
    LengthMismatchError,
    ValidationError,
)
from wizs.evaluation import (
    REPORT_COLUMNS,
    average_ranks,
    calibration_rows_to_csv,
    classify,
    correlation_report,
    generated_zero_shot_baseline,
    per_class_accuracy,
    render_report_table,
    report_rows_from_csv,
    report_to_csv,
    report_to_text,
    spearman,
)
from wizs.scoring import ClassEmbeddings


def labeled_pair():
    c1 = ClassEmbeddings(
        "a", [1.0, 0.0], image_set=[[1.0, 0.0]], labeled_real_images=[[1.0, 0.0]]
    )
    c2 = ClassEmbeddings(
        "b", [0.0, 1.0], image_set=[[0.0, 1.0]], labeled_real_images=[[0.0, 1.0]]
    )
    return c1, c2


class TestClassify:
    def test_exact_match(self):
        c1, c2 = labeled_pair()
        assert classify([1.0, 0.0], [c1, c2]) == "a"
        assert classify([0.0, 1.0], [c1, c2]) == "b"

    def test_tie_goes_to_smallest_id(self):
        c1, c2 = labeled_pair()
        r = np.sqrt(0.5)
        assert classify([r, r], [c2, c1]) == "a"

    def test_scale_invariant(self, rng):
        classes = random_bundle(rng, 4, 8, 1)
        for _ in range(25):
            img = rng.standard_normal(8)
            assert classify(img, classes) == classify(img * 173.5, classes)

    def test_matches_oracle(self, rng):
        classes = random_bundle(rng, 5, 8, 1)
        ids = [c.class_id for c in classes]
        texts = [list(c.plain_text) for c in classes]
        for _ in range(50):
            img = list(rng.standard_normal(8))
            assert classify(img, classes) == oracles.classify(img, ids, texts)

    def test_needs_two_classes(self):
        c1, _ = labeled_pair()
        with pytest.raises(ValidationError):
            classify([1.0, 0.0], [c1])


class TestAccuracy:
    def test_perfectly_separable(self):
        c1, c2 = labeled_pair()
        assert per_class_accuracy([c1, c2]) == {"a": 1.0, "b": 1.0}

    def test_all_misassigned(self):
        c1 = ClassEmbeddings("a", [1.0, 0.0], labeled_real_images=[[0.0, 1.0]])
        c2 = ClassEmbeddings("b", [0.0, 1.0], labeled_real_images=[[1.0, 0.0]])
        assert per_class_accuracy([c1, c2]) == {"a": 0.0, "b": 0.0}

    def test_matches_oracle(self, rng):
        classes = random_bundle(rng, 4, 6, 1, n_real=8)
        ids = [c.class_id for c in classes]
        texts = [list(c.plain_text) for c in classes]
        labeled = [[list(r) for r in c.labeled_real_images] for c in classes]
        assert per_class_accuracy(classes) == oracles.accuracy(ids, texts, labeled)

    def test_missing_labels_rejected(self, rng):
        classes = random_bundle(rng, 3, 4, 2)
        with pytest.raises(EmptyClassError):
            per_class_accuracy(classes)

    def test_baseline_uses_generated_images(self, rng):
        classes = random_bundle(rng, 3, 6, 5)
        ids = [c.class_id for c in classes]
        texts = [list(c.plain_text) for c in classes]
        gen = [[list(r) for r in c.image_set] for c in classes]
        assert generated_zero_shot_baseline(classes) == oracles.accuracy(ids, texts, gen)

    def test_values_are_fractions(self, rng):
        classes = random_bundle(rng, 4, 5, 3, n_real=7)
        for v in per_class_accuracy(classes).values():
            assert 0.0 <= v <= 1.0


class TestRanks:
    def test_no_ties(self):
        np.testing.assert_array_equal(average_ranks([30.0, 10.0, 20.0]), [3.0, 1.0, 2.0])

    def test_ties_average(self):
        np.testing.assert_array_equal(
            average_ranks([1.0, 2.0, 2.0, 4.0]), [1.0, 2.5, 2.5, 4.0]
        )

    def test_matches_oracle(self, rng):
        for _ in range(100):
            x = rng.integers(0, 6, size=12).astype(float)
            np.testing.assert_array_equal(average_ranks(x), oracles.average_ranks(list(x)))


class TestSpearman:
    def test_monotone_is_exactly_one(self, rng):
        for _ in range(20):
            x = np.sort(rng.standard_normal(9))
            assert spearman(x, np.exp(x)) == 1.0

    def test_reversed_is_exactly_minus_one(self, rng):
        for _ in range(20):
            x = np.sort(rng.standard_normal(9))
            assert spearman(x, -x) == -1.0

    def test_tied_fixture(self):
        got = spearman([1.0, 2.0, 2.0, 4.0], [1.0, 3.0, 2.0, 4.0])
        want = oracles.spearman([1.0, 2.0, 2.0, 4.0], [1.0, 3.0, 2.0, 4.0])
        assert got == pytest.approx(want, abs=1e-12)

    def test_matches_oracle_with_ties(self, rng):
        for _ in range(300):
            n = int(rng.integers(3, 12))
            x = rng.integers(0, 5, size=n).astype(float)
            y = rng.integers(0, 5, size=n).astype(float)
            if x.min() == x.max() or y.min() == y.max():
                continue
            assert abs(spearman(x, y) - oracles.spearman(list(x), list(y))) <= 1e-12

    def test_constant_rejected(self):
        with pytest.raises(DegenerateRanksError):
            spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(DegenerateRanksError):
            spearman([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            spearman([1.0, 2.0, 3.0], [1.0, 2.0])

    def test_too_short(self):
        with pytest.raises(ValidationError):
            spearman([1.0, 2.0], [2.0, 1.0])

    def test_symmetry(self, rng):
        x = rng.standard_normal(15)
        y = rng.standard_normal(15)
        assert spearman(x, y) == spearman(y, x)

    def test_monotone_transform_invariance(self, rng):
        x = rng.standard_normal(15)
        y = rng.standard_normal(15)
        assert spearman(x, y) == pytest.approx(
            spearman(np.tanh(x), y * 3.0 + 1.0), abs=1e-12
        )

    def test_bounded(self, rng):
        for _ in range(100):
            x = rng.integers(0, 4, size=8).astype(float)
            y = rng.integers(0, 4, size=8).astype(float)
            if x.min() == x.max() or y.min() == y.max():
                continue
            assert -1.0 <= spearman(x, y) <= 1.0


def monotone_family(rng, n_classes=5, dim=10, n_images=6, n_real=40):
    """Classes whose image noise grows with index, so every score and the
    measured accuracy share one ordering."""
    classes = []
    centers = random_unit_rows(rng, n_classes, dim)
    # spread centers apart for clean separation
    centers, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    for i in range(n_classes):
        center = centers[i]
        sigma = 0.1 + 0.35 * i
        imgs = center + rng.standard_normal((n_images, dim)) * sigma
        imgs /= np.linalg.norm(imgs, axis=1, keepdims=True)
        real = center + rng.standard_normal((n_real, dim)) * sigma
        real /= np.linalg.norm(real, axis=1, keepdims=True)
        classes.append(
            ClassEmbeddings(
                f"c{i}",
                center,
                image_set=imgs,
                descriptive_text_set=imgs.copy(),
                labeled_real_images=real,
            )
        )
    return classes


class TestCorrelationReport:
    def test_row_inventory(self, rng):
        classes = monotone_family(rng)
        rep = correlation_report(classes, dataset_id="synth", model_id="stub")
        kinds = {(r.score_kind, r.variant) for r in rep.rows}
        assert kinds == {
            ("consistency", "image"),
            ("silhouette", "image"),
            ("compound", "image"),
            ("consistency", "text"),
            ("silhouette", "text"),
            ("compound", "text"),
            ("generated_zero_shot", "image"),
        }
        for r in rep.rows:
            assert r.n_classes == 5

    def test_constant_accuracy_yields_note_not_failure(self, rng):
        classes = random_bundle(rng, 3, 8, 3)
        for c in classes:
            c.labeled_real_images = np.vstack([c.plain_text])  # all accuracy 1.0
        rep = correlation_report(classes, variants=("image",))
        assert all(r.spearman_rho is None for r in rep.rows)
        assert all(r.note for r in rep.rows)

    def test_matches_oracle_pipeline(self, rng):
        classes = monotone_family(rng, n_classes=6)
        rep = correlation_report(classes, dataset_id="d", model_id="m")
        ids = sorted(c.class_id for c in classes)
        by_id = {c.class_id: c for c in classes}
        texts = [list(by_id[i].plain_text) for i in ids]
        sets = [[list(r) for r in by_id[i].image_set] for i in ids]
        labeled = [[list(r) for r in by_id[i].labeled_real_images] for i in ids]
        acc = oracles.accuracy(ids, texts, labeled)
        want = oracles.spearman(
            [oracles.compound(k, texts, sets, 2.5, 4.0) for k in range(len(ids))],
            [acc[i] for i in ids],
        )
        got = next(
            r for r in rep.rows if r.score_kind == "compound" and r.variant == "image"
        )
        assert got.spearman_rho == pytest.approx(want, abs=1e-12)

    def test_too_few_classes(self, rng):
        classes = random_bundle(rng, 2, 4, 2, n_real=2)
        with pytest.raises(ValidationError):
            correlation_report(classes, variants=("image",))

    def test_deterministic(self, rng):
        classes = monotone_family(rng)
        a = report_to_csv(correlation_report(classes, dataset_id="x", model_id="y"))
        b = report_to_csv(correlation_report(classes, dataset_id="x", model_id="y"))
        assert a == b


class TestExport:
    def test_csv_header_and_roundtrip(self, rng):
        classes = monotone_family(rng, n_classes=4)
        rep = correlation_report(classes, dataset_id="ds", model_id="mod")
        csv_text = report_to_csv(rep)
        assert csv_text.splitlines()[0] == ",".join(REPORT_COLUMNS)
        rows = report_rows_from_csv(csv_text)
        assert len(rows) == len(rep.rows)
        assert rows[0]["dataset"] == "ds"
        assert rows[0]["model"] == "mod"

    def test_text_table_aligned(self, rng):
        classes = monotone_family(rng, n_classes=4)
        rep = correlation_report(classes)
        text = report_to_text(rep)
        lines = text.splitlines()
        assert lines[0].startswith("dataset")
        assert set(lines[1]) <= {"-", " "}
        assert len(lines) == len(rep.rows) + 2

    def test_bad_csv_rejected(self):
        with pytest.raises(ValidationError):
            report_rows_from_csv("nope\n1,2\n")

    def test_calibration_csv(self):
        text = calibration_rows_to_csv(
            "ds", {"b": 1.5, "a": 2.0}, {"b": 0.5, "a": 0.75}
        )
        lines = text.splitlines()
        assert lines[0] == "dataset_id,class_id,compound_score,accuracy"
        assert lines[1].startswith("ds,a,2.0,")
        assert lines[2].startswith("ds,b,1.5,")

    def test_calibration_csv_set_mismatch(self):
        with pytest.raises(ValidationError):
            calibration_rows_to_csv("ds", {"a": 1.0}, {"b": 1.0})
