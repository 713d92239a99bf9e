import numpy as np
import pytest

import oracles
from conftest import random_bundle, random_unit_rows
from wizs.errors import (
    DegenerateDifferenceError,
    DimensionMismatchError,
    EmptyClassError,
    NoAlternativesError,
    NonFiniteError,
    ValidationError,
)
from wizs.scoring import (
    ClassEmbeddings,
    ScoringConfig,
    compound_score,
    consistency_score,
    score_bundle,
    silhouette_score,
    text_consistency_score,
    text_silhouette_score,
)

CFG = ScoringConfig()


def two_class_fixture(images1, images2):
    c1 = ClassEmbeddings("a", [1.0, 0.0], image_set=np.array(images1, float))
    c2 = ClassEmbeddings("b", [0.0, 1.0], image_set=np.array(images2, float))
    return c1, c2


def oracle_inputs(classes, variant="image"):
    texts = [list(c.plain_text) for c in classes]
    attr = "image_set" if variant == "image" else "descriptive_text_set"
    sets = [[list(r) for r in getattr(c, attr)] for c in classes]
    return texts, sets


class TestConsistency:
    def test_perfectly_aligned_fixture(self):
        c1, c2 = two_class_fixture([[1.0, 0.0]] * 3, [[0.0, 1.0]] * 3)
        assert consistency_score(c1, [c2]) == pytest.approx(1.0, abs=1e-12)

    def test_swapped_fixture_is_minus_one(self):
        # class-1 images sit exactly on class 2's text and vice versa
        c1, c2 = two_class_fixture([[0.0, 1.0]] * 3, [[1.0, 0.0]] * 3)
        assert consistency_score(c1, [c2]) == pytest.approx(-1.0, abs=1e-12)

    def test_matches_oracle_on_seeded_bundles(self, rng):
        for _ in range(30):
            classes = random_bundle(
                rng,
                n_classes=int(rng.integers(2, 5)),
                dim=8,
                n_images=3,
            )
            texts, sets = oracle_inputs(classes)
            for i, cls in enumerate(classes):
                others = [c for j, c in enumerate(classes) if j != i]
                got = consistency_score(cls, others)
                want = oracles.consistency(i, texts, sets)
                assert abs(got - want) <= 1e-9

    def test_no_alternatives(self):
        c1 = ClassEmbeddings("a", [1.0, 0.0], image_set=[[1.0, 0.0]])
        with pytest.raises(NoAlternativesError):
            consistency_score(c1, [])

    def test_identical_texts_name_both_classes(self):
        c1 = ClassEmbeddings("left", [1.0, 0.0], image_set=[[0.0, 1.0]])
        c2 = ClassEmbeddings("right", [1.0, 0.0], image_set=[[0.6, 0.8]])
        with pytest.raises(DegenerateDifferenceError) as exc:
            consistency_score(c1, [c2])
        assert "left" in str(exc.value) and "right" in str(exc.value)

    def test_sample_on_other_centroid_is_degenerate(self):
        c1 = ClassEmbeddings("a", [1.0, 0.0], image_set=[[0.0, 1.0]])
        c2 = ClassEmbeddings("b", [0.0, 1.0], image_set=[[0.0, 1.0]])
        with pytest.raises(DegenerateDifferenceError):
            consistency_score(c1, [c2])

    def test_bounded(self, rng):
        for _ in range(50):
            classes = random_bundle(rng, 3, 6, 4)
            s = consistency_score(classes[0], classes[1:])
            assert -1.0 <= s <= 1.0


class TestSilhouette:
    def test_orthogonal_fixture_is_one(self):
        c1, c2 = two_class_fixture([[1.0, 0.0]] * 2, [[0.0, 1.0]] * 2)
        assert silhouette_score(c1, [c2]) == pytest.approx(1.0, abs=1e-12)

    def test_equidistant_fixture_is_zero(self):
        # both classes' images at the 45-degree bisector: cohesion == separation
        r = np.sqrt(0.5)
        c1 = ClassEmbeddings("a", [1.0, 0.0], image_set=[[r, r]])
        c2 = ClassEmbeddings("b", [0.0, 1.0], image_set=[[r, r]])
        assert silhouette_score(c1, [c2]) == pytest.approx(0.0, abs=1e-12)

    def test_two_image_fixture_matches_oracle(self):
        c1, c2 = two_class_fixture([[1.0, 0.0], [0.6, 0.8]], [[0.0, 1.0]] * 2)
        got = silhouette_score(c1, [c2])
        want = oracles.silhouette(
            0, [list(c1.plain_text), list(c2.plain_text)],
            [[[1.0, 0.0], [0.6, 0.8]], [[0.0, 1.0], [0.0, 1.0]]], CFG.lam,
        )
        assert got == pytest.approx(want, abs=1e-12)

    def test_matches_oracle_on_seeded_bundles(self, rng):
        for _ in range(30):
            classes = random_bundle(rng, int(rng.integers(2, 5)), 8, 3)
            texts, sets = oracle_inputs(classes)
            for i, cls in enumerate(classes):
                others = [c for j, c in enumerate(classes) if j != i]
                got = silhouette_score(cls, others)
                want = oracles.silhouette(i, texts, sets, CFG.lam)
                assert abs(got - want) <= 1e-9

    def test_bounded(self, rng):
        for _ in range(100):
            classes = random_bundle(rng, int(rng.integers(2, 6)), 5, 3)
            s = silhouette_score(classes[0], classes[1:])
            assert -1.0 <= s <= 1.0

    def test_lambda_zero_drops_text_term(self, rng):
        # with lam=0 the score only sees centroids, so moving texts changes nothing
        classes = random_bundle(rng, 3, 6, 4)
        cfg = ScoringConfig(lam=0.0)
        s1 = silhouette_score(classes[0], classes[1:], cfg)
        moved = [
            ClassEmbeddings(c.class_id, np.roll(c.plain_text, 1), image_set=c.image_set)
            for c in classes
        ]
        s2 = silhouette_score(moved[0], moved[1:], cfg)
        assert s1 == pytest.approx(s2, abs=1e-12)


class TestCompound:
    def test_arithmetic(self):
        assert compound_score(0.5, 0.25) == pytest.approx(1.5, abs=1e-15)

    def test_alpha_override(self):
        assert compound_score(0.5, 0.25, ScoringConfig(alpha=2.0)) == pytest.approx(1.0)

    def test_nan_rejected(self):
        with pytest.raises(NonFiniteError):
            compound_score(float("nan"), 0.0)

    def test_linearity_invariant(self, rng):
        for _ in range(20):
            classes = random_bundle(rng, 3, 6, 3)
            rows = score_bundle(classes)
            for r in rows:
                assert abs(r.compound - (r.consistency + CFG.alpha * r.silhouette)) <= 1e-12


class TestTextVariant:
    def test_substitution_identity(self):
        # one caption per class equal to the plain text: every difference pair
        # coincides, so text consistency is exactly 1
        c1 = ClassEmbeddings("a", [1.0, 0.0], descriptive_text_set=[[1.0, 0.0]])
        c2 = ClassEmbeddings("b", [0.0, 1.0], descriptive_text_set=[[0.0, 1.0]])
        assert text_consistency_score(c1, [c2]) == pytest.approx(1.0, abs=1e-12)

    def test_equals_image_variant_on_same_sets(self, rng):
        classes = random_bundle(rng, 3, 8, 4)
        mirrored = [
            ClassEmbeddings(
                c.class_id,
                c.plain_text,
                image_set=c.image_set,
                descriptive_text_set=c.image_set.copy(),
            )
            for c in classes
        ]
        img = score_bundle(mirrored, variant="image")
        txt = score_bundle(mirrored, variant="text")
        for a, b in zip(img, txt):
            assert a.consistency == pytest.approx(b.consistency, abs=1e-12)
            assert a.silhouette == pytest.approx(b.silhouette, abs=1e-12)

    def test_matches_oracle(self, rng):
        for _ in range(20):
            classes = random_bundle(rng, 3, 6, 2, n_captions=4)
            texts, sets = oracle_inputs(classes, variant="text")
            for i, cls in enumerate(classes):
                others = [c for j, c in enumerate(classes) if j != i]
                assert abs(
                    text_consistency_score(cls, others) - oracles.consistency(i, texts, sets)
                ) <= 1e-9
                assert abs(
                    text_silhouette_score(cls, others)
                    - oracles.silhouette(i, texts, sets, CFG.lam)
                ) <= 1e-9

    def test_missing_captions_rejected(self, rng):
        classes = random_bundle(rng, 2, 4, 2)
        with pytest.raises(EmptyClassError):
            text_consistency_score(classes[0], classes[1:])


class TestScoreBundle:
    def test_orthogonal_symmetry(self):
        c1, c2 = two_class_fixture([[1.0, 0.0]] * 2, [[0.0, 1.0]] * 2)
        rows = score_bundle([c1, c2])
        assert [r.class_id for r in rows] == ["a", "b"]
        for r in rows:
            assert r.consistency == pytest.approx(1.0, abs=1e-12)
            assert r.silhouette == pytest.approx(1.0, abs=1e-12)
            assert r.compound == pytest.approx(5.0, abs=1e-12)
            assert r.variant == "image"

    def test_matches_oracle_four_classes(self, rng):
        classes = random_bundle(rng, 4, 8, 3)
        texts, sets = oracle_inputs(classes)
        rows = score_bundle(classes)
        for i, r in enumerate(rows):
            assert abs(r.consistency - oracles.consistency(i, texts, sets)) <= 1e-9
            assert abs(r.silhouette - oracles.silhouette(i, texts, sets, CFG.lam)) <= 1e-9
            assert abs(r.compound - oracles.compound(i, texts, sets, CFG.lam, CFG.alpha)) <= 1e-9

    def test_single_class_rejected(self):
        c = ClassEmbeddings("a", [1.0, 0.0], image_set=[[1.0, 0.0]])
        with pytest.raises(NoAlternativesError):
            score_bundle([c])

    def test_duplicate_ids_rejected(self):
        c1, c2 = two_class_fixture([[1.0, 0.0]], [[0.0, 1.0]])
        dup = ClassEmbeddings("a", [0.0, 1.0], image_set=[[0.0, 1.0]])
        with pytest.raises(ValidationError):
            score_bundle([c1, dup])

    def test_mixed_dims_rejected(self):
        c1 = ClassEmbeddings("a", [1.0, 0.0], image_set=[[1.0, 0.0]])
        c2 = ClassEmbeddings("b", [0.0, 1.0, 0.0], image_set=[[0.0, 1.0, 0.0]])
        with pytest.raises(DimensionMismatchError):
            score_bundle([c1, c2])

    def test_dim_one_rejected(self):
        c1 = ClassEmbeddings("a", [1.0], image_set=[[1.0]])
        c2 = ClassEmbeddings("b", [-1.0], image_set=[[-1.0]])
        with pytest.raises(DimensionMismatchError):
            score_bundle([c1, c2])

    def test_min_images_enforced(self, rng):
        classes = random_bundle(rng, 2, 4, 2)
        with pytest.raises(ValidationError):
            score_bundle(classes, ScoringConfig(min_images_per_class=3))

    def test_unknown_variant_rejected(self, rng):
        classes = random_bundle(rng, 2, 4, 2)
        with pytest.raises(ValidationError):
            score_bundle(classes, variant="audio")


class TestInvariances:
    def test_rotation(self, rng):
        for _ in range(10):
            classes = random_bundle(rng, 3, 8, 3)
            q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
            rotated = [
                ClassEmbeddings(
                    c.class_id, c.plain_text @ q.T, image_set=c.image_set @ q.T
                )
                for c in classes
            ]
            base = score_bundle(classes)
            rot = score_bundle(rotated)
            for a, b in zip(base, rot):
                assert abs(a.consistency - b.consistency) <= 1e-9
                assert abs(a.silhouette - b.silhouette) <= 1e-9
                assert abs(a.compound - b.compound) <= 1e-9

    def test_contrast_order_permutation(self, rng):
        classes = random_bundle(rng, 5, 6, 3)
        s1 = consistency_score(classes[0], classes[1:])
        s2 = consistency_score(classes[0], classes[:0:-1])
        assert s1 == pytest.approx(s2, abs=1e-12)

    def test_image_order_permutation(self, rng):
        classes = random_bundle(rng, 3, 6, 5)
        perm = rng.permutation(5)
        shuffled = ClassEmbeddings(
            classes[0].class_id,
            classes[0].plain_text,
            image_set=classes[0].image_set[perm],
        )
        assert consistency_score(classes[0], classes[1:]) == pytest.approx(
            consistency_score(shuffled, classes[1:]), abs=1e-12
        )
        assert silhouette_score(classes[0], classes[1:]) == pytest.approx(
            silhouette_score(shuffled, classes[1:]), abs=1e-12
        )


class TestSeparationMonotonicity:
    def test_compound_grows_with_angle(self, rng):
        # class 2 swings from 10 to 90 degrees away; same image noise each time
        noise = rng.standard_normal((6, 2)) * 0.05
        scores = []
        for theta_deg in (10.0, 30.0, 60.0, 90.0):
            t = np.radians(theta_deg)
            t1 = np.array([1.0, 0.0])
            t2 = np.array([np.cos(t), np.sin(t)])
            imgs1 = np.vstack([t1] * 6) + noise
            imgs1 /= np.linalg.norm(imgs1, axis=1, keepdims=True)
            imgs2 = np.vstack([t2] * 6) + noise
            imgs2 /= np.linalg.norm(imgs2, axis=1, keepdims=True)
            c1 = ClassEmbeddings("a", t1, image_set=imgs1)
            c2 = ClassEmbeddings("b", t2, image_set=imgs2)
            rows = score_bundle([c1, c2])
            scores.append(rows[0].compound)
        assert all(b >= a - 1e-12 for a, b in zip(scores, scores[1:]))
