import sys
from pathlib import Path

import numpy as np
import pytest

# make tests/oracles.py importable as `oracles` regardless of invocation dir
sys.path.insert(0, str(Path(__file__).parent))

from wizs.scoring import ClassEmbeddings


def random_unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_unit_rows(rng, n, dim):
    m = rng.standard_normal((n, dim))
    return m / np.linalg.norm(m, axis=1, keepdims=True)


def random_bundle(rng, n_classes, dim, n_images, n_captions=0, n_real=0):
    """Random bundle of unit embeddings; class ids c0..c{n-1}."""
    classes = []
    for i in range(n_classes):
        classes.append(
            ClassEmbeddings(
                class_id=f"c{i}",
                plain_text=random_unit(rng, dim),
                image_set=random_unit_rows(rng, n_images, dim),
                descriptive_text_set=(
                    random_unit_rows(rng, n_captions, dim) if n_captions else None
                ),
                labeled_real_images=(
                    random_unit_rows(rng, n_real, dim) if n_real else None
                ),
            )
        )
    return classes


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
