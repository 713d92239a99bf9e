"""Regenerate the packaged default calibration model.

The shipped model is fitted on SYNTHETIC (score, accuracy) pairs drawn from a
known beta-regression ground truth, so the service and CLI work out of the box
without any real evaluation data. It is clearly labeled as synthetic via its
model_id; fit a real model from evaluation CSVs for anything beyond demos.

Run from the repo root:  python3 tools/fit_default_calibration.py
"""
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from wizs import calibration  # noqa: E402

OUT = (
    pathlib.Path(__file__).resolve().parents[1]
    / "src"
    / "wizs"
    / "assets"
    / calibration.DEFAULT_MODEL_FILENAME
)

# ground truth: mean accuracy = sigmoid(0.9 + 1.4 * score)
TRUE_THETA1 = np.array([1.2, 0.8])
TRUE_THETA2 = np.array([0.3, -0.6])
SEED = 20240817
N_POINTS = 400


def main():
    rng = np.random.default_rng(SEED)
    scores = rng.uniform(-2.5, 2.5, size=N_POINTS)
    x = np.column_stack([np.ones(N_POINTS), scores])
    alpha = np.exp(x @ TRUE_THETA1)
    beta = np.exp(x @ TRUE_THETA2)
    accuracies = rng.beta(alpha, beta)
    model = calibration.fit(scores, accuracies, model_id="synthetic-default-v1")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    calibration.save_model(model, OUT)
    grid = np.linspace(-2.5, 2.5, 11)
    print(f"wrote {OUT}")
    print(f"iterations={model.fit_meta.iterations} termination={model.fit_meta.termination}")
    for s in grid:
        truth = 1.0 / (1.0 + np.exp(-(0.9 + 1.4 * s)))
        pred = calibration.predict_accuracy(model, float(s))
        print(f"  score {s:+.2f}: predicted {pred:.4f}  (generating truth {truth:.4f})")


if __name__ == "__main__":
    main()
