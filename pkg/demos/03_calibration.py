"""
Calibrating scores into accuracies
==================================

Compound scores are unitless; the calibration model maps them to [0, 1]
accuracy via beta regression (both beta parameters are log-linear in the
score, the predicted accuracy is the beta mean). This demo fits on draws
from a known curve, checks recovery, and runs leave-one-dataset-out
cross-validation.

    python3 demos/03_calibration.py
"""
import numpy as np

from wizs import calibration

rng = np.random.default_rng(11)
theta1_true = np.array([1.2, 0.8])
theta2_true = np.array([0.3, -0.6])
# implied mean curve: sigmoid(0.9 + 1.4 * score)


def draw(n):
    s = rng.uniform(-2.5, 2.5, n)
    a = rng.beta(
        np.exp(theta1_true[0] + theta1_true[1] * s),
        np.exp(theta2_true[0] + theta2_true[1] * s),
    )
    return s, a


scores, accuracies = draw(600)
model = calibration.fit(scores, accuracies, model_id="demo-fit")
meta = model.fit_meta
print(
    f"fit: {meta.iterations} iterations, termination={meta.termination}, "
    f"log-likelihood {meta.final_log_likelihood:.2f}"
)
print(f"theta1 {model.theta1.round(3)} (true {theta1_true})")
print(f"theta2 {model.theta2.round(3)} (true {theta2_true})")

print(f"\n{'score':>6s} {'true mean':>10s} {'predicted':>10s}")
for s in np.linspace(-2, 2, 9):
    truth = 1.0 / (1.0 + np.exp(-(0.9 + 1.4 * s)))
    pred = calibration.predict_accuracy(model, s)
    print(f"{s:6.2f} {truth:10.3f} {pred:10.3f}")

# leave-one-dataset-out: fit on all groups but one, score the held-out one
groups = []
for name in ("birds", "food", "textures"):
    s, a = draw(150)
    groups.append(calibration.CalibrationGroup(name, s, a))
print("\nleave-one-dataset-out:")
for fold in calibration.loo_cv(groups):
    print(f"  held out {fold.dataset_id:9s} MAE {fold.held_out_mae:.4f} over {fold.n_points} classes")
