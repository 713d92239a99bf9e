"""
Scoring walkthrough
===================

Builds a tiny three-class embedding bundle by hand and walks through the
three label-free scores: consistency, multimodal silhouette, and the
compound score. Run it directly:

    python3 demos/01_scoring_walkthrough.py
"""
import numpy as np

from wizs.scoring import ClassEmbeddings, ScoringConfig, score_bundle
from wizs.vectors import cosine

rng = np.random.default_rng(7)
dim = 8

# three class "text" directions, roughly orthogonal
centers, _ = np.linalg.qr(rng.standard_normal((dim, 3)))
centers = centers.T

# per-class generated-image embeddings: samples around the text direction.
# the middle class gets much noisier samples, so its scores should suffer.
noise = [0.15, 0.75, 0.25]
classes = []
for i, name in enumerate(["heron", "egret", "stork"]):
    samples = centers[i] + noise[i] * rng.standard_normal((12, dim))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    classes.append(
        ClassEmbeddings(class_id=name, plain_text=centers[i], image_set=samples)
    )

print("pairwise text cosines (the contrast structure):")
for a in classes:
    row = [f"{cosine(a.plain_text, b.plain_text):+.3f}" for b in classes]
    print(f"  {a.class_id:8s} {' '.join(row)}")

config = ScoringConfig()  # lam=2.5, alpha=4.0
print(f"\nscores (lam={config.lam}, alpha={config.alpha}):")
print(f"{'class':8s} {'consistency':>12s} {'silhouette':>12s} {'compound':>10s}")
for s in score_bundle(classes, config, variant="image"):
    print(f"{s.class_id:8s} {s.consistency:+12.4f} {s.silhouette:+12.4f} {s.compound:+10.4f}")

print(
    "\nconsistency is the average, over a class's samples, of the worst-case\n"
    "agreement between image-space shifts and text-space shifts to the other\n"
    "classes; silhouette is a margin between own-cluster and other-cluster\n"
    "distances with text distances weighted in; compound adds them with\n"
    "weight alpha. the noisy middle class scores lowest on all three."
)

# the same machinery scores caption embeddings instead of image embeddings
for c in classes:
    caps = c.plain_text + 0.2 * rng.standard_normal((5, dim))
    c.descriptive_text_set = caps / np.linalg.norm(caps, axis=1, keepdims=True)

print("\ntext-variant compound (captions swapped in for images):")
for s in score_bundle(classes, config, variant="text"):
    print(f"  {s.class_id:8s} {s.compound:+.4f}")
