"""
Offline end-to-end prediction
=============================

The full pipeline against the deterministic offline stub providers: one
query label in, a calibrated accuracy estimate out, with every intermediate
artifact (alternatives, captions, image refs, per-class scores) visible.
No network, no keys; swap in a JSON provider config for real endpoints.

    python3 demos/04_offline_prediction.py
"""
from wizs.calibration import load_default_model
from wizs.pipeline import PredictionRequest, run_prediction
from wizs.providers import ProviderConfig, build_provider_set

providers = build_provider_set(ProviderConfig())  # stub mode, 16-dim embeddings
model = load_default_model()

request = PredictionRequest(query="spotted lanternfly", n_images=4)
result = run_prediction(
    request, providers, model, on_stage=lambda s: print(f"[stage] {s}")
)

print(f"\nquery: {result.query}")
print(f"alternatives ({len(result.alternatives)}): {', '.join(result.alternatives)}")
print(
    f"predicted accuracy {result.predicted_accuracy:.1%} "
    f"(compound {result.compound_score:+.4f}, model {result.calibration_model_id})"
)

print("\nper-class scores (query first):")
for s in result.per_class:
    print(f"  {s.class_id:20s} compound {s.compound:+.4f}")

caps = result.captions[result.query]
print(f"\ncaptions for the query class ({len(caps)}):")
for c in caps:
    print(f"  {c}")

refs = result.image_refs[result.query]
print(f"\ngenerated image refs for the query ({len(refs)} content hashes):")
for r in refs:
    print(f"  {r}")
print("\nimage bytes live in the provider image store:")
png = providers.image_store.get(refs[0])
print(f"  {refs[0][:16]}... -> {len(png)} bytes, magic {png[:4]!r}")
