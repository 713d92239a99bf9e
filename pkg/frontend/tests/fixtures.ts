import type { JobDocument, JobState, PredictionResult } from "../src/types.js";

export const LANTERNFLY_ALTERNATIVES = [
  "cicada",
  "stink bug",
  "boxelder bug",
  "leafhopper",
  "planthopper",
  "moth",
  "japanese beetle",
  "firefly",
  "assassin bug",
  "ladybug",
];

function fakeRef(i: number): string {
  return i.toString(16).padStart(64, "0");
}

export function makeResult(overrides: Partial<PredictionResult> = {}): PredictionResult {
  const query = "spotted lanternfly";
  const classes = [query, ...LANTERNFLY_ALTERNATIVES];
  return {
    query,
    alternatives: LANTERNFLY_ALTERNATIVES.slice(),
    predicted_accuracy: 0.63,
    compound_score: 1.2345678,
    calibration_model_id: "synthetic-default-v1",
    per_class: classes.map((c, i) => ({
      class_id: c,
      consistency: 0.5 + i * 0.01,
      silhouette: 0.1 + i * 0.01,
      compound: 0.9 + i * 0.05,
    })),
    captions: Object.fromEntries(classes.map((c) => [c, [`a photo of a ${c}`]])),
    image_refs: Object.fromEntries(classes.map((c, i) => [c, [fakeRef(i * 2), fakeRef(i * 2 + 1)]])),
    notes: [],
    ...overrides,
  };
}

/** A result with nClasses classes of imagesPerClass refs each. */
export function makeWideResult(nClasses: number, imagesPerClass: number): PredictionResult {
  const classes = Array.from({ length: nClasses }, (_, i) => `class ${String.fromCharCode(97 + i)}`);
  const query = classes[0] as string;
  return makeResult({
    query,
    alternatives: classes.slice(1),
    per_class: classes.map((c, i) => ({
      class_id: c,
      consistency: 0.4 + i * 0.01,
      silhouette: 0.2 + i * 0.01,
      compound: 1.2 + i * 0.01,
    })),
    captions: Object.fromEntries(classes.map((c) => [c, [`a photo of a ${c}`]])),
    image_refs: Object.fromEntries(
      classes.map((c, i) => [
        c,
        Array.from({ length: imagesPerClass }, (_, j) => fakeRef(i * imagesPerClass + j)),
      ]),
    ),
  });
}

export function jobDoc(state: JobState, extra: Partial<JobDocument> = {}): JobDocument {
  return {
    job_id: "job-1",
    state,
    request: { query: "spotted lanternfly", alternatives: null, domain: null, n_images: 4 },
    result: null,
    error: null,
    ...extra,
  };
}

export function doneDoc(result: PredictionResult): JobDocument {
  return jobDoc("done", { result });
}
