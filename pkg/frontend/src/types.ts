/** Wire types for the prediction service JSON API.

Field names mirror the server documents exactly; the UI renders these
values verbatim and computes nothing from them.
*/

export interface PerClassScore {
  class_id: string;
  consistency: number;
  silhouette: number;
  compound: number;
}

export interface PredictionResult {
  query: string;
  alternatives: string[];
  predicted_accuracy: number;
  compound_score: number;
  calibration_model_id: string;
  per_class: PerClassScore[];
  captions: Record<string, string[]>;
  image_refs: Record<string, string[]>;
  notes: string[];
}

export type JobState =
  | "queued"
  | "generating_alternatives"
  | "captioning"
  | "generating_images"
  | "embedding"
  | "scoring"
  | "done"
  | "failed";

export const TERMINAL_STATES: ReadonlySet<JobState> = new Set(["done", "failed"]);

export interface JobErrorBody {
  type: string;
  message: string;
}

export interface JobDocument {
  job_id: string;
  state: JobState;
  request: {
    query: string;
    alternatives: string[] | null;
    domain: string | null;
    n_images: number;
  };
  result: PredictionResult | null;
  error: JobErrorBody | null;
}

export interface AlternativesResponse {
  query: string;
  alternatives: string[];
}

/** One row of the session history panel. */
export interface HistoryEntry {
  query: string;
  alternatives: string[];
  predicted_accuracy: number;
}
