/** Display formatting. Values are formatted for reading only; the raw
numbers ride along in tooltips and nothing is recomputed client-side.
*/

import type { JobState } from "./types.js";

export function formatPercent(x: number): string {
  return (x * 100).toFixed(1) + "%";
}

export function formatScore(x: number): string {
  return x.toFixed(4);
}

export function stateLabel(state: JobState): string {
  return state.replace(/_/g, " ");
}
