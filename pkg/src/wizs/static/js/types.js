/** Wire types for the prediction service JSON API.

Field names mirror the server documents exactly; the UI renders these
values verbatim and computes nothing from them.
*/
export const TERMINAL_STATES = new Set(["done", "failed"]);
