/** Display formatting. Values are formatted for reading only; the raw
numbers ride along in tooltips and nothing is recomputed client-side.
*/
export function formatPercent(x) {
    return (x * 100).toFixed(1) + "%";
}
export function formatScore(x) {
    return x.toFixed(4);
}
export function stateLabel(state) {
    return state.replace(/_/g, " ");
}
