/** DOM builders for the result views.

Every numeric cell shows a formatted string and carries the raw API
value in its title attribute; no number is derived client-side. The
image grid paginates large results and swaps failed loads for
placeholders without touching the score panels.
*/

import { formatPercent, formatScore, stateLabel } from "./format.js";
import type { HistoryEntry, JobState, PredictionResult } from "./types.js";

export const STAGE_ORDER: readonly JobState[] = [
  "queued",
  "generating_alternatives",
  "captioning",
  "generating_images",
  "embedding",
  "scoring",
];

export const GRID_PAGE_SIZE = 24;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function numberCell(tag: "td" | "span", value: number, formatted: string, className?: string): HTMLElement {
  const cell = el(tag, className, formatted);
  cell.title = String(value);
  return cell;
}

export function renderAccuracyPanel(result: PredictionResult): HTMLElement {
  const panel = el("div", "accuracy-panel");
  const value = numberCell("span", result.predicted_accuracy, formatPercent(result.predicted_accuracy), "accuracy-value");
  panel.appendChild(value);
  panel.appendChild(el("span", "accuracy-caption", "predicted zero-shot accuracy"));
  const meta = el("div", "accuracy-meta");
  meta.appendChild(el("span", undefined, "query compound "));
  meta.appendChild(numberCell("span", result.compound_score, formatScore(result.compound_score)));
  meta.appendChild(el("span", undefined, ` · calibration ${result.calibration_model_id}`));
  panel.appendChild(meta);
  return panel;
}

export function renderScoreTable(result: PredictionResult): HTMLTableElement {
  const table = el("table", "score-table");
  const head = table.createTHead().insertRow();
  for (const label of ["class", "consistency", "silhouette", "compound"]) {
    head.appendChild(el("th", undefined, label));
  }
  const body = table.createTBody();
  for (const row of result.per_class) {
    const tr = body.insertRow();
    if (row.class_id === result.query) tr.className = "query-row";
    tr.appendChild(el("td", "class-cell", row.class_id));
    tr.appendChild(numberCell("td", row.consistency, formatScore(row.consistency)));
    tr.appendChild(numberCell("td", row.silhouette, formatScore(row.silhouette)));
    tr.appendChild(numberCell("td", row.compound, formatScore(row.compound)));
  }
  return table;
}

export function renderNotes(notes: readonly string[]): HTMLElement | null {
  if (notes.length === 0) return null;
  const list = el("ul", "notes");
  for (const note of notes) list.appendChild(el("li", undefined, note));
  return list;
}

interface GridItem {
  classId: string;
  ref: string | null;
}

export interface ImageGridOptions {
  pageSize?: number;
  onRephrase?: (classId: string) => void;
}

function placeholderCell(): HTMLElement {
  return el("div", "thumb placeholder", "image unavailable");
}

/** Image grid grouped by class, pages of at most pageSize cells.

Classes follow the score-table order; a class with no refs still gets a
placeholder cell so its absence is visible. Failed image loads swap to
placeholders in place.
*/
export function renderImageGrid(
  result: PredictionResult,
  imageUrl: (ref: string) => string,
  options: ImageGridOptions = {},
): HTMLElement {
  const pageSize = options.pageSize ?? GRID_PAGE_SIZE;
  const items: GridItem[] = [];
  for (const row of result.per_class) {
    const refs = result.image_refs[row.class_id] ?? [];
    if (refs.length === 0) {
      items.push({ classId: row.class_id, ref: null });
    } else {
      for (const ref of refs) items.push({ classId: row.class_id, ref });
    }
  }
  const pageCount = Math.max(1, Math.ceil(items.length / pageSize));
  let page = 0;

  const wrap = el("div", "image-grid-wrap");
  const pager = el("div", "pager");
  const prev = el("button", "pager-prev", "← prev");
  prev.type = "button";
  const label = el("span", "pager-label");
  const next = el("button", "pager-next", "next →");
  next.type = "button";
  pager.append(prev, label, next);
  const grid = el("div", "image-grid");
  if (pageCount > 1) wrap.appendChild(pager);
  wrap.appendChild(grid);

  const renderPage = (): void => {
    label.textContent = `page ${page + 1} / ${pageCount}`;
    prev.disabled = page === 0;
    next.disabled = page >= pageCount - 1;
    cancelImageLoads(grid);
    grid.replaceChildren();
    const slice = items.slice(page * pageSize, (page + 1) * pageSize);
    let group: HTMLElement | null = null;
    let thumbs: HTMLElement | null = null;
    let currentClass: string | null = null;
    for (const item of slice) {
      if (item.classId !== currentClass || group === null || thumbs === null) {
        currentClass = item.classId;
        group = el("div", "class-group");
        const header = el("div", "class-header");
        header.appendChild(el("span", "class-name", item.classId));
        const onRephrase = options.onRephrase;
        if (onRephrase) {
          const btn = el("button", "rephrase-btn", "rephrase & regenerate");
          btn.type = "button";
          btn.addEventListener("click", () => onRephrase(item.classId));
          header.appendChild(btn);
        }
        group.appendChild(header);
        thumbs = el("div", "thumbs");
        group.appendChild(thumbs);
        grid.appendChild(group);
      }
      if (item.ref === null) {
        thumbs.appendChild(placeholderCell());
      } else {
        const img = el("img", "thumb");
        img.alt = `generated image for ${item.classId}`;
        img.loading = "lazy";
        img.decoding = "async";
        img.addEventListener("error", () => img.replaceWith(placeholderCell()), { once: true });
        img.src = imageUrl(item.ref);
        thumbs.appendChild(img);
      }
    }
  };

  prev.addEventListener("click", () => {
    if (page > 0) {
      page -= 1;
      renderPage();
    }
  });
  next.addEventListener("click", () => {
    if (page < pageCount - 1) {
      page += 1;
      renderPage();
    }
  });

  renderPage();
  return wrap;
}

/** Abort in-flight image fetches under node before it is discarded. */
export function cancelImageLoads(node: ParentNode): void {
  for (const img of Array.from(node.querySelectorAll("img"))) {
    if (!img.complete) img.removeAttribute("src");
  }
}

export function renderStages(current: JobState): HTMLElement {
  const list = el("ol", "stages");
  const at = STAGE_ORDER.indexOf(current);
  STAGE_ORDER.forEach((stage, i) => {
    const item = el("li", undefined, stateLabel(stage));
    if (at >= 0 && i < at) item.className = "stage-done";
    else if (i === at) item.className = "stage-active";
    list.appendChild(item);
  });
  return list;
}

/** Append one run to the history table (append-only by construction). */
export function appendHistoryRow(
  tbody: HTMLTableSectionElement,
  entry: HistoryEntry,
  index: number,
  onReuse?: (entry: HistoryEntry) => void,
): void {
  const tr = tbody.insertRow();
  tr.appendChild(el("td", "history-index", String(index)));
  tr.appendChild(el("td", "history-query", entry.query));
  tr.appendChild(el("td", "history-alternatives", entry.alternatives.join(", ")));
  tr.appendChild(
    numberCell("td", entry.predicted_accuracy, formatPercent(entry.predicted_accuracy), "history-accuracy"),
  );
  const actions = el("td", "history-actions");
  if (onReuse) {
    const btn = el("button", "reuse-btn", "reuse");
    btn.type = "button";
    btn.addEventListener("click", () => onReuse(entry));
    actions.appendChild(btn);
  }
  tr.appendChild(actions);
}

export interface BannerAction {
  label: string;
  onClick: () => void;
}

export function renderBanner(
  kind: "error" | "busy" | "info",
  message: string,
  actions: BannerAction[] = [],
): HTMLElement {
  const banner = el("div", `banner banner-${kind}`);
  banner.setAttribute("role", "alert");
  banner.appendChild(el("span", "banner-message", message));
  for (const action of actions) {
    const btn = el("button", "banner-action", action.label);
    btn.type = "button";
    btn.addEventListener("click", action.onClick);
    banner.appendChild(btn);
  }
  return banner;
}
