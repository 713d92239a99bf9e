/** Page wiring: binds the form, session state, and renderers together.

Kept free of business rules; everything testable lives in session.ts,
poller.ts, and render.ts.
*/

import { ApiClient, ApiError } from "./api.js";
import { stateLabel } from "./format.js";
import {
  appendHistoryRow,
  cancelImageLoads,
  renderAccuracyPanel,
  renderBanner,
  renderImageGrid,
  renderNotes,
  renderScoreTable,
  renderStages,
} from "./render.js";
import { QuerySession } from "./session.js";
import type { HistoryEntry, JobDocument, JobErrorBody, PredictionResult } from "./types.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const api = new ApiClient("", window.fetch.bind(window));
  const session = new QuerySession(api);

  const queryInput = byId<HTMLInputElement>("query-input");
  const domainInput = byId<HTMLInputElement>("domain-input");
  const nImagesSelect = byId<HTMLSelectElement>("n-images-select");
  const suggestBtn = byId<HTMLButtonElement>("suggest-btn");
  const submitBtn = byId<HTMLButtonElement>("submit-btn");
  const chipsBox = byId<HTMLDivElement>("chips");
  const chipInput = byId<HTMLInputElement>("chip-input");
  const chipAddBtn = byId<HTMLButtonElement>("chip-add-btn");
  const chipError = byId<HTMLParagraphElement>("chip-error");
  const formError = byId<HTMLParagraphElement>("form-error");
  const bannerArea = byId<HTMLDivElement>("banner-area");
  const statusArea = byId<HTMLDivElement>("status-area");
  const resultArea = byId<HTMLDivElement>("result-area");
  const historySection = byId<HTMLElement>("history-section");
  const historyBody = byId<HTMLTableSectionElement>("history-body");

  const setFormError = (message: string): void => {
    formError.textContent = message;
    formError.hidden = message === "";
  };
  const setChipError = (message: string): void => {
    chipError.textContent = message;
    chipError.hidden = message === "";
  };
  const clearBanner = (): void => bannerArea.replaceChildren();
  const setControls = (): void => {
    submitBtn.disabled = session.busy;
    suggestBtn.disabled = session.busy || session.status === "suggesting";
  };

  const syncForm = (): void => {
    queryInput.value = session.query;
    renderChips();
  };

  const renderChips = (): void => {
    chipsBox.replaceChildren();
    session.alternatives.forEach((label, index) => {
      const chip = document.createElement("span");
      chip.className = "chip";
      const edit = document.createElement("input");
      edit.className = "chip-edit";
      edit.value = label;
      edit.size = Math.max(4, label.length);
      edit.addEventListener("change", () => {
        const outcome = session.replaceAlternative(index, edit.value);
        if (!outcome.ok) {
          setChipError(outcome.message ?? "invalid label");
          edit.value = session.alternatives[index] ?? label;
        } else {
          setChipError("");
        }
        renderChips();
      });
      const remove = document.createElement("button");
      remove.type = "button";
      remove.className = "chip-remove";
      remove.textContent = "×";
      remove.title = `remove '${label}'`;
      remove.addEventListener("click", () => {
        session.removeAlternative(index);
        setChipError("");
        renderChips();
      });
      chip.append(edit, remove);
      chipsBox.appendChild(chip);
    });
  };

  const addChipFromInput = (): void => {
    const outcome = session.addAlternative(chipInput.value);
    if (!outcome.ok) {
      setChipError(outcome.message ?? "invalid label");
      return;
    }
    setChipError("");
    chipInput.value = "";
    renderChips();
  };

  const showStatus = (doc: JobDocument | null, text: string): void => {
    statusArea.replaceChildren();
    if (text) {
      const line = document.createElement("p");
      line.className = "status-line";
      line.textContent = text;
      statusArea.appendChild(line);
    }
    if (doc !== null) statusArea.appendChild(renderStages(doc.state));
  };

  const openRephraseEditor = (classId: string): void => {
    const existing = resultArea.querySelector(".rephrase-editor");
    if (existing) existing.remove();
    const editor = document.createElement("div");
    editor.className = "rephrase-editor";
    const prompt = document.createElement("p");
    prompt.textContent = `new phrasing for '${classId}' (images regenerate on resubmit):`;
    const input = document.createElement("input");
    input.value = classId;
    const message = document.createElement("p");
    message.className = "field-error";
    message.hidden = true;
    const go = document.createElement("button");
    go.type = "button";
    go.textContent = "rephrase & run";
    go.addEventListener("click", () => {
      const outcome = session.rephrase(classId, input.value);
      if (!outcome.ok) {
        message.textContent = outcome.message ?? "invalid phrasing";
        message.hidden = false;
        return;
      }
      editor.remove();
      syncForm();
      void doSubmit();
    });
    const dismiss = document.createElement("button");
    dismiss.type = "button";
    dismiss.textContent = "cancel";
    dismiss.addEventListener("click", () => editor.remove());
    editor.append(prompt, input, go, dismiss, message);
    resultArea.prepend(editor);
    input.focus();
    input.select();
  };

  const showResult = (result: PredictionResult): void => {
    cancelImageLoads(resultArea);
    resultArea.replaceChildren();
    resultArea.appendChild(renderAccuracyPanel(result));
    const tableWrap = document.createElement("div");
    tableWrap.className = "table-scroll";
    tableWrap.appendChild(renderScoreTable(result));
    resultArea.appendChild(tableWrap);
    const notes = renderNotes(result.notes);
    if (notes) resultArea.appendChild(notes);
    resultArea.appendChild(
      renderImageGrid(result, (ref) => api.imageUrl(ref), { onRephrase: openRephraseEditor }),
    );
  };

  const showFailure = (error: JobErrorBody): void => {
    resultArea.replaceChildren();
    const card = document.createElement("div");
    card.className = "error-card";
    const head = document.createElement("p");
    head.className = "error-title";
    head.textContent = "prediction failed";
    const body = document.createElement("p");
    body.textContent = `${error.type}: ${error.message}`;
    const retry = document.createElement("button");
    retry.type = "button";
    retry.textContent = "retry";
    retry.addEventListener("click", () => void doSubmit());
    card.append(head, body, retry);
    resultArea.appendChild(card);
  };

  const doSubmit = async (): Promise<void> => {
    setFormError("");
    clearBanner();
    session.setQuery(queryInput.value);
    session.setDomain(domainInput.value);
    const n = Number(nImagesSelect.value);
    session.setImagesPerClass(Number.isFinite(n) && n >= 1 ? n : null);
    const outcome = await session.submit({
      onStage: (doc) => {
        showStatus(doc, `job ${doc.job_id}: ${stateLabel(doc.state)}`);
        setControls();
      },
      onDone: (result) => {
        showStatus(null, "");
        setControls();
        syncForm();
        showResult(result);
        const entry = session.history[session.history.length - 1] as HistoryEntry;
        appendHistoryRow(historyBody, entry, session.history.length, (e) => {
          session.reuse(e);
          syncForm();
        });
        historySection.hidden = false;
      },
      onFailed: (error) => {
        showStatus(null, "");
        setControls();
        showFailure(error);
      },
      onPause: () => {
        setControls();
        showStatus(null, "connection lost; polling paused");
        bannerArea.replaceChildren(
          renderBanner("error", "cannot reach the prediction service; the job may still be running.", [
            {
              label: "retry",
              onClick: () => {
                clearBanner();
                showStatus(null, "polling…");
                session.retryPolling();
                setControls();
              },
            },
          ]),
        );
      },
      onError: (err: ApiError) => {
        setControls();
        showStatus(null, "");
        if (err.kind === "busy") {
          const wait = err.retryAfterS !== null ? ` (retry in ~${err.retryAfterS}s)` : "";
          bannerArea.replaceChildren(renderBanner("busy", `service is busy${wait}: ${err.message}`));
        } else {
          bannerArea.replaceChildren(renderBanner("error", err.message));
        }
      },
    });
    if (!outcome.ok && outcome.message && bannerArea.childElementCount === 0) {
      setFormError(outcome.message);
    }
    if (outcome.ok) {
      showStatus(null, "job submitted…");
      syncForm();
    }
    setControls();
  };

  suggestBtn.addEventListener("click", () => {
    setFormError("");
    clearBanner();
    session.setQuery(queryInput.value);
    session.setDomain(domainInput.value);
    setControls();
    void session.suggest().then((outcome) => {
      if (!outcome.ok) setFormError(outcome.message ?? "suggestion failed");
      renderChips();
      setControls();
    });
  });

  submitBtn.addEventListener("click", () => void doSubmit());
  queryInput.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void doSubmit();
  });
  chipAddBtn.addEventListener("click", addChipFromInput);
  chipInput.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      ev.preventDefault();
      addChipFromInput();
    }
  });

  setControls();
}

document.addEventListener("DOMContentLoaded", main);
