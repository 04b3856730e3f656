// Reading room: top terms with weights, top documents with highlighted
// term occurrences, multi-label entry, theme picker, Random/novel
// toggles, and term-exclusion checkboxes. Saving issues put_labeling
// with the revision token; conflicts surface a merge prompt, never a
// silent overwrite.

import type { ApiClient, Theme, TopicView } from "../api.js";
import { ApiError } from "../api.js";
import {
  LabelingBuffer,
  formatLabels,
  highlightSegments,
  parseLabels,
} from "../state.js";

export interface ReadingRoomCallbacks {
  onSaved: () => void;
  confirmNavigation?: () => boolean;
}

export class ReadingRoom {
  buffer = new LabelingBuffer();
  private view: TopicView | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private themes: Theme[],
    private annotator: string,
    private callbacks: ReadingRoomCallbacks,
  ) {}

  dirty(): boolean {
    return this.buffer.dirty();
  }

  async open(runId: string, topicId: number): Promise<void> {
    if (this.dirty()) {
      const proceed = this.callbacks.confirmNavigation
        ? this.callbacks.confirmNavigation()
        : window.confirm("Discard unsaved labeling edits?");
      if (!proceed) return;
    }
    this.view = await this.api.topicView(runId, topicId);
    this.buffer.load(this.view);
    this.render();
  }

  private render(): void {
    const view = this.view;
    if (!view) return;
    const root = this.root;
    root.innerHTML = "";

    const head = document.createElement("h2");
    head.textContent = `Topic ${view.topic_id} of ${view.n_topics} — ${view.run_id}`;
    root.appendChild(head);

    const cols = document.createElement("div");
    cols.className = "reading-columns";
    root.appendChild(cols);

    // ---- terms with exclusion checkboxes
    const termPane = document.createElement("section");
    termPane.className = "term-pane";
    const termHead = document.createElement("h3");
    termHead.textContent = "Top terms";
    termPane.appendChild(termHead);
    const list = document.createElement("ol");
    for (const t of view.terms) {
      const li = document.createElement("li");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = !this.buffer.excludedTerms.has(t.term);
      box.title = "Uncheck to exclude this term from the curation grid";
      box.addEventListener("change", () => this.buffer.toggleExcluded(t.term));
      const name = document.createElement("span");
      name.textContent = ` ${t.term} `;
      const weight = document.createElement("small");
      weight.textContent = t.weight.toExponential(3);
      li.append(box, name, weight);
      list.appendChild(li);
    }
    termPane.appendChild(list);
    cols.appendChild(termPane);

    // ---- documents with highlights
    const docPane = document.createElement("section");
    docPane.className = "doc-pane";
    const docHead = document.createElement("h3");
    docHead.textContent = "Highest weighted documents";
    docPane.appendChild(docHead);
    for (const doc of view.documents) {
      const card = document.createElement("article");
      card.className = "doc-card";
      const meta = document.createElement("header");
      meta.textContent = `${doc.source_id} — weight ${doc.weight.toFixed(4)}`;
      card.appendChild(meta);
      const body = document.createElement("p");
      for (const seg of highlightSegments(doc.text, doc.highlights)) {
        if (seg.marked) {
          const mark = document.createElement("mark");
          mark.textContent = seg.text;
          body.appendChild(mark);
        } else {
          body.appendChild(document.createTextNode(seg.text));
        }
      }
      card.appendChild(body);
      docPane.appendChild(card);
    }
    cols.appendChild(docPane);

    // ---- labeling form
    const form = document.createElement("section");
    form.className = "label-form";
    const formHead = document.createElement("h3");
    formHead.textContent = "Labeling";
    form.appendChild(formHead);

    const labelInput = document.createElement("input");
    labelInput.type = "text";
    labelInput.placeholder = "Label(s), slash-separated for multiple";
    labelInput.value = formatLabels(this.buffer.labels);
    labelInput.addEventListener("input", () => {
      this.buffer.labels = parseLabels(labelInput.value);
    });
    form.appendChild(labelInput);

    const randomToggle = document.createElement("label");
    const randomBox = document.createElement("input");
    randomBox.type = "checkbox";
    randomBox.checked = this.buffer.random;
    randomBox.addEventListener("change", () => {
      this.buffer.setRandom(randomBox.checked);
      labelInput.value = formatLabels(this.buffer.labels);
      labelInput.disabled = randomBox.checked;
    });
    randomToggle.append(randomBox, document.createTextNode(" Random (no usable topic)"));
    form.appendChild(randomToggle);

    const picker = document.createElement("fieldset");
    const legend = document.createElement("legend");
    legend.textContent = "Mapped themes (empty = novel topic)";
    picker.appendChild(legend);
    for (const theme of this.themes.filter((t) => t.comparable)) {
      const row = document.createElement("label");
      row.className = "theme-row";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = this.buffer.themeRefs.includes(theme.theme_id);
      box.addEventListener("change", () => this.buffer.toggleTheme(theme.theme_id));
      row.append(box, document.createTextNode(` ${theme.theme_id}. ${theme.label}`));
      row.title = theme.description;
      picker.appendChild(row);
    }
    form.appendChild(picker);

    const save = document.createElement("button");
    save.textContent = "Save labeling";
    save.addEventListener("click", () => void this.save());
    form.appendChild(save);

    const status = document.createElement("p");
    status.className = "save-status";
    form.appendChild(status);
    cols.appendChild(form);
  }

  private async save(): Promise<void> {
    const view = this.view;
    if (!view) return;
    try {
      const record = await this.api.putLabeling(
        view.run_id,
        view.topic_id,
        this.buffer.payload(this.annotator),
      );
      this.buffer.loadSaved(record);
      this.callbacks.onSaved();
      this.flash("saved");
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        const reload = window.confirm(
          "Someone else updated this labeling. Reload their version " +
            "(OK) or keep editing yours (Cancel)?",
        );
        if (reload) await this.open(view.run_id, view.topic_id);
      } else {
        this.flash(`save failed: ${(err as Error).message}`);
      }
    }
  }

  private flash(message: string): void {
    const el = this.root.querySelector(".save-status");
    if (el) el.textContent = message;
  }
}
