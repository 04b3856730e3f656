// View-model logic kept DOM-free so it is testable under node.
// The UI holds no authoritative state: everything here is derived from
// API payloads plus unsaved edit buffers that must never be dropped
// silently.

import type { LabelingRecord, LedgerRow, TopicView } from "./api.js";

export interface ViewState {
  projectId: string | null;
  runId: string | null;
  topicCursor: number;
}

/** Split a slash-separated label entry into distinct labels:
 * "Payments/Job requirements" stores two labels. */
export function parseLabels(entry: string): string[] {
  return entry
    .split("/")
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}

export function formatLabels(labels: string[]): string {
  return labels.join(" / ");
}

/** Unsaved-edit buffer for one topic labeling. Navigation must consult
 * dirty() before discarding. */
export class LabelingBuffer {
  labels: string[] = [];
  themeRefs: number[] = [];
  excludedTerms: Set<string> = new Set();
  random = false;
  private baseline = "";
  private revision: string | null = null;

  load(view: TopicView): void {
    const rec = view.labeling;
    this.labels = rec ? [...rec.labels] : [];
    this.themeRefs = rec ? [...rec.theme_refs] : [];
    this.excludedTerms = new Set(rec?.excluded_terms ?? []);
    this.random = (rec?.labels ?? []).includes("Random");
    this.revision = rec?.revision ?? null;
    this.baseline = this.fingerprint();
  }

  loadSaved(rec: LabelingRecord): void {
    this.revision = rec.revision;
    this.baseline = this.fingerprint();
  }

  toggleTheme(themeId: number): void {
    const at = this.themeRefs.indexOf(themeId);
    if (at >= 0) this.themeRefs.splice(at, 1);
    else this.themeRefs.push(themeId);
  }

  toggleExcluded(term: string): void {
    if (this.excludedTerms.has(term)) this.excludedTerms.delete(term);
    else this.excludedTerms.add(term);
  }

  setRandom(on: boolean): void {
    this.random = on;
    if (on) {
      this.labels = ["Random"];
      this.themeRefs = [];
    } else {
      this.labels = this.labels.filter((l) => l !== "Random");
    }
  }

  payload(annotator: string) {
    return {
      labels: this.random ? ["Random"] : this.labels,
      theme_refs: this.random ? [] : this.themeRefs,
      excluded_terms: [...this.excludedTerms].sort(),
      annotator,
      revision: this.revision,
    };
  }

  dirty(): boolean {
    return this.fingerprint() !== this.baseline;
  }

  private fingerprint(): string {
    return JSON.stringify([
      this.random ? ["Random"] : this.labels,
      this.random ? [] : [...this.themeRefs].sort((a, b) => a - b),
      [...this.excludedTerms].sort(),
    ]);
  }
}

export interface GridRow {
  key: string;
  label: string;
  themeId: number | null;
  proposedOnly: boolean;
  terms: { term: string; column: "common" | "unique_a" | "unique_b" | "proposed"; included: boolean }[];
}

/** Curation grid rows from the ledger payload plus stored selections. */
export function gridFromLedger(
  rows: LedgerRow[],
  selections: Record<string, { excluded_terms: string[] }>,
): GridRow[] {
  return rows.map((row) => {
    const excluded = new Set(selections[row.key]?.excluded_terms ?? []);
    const terms: GridRow["terms"] = [];
    const push = (col: "common" | "unique_a" | "unique_b" | "proposed") => {
      for (const term of row[col]) {
        terms.push({ term, column: col, included: !excluded.has(term) });
      }
    };
    push("common");
    push("unique_a");
    push("unique_b");
    push("proposed");
    const modelDerived =
      row.common.length + row.unique_a.length + row.unique_b.length > 0;
    return {
      key: row.key,
      label: row.label,
      themeId: row.theme_id,
      proposedOnly: !modelDerived,
      terms,
    };
  });
}

/** Excluded-term list a grid row would submit via the selection endpoint. */
export function selectionPayload(row: GridRow): string[] {
  return row.terms.filter((t) => !t.included).map((t) => t.term).sort();
}

/** The query terms QDTM would launch with for one row (all columns,
 * lowercased, minus exclusions) — mirrors the server's ledger rules so
 * the grid can preview the payload. The launched payload itself always
 * comes back from the API. */
export function previewQueryTerms(row: GridRow): string[] {
  const out: string[] = [];
  for (const t of row.terms) {
    const lower = t.term.toLowerCase();
    if (t.included && !out.includes(lower)) out.push(lower);
  }
  return out;
}

export function rowLaunchable(row: GridRow): boolean {
  return previewQueryTerms(row).length > 0;
}

/** Render highlight spans into segments for safe DOM assembly. */
export function highlightSegments(
  text: string,
  spans: { start: number; end: number }[],
): { text: string; marked: boolean }[] {
  const sorted = [...spans].sort((a, b) => a.start - b.start);
  const segments: { text: string; marked: boolean }[] = [];
  let at = 0;
  for (const span of sorted) {
    if (span.start < at) continue; // overlapping spans keep the first
    if (span.start > at) segments.push({ text: text.slice(at, span.start), marked: false });
    segments.push({ text: text.slice(span.start, span.end), marked: true });
    at = span.end;
  }
  if (at < text.length) segments.push({ text: text.slice(at), marked: false });
  return segments;
}
