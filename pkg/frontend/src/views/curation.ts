// Curation grid (common / unique-A / unique-B / proposed columns with
// per-term include checkboxes) plus the QDTM launcher and the resulting
// hierarchy tree with per-node coherence and include/exclude judgments.

import type { ApiClient, HierarchyNode, LedgerPayload } from "../api.js";
import {
  GridRow,
  gridFromLedger,
  rowLaunchable,
  selectionPayload,
} from "../state.js";

const COLUMN_TITLES: Record<string, string> = {
  common: "Common terms",
  unique_a: "Unique to model A",
  unique_b: "Unique to model B",
  proposed: "Proposed terms",
};

export class CurationView {
  private rows: GridRow[] = [];
  private revisions: Record<string, string | null> = {};

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private projectId: string,
    private annotator: string,
  ) {}

  async open(): Promise<void> {
    const payload = await this.api.getLedger(this.projectId);
    this.rows = gridFromLedger(payload.ledger.rows, payload.selections);
    this.revisions = {};
    for (const [key, sel] of Object.entries(payload.selections)) {
      this.revisions[key] = sel.revision;
    }
    this.render(payload);
  }

  private render(payload: LedgerPayload): void {
    const root = this.root;
    root.innerHTML = "";
    const head = document.createElement("h2");
    head.textContent = `Term ledger — ${payload.ledger.run_a} vs ${payload.ledger.run_b}`;
    root.appendChild(head);

    const table = document.createElement("table");
    table.className = "ledger-grid";
    const thead = document.createElement("tr");
    for (const title of ["Topic", ...Object.values(COLUMN_TITLES), ""]) {
      const th = document.createElement("th");
      th.textContent = title;
      thead.appendChild(th);
    }
    table.appendChild(thead);

    for (const row of this.rows) {
      const tr = document.createElement("tr");
      const name = document.createElement("td");
      name.textContent = row.label;
      name.className = row.proposedOnly ? "proposed-row" : "";
      tr.appendChild(name);
      for (const column of Object.keys(COLUMN_TITLES) as GridRow["terms"][0]["column"][]) {
        const td = document.createElement("td");
        for (const entry of row.terms.filter((t) => t.column === column)) {
          const label = document.createElement("label");
          label.className = "term-chip";
          const box = document.createElement("input");
          box.type = "checkbox";
          box.checked = entry.included;
          box.addEventListener("change", () => {
            entry.included = box.checked;
          });
          label.append(box, document.createTextNode(` ${entry.term}`));
          td.appendChild(label);
        }
        tr.appendChild(td);
      }
      const actions = document.createElement("td");
      const save = document.createElement("button");
      save.textContent = "Save row";
      save.addEventListener("click", () => void this.saveRow(row, actions));
      actions.appendChild(save);
      tr.appendChild(actions);
      table.appendChild(tr);
    }
    root.appendChild(table);

    const launch = document.createElement("button");
    launch.className = "launch-qdtm";
    launch.textContent = "Run query-driven modeling from this grid";
    launch.addEventListener("click", () => void this.launch(root));
    root.appendChild(launch);

    const status = document.createElement("p");
    status.className = "launch-status";
    root.appendChild(status);

    const tree = document.createElement("div");
    tree.className = "hierarchy-tree";
    root.appendChild(tree);
  }

  private async saveRow(row: GridRow, cell: HTMLElement): Promise<void> {
    try {
      const record = await this.api.putSelection(this.projectId, row.key, {
        excluded_terms: selectionPayload(row),
        annotator: this.annotator,
        revision: this.revisions[row.key] ?? null,
      });
      this.revisions[row.key] = record.revision;
      cell.setAttribute("data-saved", "true");
    } catch (err) {
      window.alert(`saving row failed: ${(err as Error).message}`);
    }
  }

  private async launch(root: HTMLElement): Promise<void> {
    const status = root.querySelector(".launch-status") as HTMLElement;
    const empty = this.rows.filter((r) => !rowLaunchable(r));
    if (empty.length) {
      status.textContent = `cannot launch: row "${empty[0].label}" has no included terms`;
      return;
    }
    status.textContent = "launching…";
    const { run_id } = await this.api.startQdtm(this.projectId, {
      from_ledger: true,
      config: {},
    });
    const final = await this.api.waitForRun(run_id, (s) => {
      status.textContent = `run ${run_id}: ${s.status}`;
    });
    if (final.status !== "done") {
      status.textContent = `run failed: ${final.error}`;
      return;
    }
    const hierarchy = await this.api.hierarchy(run_id);
    const tree = root.querySelector(".hierarchy-tree") as HTMLElement;
    tree.innerHTML = "";
    for (const main of hierarchy.mains) {
      tree.appendChild(this.nodeElement(run_id, main));
    }
    if (hierarchy.unmodelable.length) {
      const note = document.createElement("p");
      note.textContent =
        "Unmodelable queries: " +
        hierarchy.unmodelable.map((u) => `${u.label} (${u.reason})`).join("; ");
      tree.appendChild(note);
    }
  }

  private nodeElement(runId: string, node: HierarchyNode): HTMLElement {
    const details = document.createElement("details");
    details.open = true;
    const summary = document.createElement("summary");
    const cv = node.c_v === null ? "-" : node.c_v.toFixed(3);
    summary.textContent = `${node.label} — c_v ${cv} — ${node.doc_ids.length} docs`;
    details.appendChild(summary);

    const terms = document.createElement("p");
    terms.className = "node-terms";
    terms.textContent = node.top_terms.map((t) => t.term).join(", ");
    details.appendChild(terms);

    const include = document.createElement("button");
    include.textContent = "include";
    include.addEventListener("click", () =>
      void this.judge(runId, node, true),
    );
    const exclude = document.createElement("button");
    exclude.textContent = "exclude";
    exclude.addEventListener("click", () =>
      void this.judge(runId, node, false),
    );
    details.append(include, exclude);

    for (const child of node.children) {
      details.appendChild(this.nodeElement(runId, child));
    }
    return details;
  }

  private async judge(
    runId: string,
    node: HierarchyNode,
    include: boolean,
  ): Promise<void> {
    await this.api.putJudgment(`${runId}:${node.node_id}`, {
      coherent: include,
      include,
      annotator: this.annotator,
    });
  }
}
