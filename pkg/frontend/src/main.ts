// Single-page wiring: project picker, run list with polling, and the
// three work surfaces (sweep dashboard, reading room, curation grid).

import { ApiClient, RunStatus, Theme } from "./api.js";
import { CurationView } from "./views/curation.js";
import { renderDashboard } from "./views/dashboard.js";
import { ReadingRoom } from "./views/reading.js";

const api = new ApiClient("");
const annotator = "workbench-user";

const nav = document.getElementById("nav")!;
const content = document.getElementById("content")!;

let projectId: string | null = null;
let themes: Theme[] = [];
let reading: ReadingRoom | null = null;

async function boot(): Promise<void> {
  const { projects } = await api.listProjects();
  nav.innerHTML = "";
  const picker = document.createElement("select");
  const blank = document.createElement("option");
  blank.textContent = "choose project…";
  blank.value = "";
  picker.appendChild(blank);
  for (const p of projects) {
    const opt = document.createElement("option");
    opt.value = p.project_id;
    opt.textContent = `${p.name} (${p.project_id})`;
    picker.appendChild(opt);
  }
  picker.addEventListener("change", () => {
    if (picker.value) void openProject(picker.value);
  });
  nav.appendChild(picker);

  const exportLink = document.createElement("a");
  exportLink.textContent = "export bundle";
  exportLink.className = "export-link";
  nav.appendChild(exportLink);

  const runList = document.createElement("ul");
  runList.id = "run-list";
  nav.appendChild(runList);

  const curationButton = document.createElement("button");
  curationButton.textContent = "open curation grid";
  curationButton.addEventListener("click", () => {
    if (!projectId) return;
    const view = new CurationView(content, api, projectId, annotator);
    void view.open();
  });
  nav.appendChild(curationButton);
}

async function openProject(id: string): Promise<void> {
  projectId = id;
  themes = (await api.getThemes(id)).themes;
  (nav.querySelector(".export-link") as HTMLAnchorElement).href = api.exportUrl(id);
  await refreshRuns();
}

async function refreshRuns(): Promise<void> {
  if (!projectId) return;
  const { runs } = await api.listRuns(projectId);
  const list = document.getElementById("run-list")!;
  list.innerHTML = "";
  for (const run of runs) {
    const li = document.createElement("li");
    const link = document.createElement("a");
    link.href = "#";
    link.textContent = `${run.run_id} [${run.status}]`;
    link.addEventListener("click", (e) => {
      e.preventDefault();
      void openRun(run);
    });
    li.appendChild(link);
    list.appendChild(li);
  }
  if (runs.some((r) => r.status === "queued" || r.status === "running")) {
    setTimeout(() => void refreshRuns(), 2000);
  }
}

async function openRun(run: RunStatus): Promise<void> {
  if (reading?.dirty() && !window.confirm("Discard unsaved labeling edits?")) {
    return;
  }
  if (run.kind === "sweep" && run.status === "done") {
    const metrics = await api.metrics(run.run_id);
    renderDashboard(content, run.run_id, metrics, (k) => {
      if (!projectId) return;
      void api
        .startRun(projectId, "lda", { K: k })
        .then(() => refreshRuns());
    });
  } else if (run.kind === "lda" && run.status === "done") {
    reading = new ReadingRoom(content, api, themes, annotator, {
      onSaved: () => void refreshRuns(),
    });
    await reading.open(run.run_id, 0);
    const pager = document.createElement("div");
    pager.className = "topic-pager";
    const input = document.createElement("input");
    input.type = "number";
    input.min = "0";
    input.value = "0";
    const go = document.createElement("button");
    go.textContent = "open topic";
    go.addEventListener("click", () => {
      void reading?.open(run.run_id, Number(input.value));
    });
    pager.append(input, go);
    content.prepend(pager);
  } else if (run.kind === "qdtm" && run.status === "done") {
    const view = new CurationView(content, api, projectId!, annotator);
    await view.open();
  } else {
    content.innerHTML = `<p>run ${run.run_id}: ${run.status}${
      run.error ? ` — ${run.error}` : ""
    }</p>`;
  }
}

window.addEventListener("beforeunload", (e) => {
  if (reading?.dirty()) e.preventDefault();
});

void boot();
