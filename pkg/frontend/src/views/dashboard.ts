// Sweep dashboard: the four metric curves on a shared K axis with a
// normalized overlay toggle and the rank-sum recommendation marked.
// Values are rendered verbatim from the API payload (including the
// normalized curves) — nothing is recomputed client-side.

import type { MetricsPayload } from "../api.js";

const METRICS = ["cao", "arun", "umass", "c_v"] as const;
const COLORS: Record<string, string> = {
  cao: "#c0392b",
  arun: "#8e44ad",
  umass: "#2471a3",
  c_v: "#1e8449",
};

export function renderDashboard(
  root: HTMLElement,
  runId: string,
  payload: MetricsPayload,
  onTrainAt: (k: number) => void,
): void {
  root.innerHTML = "";
  const title = document.createElement("h2");
  title.textContent = `Sweep ${runId}`;
  root.appendChild(title);

  const recommended = payload.selection?.recommended_k ?? null;
  if (recommended !== null) {
    const p = document.createElement("p");
    p.className = "recommendation";
    p.textContent = `Rank-sum recommendation: K = ${recommended} (click any K to train a full model there)`;
    root.appendChild(p);
  }

  const toggle = document.createElement("label");
  toggle.className = "overlay-toggle";
  const box = document.createElement("input");
  box.type = "checkbox";
  box.checked = true;
  toggle.append(box, document.createTextNode(" normalized overlay"));
  root.appendChild(toggle);

  const svgHolder = document.createElement("div");
  root.appendChild(svgHolder);

  const draw = () => {
    svgHolder.innerHTML = "";
    svgHolder.appendChild(
      drawCurves(payload, box.checked, recommended, onTrainAt),
    );
  };
  box.addEventListener("change", draw);
  draw();

  const failed = payload.rows.filter((r) => r.status !== "ok");
  if (failed.length) {
    const note = document.createElement("p");
    note.className = "failed-note";
    note.textContent = `Failed rows (rendered as gaps): ${failed
      .map((r) => `K=${r.K}`)
      .join(", ")}`;
    root.appendChild(note);
  }
}

function drawCurves(
  payload: MetricsPayload,
  normalized: boolean,
  recommended: number | null,
  onTrainAt: (k: number) => void,
): SVGSVGElement {
  const W = 760;
  const H = 340;
  const pad = 42;
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "sweep-chart");

  const ks = payload.rows.filter((r) => r.status === "ok").map((r) => r.K);
  if (!ks.length) return svg;
  const kMin = Math.min(...ks);
  const kMax = Math.max(...ks);
  const x = (k: number) =>
    pad + ((k - kMin) / Math.max(kMax - kMin, 1)) * (W - 2 * pad);

  for (const name of METRICS) {
    const curve = payload.normalized_curves[name] ?? [];
    if (!curve.length) continue;
    const values = curve.map((p) => (normalized ? p.normalized : p.value));
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const y = (v: number) =>
      H - pad - ((v - lo) / Math.max(hi - lo, 1e-12)) * (H - 2 * pad);
    const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
    path.setAttribute(
      "d",
      curve
        .map(
          (p, i) =>
            `${i === 0 ? "M" : "L"}${x(p.K).toFixed(1)},${y(
              normalized ? p.normalized : p.value,
            ).toFixed(1)}`,
        )
        .join(" "),
    );
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", COLORS[name]);
    path.setAttribute("stroke-width", "2");
    svg.appendChild(path);
    for (const p of curve) {
      const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
      dot.setAttribute("cx", x(p.K).toFixed(1));
      dot.setAttribute("cy", y(normalized ? p.normalized : p.value).toFixed(1));
      dot.setAttribute("r", "3.4");
      dot.setAttribute("fill", COLORS[name]);
      dot.setAttribute("class", "curve-dot");
      const tip = document.createElementNS("http://www.w3.org/2000/svg", "title");
      tip.textContent = `${name} @ K=${p.K}: ${p.value}`;
      dot.appendChild(tip);
      dot.addEventListener("click", () => onTrainAt(p.K));
      svg.appendChild(dot);
    }
  }

  if (recommended !== null) {
    const line = document.createElementNS("http://www.w3.org/2000/svg", "line");
    line.setAttribute("x1", x(recommended).toFixed(1));
    line.setAttribute("x2", x(recommended).toFixed(1));
    line.setAttribute("y1", String(pad / 2));
    line.setAttribute("y2", String(H - pad));
    line.setAttribute("stroke", "#111");
    line.setAttribute("stroke-dasharray", "5 4");
    svg.appendChild(line);
    const label = document.createElementNS("http://www.w3.org/2000/svg", "text");
    label.setAttribute("x", (x(recommended) + 5).toFixed(1));
    label.setAttribute("y", String(pad));
    label.textContent = `K*=${recommended}`;
    svg.appendChild(label);
  }

  for (const k of ks) {
    if ((k - kMin) % Math.max(1, Math.floor((kMax - kMin) / 13)) !== 0) continue;
    const t = document.createElementNS("http://www.w3.org/2000/svg", "text");
    t.setAttribute("x", x(k).toFixed(1));
    t.setAttribute("y", String(H - pad / 3));
    t.setAttribute("text-anchor", "middle");
    t.setAttribute("class", "axis-label");
    t.textContent = String(k);
    svg.appendChild(t);
  }

  let lx = pad;
  for (const name of METRICS) {
    const t = document.createElementNS("http://www.w3.org/2000/svg", "text");
    t.setAttribute("x", String(lx));
    t.setAttribute("y", "14");
    t.setAttribute("fill", COLORS[name]);
    t.textContent = name;
    svg.appendChild(t);
    lx += 70;
  }
  return svg;
}
