// Typed client for the workbench HTTP API. Every mutating method maps to
// exactly one documented endpoint; the UI never mutates state another way.

export interface ProjectInfo {
  project_id: string;
  name: string;
  created_at: string;
  corpus_digest: string | null;
}

export interface RunStatus {
  run_id: string;
  project_id: string;
  kind: "lda" | "sweep" | "qdtm";
  status: "queued" | "running" | "done" | "failed";
  params: Record<string, unknown>;
  error: string | null;
  result: Record<string, any> | null;
}

export interface Theme {
  theme_id: number;
  label: string;
  description: string;
  comparable: boolean;
}

export interface TermWeight {
  term: string;
  weight: number;
}

export interface HighlightSpan {
  term: string;
  start: number;
  end: number;
}

export interface TopicDocument {
  doc_id: number;
  source_id: string;
  weight: number;
  text: string;
  highlights: HighlightSpan[];
}

export interface LabelingRecord {
  labels: string[];
  theme_refs: number[];
  excluded_terms: string[];
  annotator: string;
  timestamp: string;
  revision: string;
}

export interface TopicView {
  run_id: string;
  topic_id: number;
  n_topics: number;
  terms: TermWeight[];
  documents: TopicDocument[];
  labeling: LabelingRecord | null;
}

export interface MetricPoint {
  K: number;
  value: number;
  normalized: number;
}

export interface MetricsPayload {
  rows: {
    K: number;
    cao: number | null;
    arun: number | null;
    umass: number | null;
    c_v: number | null;
    status: string;
    error?: string | null;
  }[];
  normalized_curves: Record<string, MetricPoint[]>;
  selection?: { recommended_k: number; report: Record<string, any>[] };
}

export interface LedgerRow {
  key: string;
  label: string;
  theme_id: number | null;
  common: string[];
  unique_a: string[];
  unique_b: string[];
  proposed: string[];
}

export interface LedgerPayload {
  ledger: { run_a: string; run_b: string; rows: LedgerRow[] };
  selections: Record<string, { excluded_terms: string[]; revision: string }>;
}

export interface HierarchyNode {
  node_id: string;
  label: string;
  top_terms: TermWeight[];
  doc_ids: number[];
  c_v: number | null;
  judgment: unknown;
  children: HierarchyNode[];
}

export interface HierarchyPayload {
  mains: HierarchyNode[];
  unmodelable: { label: string; reason: string }[];
}

export interface CompareReport {
  detected_themes: number[];
  missing_themes: number[];
  novel_topics: string[];
  final_topic_count: number;
  per_run: Record<string, { detected: number[]; novel: string[] }>;
  theme_labels: Record<string, string>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public field?: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const url = `${this.base}/api/v1${path}`;
    let resp: Response;
    try {
      resp = await fetch(url, init);
    } catch (err) {
      const method = init?.method ?? "GET";
      if (method !== "GET") throw err;
      // a pooled keep-alive socket the server already closed surfaces as
      // a network error; browsers retry idempotent requests, so do we
      await new Promise((r) => setTimeout(r, 250));
      resp = await fetch(url, init);
    }
    if (!resp.ok) {
      let body: any = {};
      try {
        body = await resp.json();
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(
        resp.status,
        body.code ?? "http_error",
        body.message ?? resp.statusText,
        body.field,
      );
    }
    return (await resp.json()) as T;
  }

  private json(method: string, payload: unknown): RequestInit {
    return {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    };
  }

  listProjects(): Promise<{ projects: ProjectInfo[] }> {
    return this.request("/projects");
  }

  createProject(name: string): Promise<ProjectInfo> {
    return this.request("/projects", this.json("POST", { name }));
  }

  getProject(id: string): Promise<ProjectInfo & { runs: RunStatus[] }> {
    return this.request(`/projects/${id}`);
  }

  getThemes(id: string): Promise<{ themes: Theme[] }> {
    return this.request(`/projects/${id}/themes`);
  }

  uploadCorpus(
    id: string,
    file: Blob,
    filename: string,
    preprocess?: Record<string, unknown>,
  ): Promise<{ digest: string; n_docs: number; vocab_size: number }> {
    const form = new FormData();
    form.append("file", file, filename);
    if (preprocess) form.append("preprocess", JSON.stringify(preprocess));
    return this.request(`/projects/${id}/corpus`, { method: "POST", body: form });
  }

  startRun(
    id: string,
    kind: string,
    params: Record<string, unknown>,
  ): Promise<{ run_id: string }> {
    return this.request(`/projects/${id}/runs`, this.json("POST", { kind, params }));
  }

  runStatus(runId: string): Promise<RunStatus> {
    return this.request(`/runs/${runId}`);
  }

  listRuns(id: string): Promise<{ runs: RunStatus[] }> {
    return this.request(`/projects/${id}/runs`);
  }

  metrics(runId: string): Promise<MetricsPayload> {
    return this.request(`/runs/${runId}/metrics`);
  }

  topicView(runId: string, topic: number, nTerms = 20, nDocs = 5): Promise<TopicView> {
    return this.request(
      `/runs/${runId}/topics/${topic}?n_terms=${nTerms}&n_docs=${nDocs}`,
    );
  }

  putLabeling(
    runId: string,
    topic: number,
    body: {
      labels: string[];
      theme_refs: number[];
      excluded_terms?: string[];
      annotator?: string;
      revision?: string | null;
    },
  ): Promise<LabelingRecord> {
    return this.request(
      `/runs/${runId}/topics/${topic}/labeling`,
      this.json("PUT", body),
    );
  }

  putJudgment(
    nodeRef: string,
    body: {
      coherent: boolean;
      include: boolean;
      note?: string;
      annotator?: string;
      revision?: string | null;
    },
  ): Promise<{ revision: string }> {
    return this.request(`/nodes/${nodeRef}/judgment`, this.json("PUT", body));
  }

  compare(id: string, runIds: string[]): Promise<CompareReport> {
    return this.request(`/projects/${id}/compare?runs=${runIds.join(",")}`);
  }

  buildLedger(
    id: string,
    body: {
      run_a: string;
      run_b: string;
      top_n?: number;
      proposals?: Record<string, string[]>;
      use_bundled_proposals?: boolean;
    },
  ): Promise<{ rows: LedgerRow[] }> {
    return this.request(`/projects/${id}/ledger`, this.json("POST", body));
  }

  getLedger(id: string): Promise<LedgerPayload> {
    return this.request(`/projects/${id}/ledger`);
  }

  putSelection(
    id: string,
    rowKey: string,
    body: { excluded_terms: string[]; annotator?: string; revision?: string | null },
  ): Promise<{ revision: string }> {
    return this.request(
      `/projects/${id}/ledger/${rowKey}/selection`,
      this.json("PUT", body),
    );
  }

  startQdtm(
    id: string,
    body: {
      queries?: { label: string; terms: string[] }[] | null;
      from_ledger?: boolean;
      config?: Record<string, unknown>;
    },
  ): Promise<{ run_id: string }> {
    return this.request(`/projects/${id}/qdtm`, this.json("POST", body));
  }

  hierarchy(runId: string): Promise<HierarchyPayload> {
    return this.request(`/runs/${runId}/hierarchy`);
  }

  queries(id: string): Promise<{ queries: { label: string; terms: string[] }[] }> {
    return this.request(`/projects/${id}/queries`);
  }

  judgments(id: string): Promise<{ judgments: Record<string, Record<string, any>> }> {
    return this.request(`/projects/${id}/judgments`);
  }

  exportUrl(id: string): string {
    return `${this.base}/api/v1/projects/${id}/export`;
  }

  /** Poll a run until it settles; interval backs off toward maxMs. */
  async waitForRun(
    runId: string,
    onTick?: (s: RunStatus) => void,
    baseMs = 2000,
    maxMs = 10000,
  ): Promise<RunStatus> {
    let delay = baseMs;
    for (;;) {
      const status = await this.runStatus(runId);
      onTick?.(status);
      if (status.status === "done" || status.status === "failed") return status;
      await new Promise((r) => setTimeout(r, delay));
      delay = Math.min(maxMs, delay * 1.5);
    }
  }
}
