// Typed client for the session service. The UI performs no analytics of its
// own: every number it renders arrives through one of these calls.

export interface TreeNodeRecord {
  id: string;
  parent: string | null;
  depth: number;
  x0: number;
  x1: number;
  width: number;
  members_count: number;
  color: number;
  color_hex: string;
  is_leaf: boolean;
  labels: string[];
  segments: [number, number, number][]; // [colorIndex, x0, x1]
}

export interface TreeEdgeRecord {
  parent: string;
  child: string;
  x0: number;
  x1: number;
  width: number;
}

export interface TreeRecord {
  revision: number;
  n_samples: number;
  nodes: TreeNodeRecord[];
  edges: TreeEdgeRecord[];
}

export interface HeatmapRecord {
  revision: number;
  samples: string[];
  features: string[];
  column_bands: { leaf: string; color: number; color_hex: string; count: number }[];
  feature_bands: { split: string | null; features: string[] }[];
  values: number[][]; // rows = features in display order
  cmax: number;
}

export interface CurveRecord {
  cluster: string;
  color: number;
  color_hex: string;
  skipped: number;
  n_at_risk_initial: number;
  steps: [number, number][] | null;
}

export interface SurvivalRecord {
  revision: number;
  curves: CurveRecord[];
  baseline: { cluster: string; n_at_risk_initial: number; steps: [number, number][] };
}

export interface BinnedRecord {
  axis: "x" | "y";
  pc: number;
  edges: number[];
  counts: number[];
  features: string[];
  eigenvector: number[];
  means: (number | null)[][]; // rows = features, null marks an empty bin
}

export interface LoadingsRecord {
  features: string[];
  vectors: [number, number][];
  raw_x: number[];
  raw_y: number[];
}

export interface ProjectionRecord {
  revision: number;
  node: string;
  pc_x: number;
  pc_y: number;
  n_components: number;
  explained_variance: number[];
  samples: string[];
  coords: [number, number][];
  bins_x: BinnedRecord;
  bins_y: BinnedRecord;
  loadings: LoadingsRecord;
  cmax: number;
  colors?: string[];
  color_values?: number[];
}

export interface OverlayRecord {
  revision: number;
  legend: { label: string; color: string }[];
  labels: Record<string, string>;
  colors: Record<string, string>;
}

export interface SplitResponse {
  revision: number;
  positive: string;
  negative: string;
  important: {
    sigma_avg: number;
    mu_d: number;
    selected: string[];
    features: { feature: string; mu_a: number; mu_b: number; d: number }[];
  };
}

export interface DatasetSummary {
  revision: number;
  n_samples: number;
  n_features: number;
  label_histogram: Record<string, number>;
  normalization_applied: boolean;
  degenerate_features: string[];
}

export interface LineBody {
  point: [number, number];
  normal: [number, number];
}

export interface ProjectionQuery {
  pcx?: number;
  pcy?: number;
  features?: string[] | null;
  bins?: number;
  colorFeatures?: string[] | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    detail: string,
  ) {
    super(`${errorName}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asError(response: Response): Promise<ApiError> {
  let name = "HttpError";
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      name = body.error;
      detail = String(body.detail ?? "");
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, name, detail);
}

export class Api {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) throw await asError(response);
    return (await response.json()) as T;
  }

  tree(): Promise<TreeRecord> {
    return this.request("/tree");
  }

  heatmap(): Promise<HeatmapRecord> {
    return this.request("/heatmap");
  }

  survival(): Promise<SurvivalRecord> {
    return this.request("/survival");
  }

  overlay(): Promise<OverlayRecord> {
    return this.request("/overlay");
  }

  projection(node: string, query: ProjectionQuery = {}): Promise<ProjectionRecord> {
    const params = new URLSearchParams();
    params.set("pcx", String(query.pcx ?? 0));
    params.set("pcy", String(query.pcy ?? 1));
    if (query.features && query.features.length) params.set("features", query.features.join(","));
    if (query.bins !== undefined) params.set("bins", String(query.bins));
    if (query.colorFeatures && query.colorFeatures.length) {
      params.set("color_features", query.colorFeatures.join(","));
    }
    return this.request(`/nodes/${encodeURIComponent(node)}/projection?${params.toString()}`);
  }

  split(
    node: string,
    body: { pcx: number; pcy: number; features: string[] | null; line: LineBody; revision: number },
  ): Promise<SplitResponse> {
    return this.request(`/nodes/${encodeURIComponent(node)}/split`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  prune(node: string, revision: number): Promise<{ revision: number; removed: string[]; leaves: string[] }> {
    return this.request(`/nodes/${encodeURIComponent(node)}/children`, {
      method: "DELETE",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ revision }),
    });
  }

  uploadDataset(form: FormData): Promise<DatasetSummary> {
    return this.request("/dataset", { method: "POST", body: form });
  }

  exportUrl(): string {
    return `${this.base}/model/export`;
  }
}
