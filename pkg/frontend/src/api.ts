// Typed client for the tracebench service.  Every request stamps the
// schema version and every response is checked against it, so a console
// built for one schema refuses payloads from another instead of
// misrendering them.

import {
  SCHEMA_VERSION,
  CommandDoc,
  CommandRunDoc,
  CompareDoc,
  FitDoc,
  MetricSeriesDoc,
  PlotDoc,
  SimJobDoc,
  StorageDoc,
  TableMetaDoc,
  TablePageDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export class VersionMismatchError extends Error {
  constructor(readonly got: unknown) {
    super(`service speaks schema_version ${String(got)}, this console speaks ${SCHEMA_VERSION}`);
    this.name = "VersionMismatchError";
  }
}

export interface RunCommandRequest {
  storage: string;
  table: string;
  name: string;
  args: string[];
  scriptOverride?: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readDetail(res: Response): Promise<string> {
  try {
    const doc = await res.json();
    if (doc && typeof doc.detail === "object") return JSON.stringify(doc.detail);
    if (doc && doc.detail !== undefined) return String(doc.detail);
  } catch {
    /* non-JSON error body */
  }
  return res.statusText || `HTTP ${res.status}`;
}

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private checkVersion(doc: Record<string, unknown>): void {
    if (doc.schema_version !== SCHEMA_VERSION) throw new VersionMismatchError(doc.schema_version);
  }

  private async request(path: string, init?: RequestInit): Promise<Record<string, unknown>> {
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) throw new ApiError(res.status, await readDetail(res));
    const doc = (await res.json()) as Record<string, unknown>;
    this.checkVersion(doc);
    return doc;
  }

  private get(path: string) {
    return this.request(path);
  }

  private post(path: string, body: Record<string, unknown>, method = "POST") {
    return this.request(path, {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ schema_version: SCHEMA_VERSION, ...body }),
    });
  }

  async listStorages(): Promise<StorageDoc[]> {
    const doc = await this.get("/storages");
    return doc.storages as StorageDoc[];
  }

  async createStorage(name: string, kind: string): Promise<StorageDoc> {
    const doc = await this.post("/storages", { name, kind });
    return { id: doc.id as string, kind: doc.kind as string };
  }

  async listTables(storage: string): Promise<TableMetaDoc[]> {
    const doc = await this.get(`/storages/${encodeURIComponent(storage)}/tables`);
    return doc.tables as TableMetaDoc[];
  }

  /** One page of table rows; paging is a plain GET and never re-runs anything. */
  async tablePage(storage: string, table: string, offset: number, limit: number): Promise<TablePageDoc> {
    const path =
      `/storages/${encodeURIComponent(storage)}/tables/${encodeURIComponent(table)}` +
      `?offset=${offset}&limit=${limit}`;
    return (await this.get(path)) as unknown as TablePageDoc;
  }

  async importCsv(storage: string, file: string, dest: string, hasHeader = false): Promise<TableMetaDoc> {
    const doc = await this.post(`/storages/${encodeURIComponent(storage)}/import`, {
      file,
      dest,
      has_header: hasHeader,
    });
    return doc.meta as TableMetaDoc;
  }

  async runQuery(storage: string, sql: string, dest: string, workers = 1): Promise<TableMetaDoc> {
    const doc = await this.post("/query", { storage, sql, dest, workers });
    return doc.meta as TableMetaDoc;
  }

  async listCommands(): Promise<CommandDoc[]> {
    const doc = await this.get("/commands");
    return doc.commands as CommandDoc[];
  }

  async runCommand(req: RunCommandRequest): Promise<CommandRunDoc> {
    const body: Record<string, unknown> = {
      storage: req.storage,
      table: req.table,
      name: req.name,
      args: req.args,
    };
    if (req.scriptOverride !== undefined) body.script_override = req.scriptOverride;
    return (await this.post("/commands/run", body)) as unknown as CommandRunDoc;
  }

  async fit(storage: string, table: string, column: number, dist: string, intervals = 20): Promise<FitDoc> {
    const doc = await this.post("/fit", { storage, table, column, dist, intervals });
    return doc as unknown as FitDoc;
  }

  async plot(plotId: string): Promise<PlotDoc> {
    return (await this.get(`/plots/${encodeURIComponent(plotId)}`)) as unknown as PlotDoc;
  }

  async submitSimulation(config: Record<string, unknown>, traceOf?: string): Promise<SimJobDoc> {
    const body: Record<string, unknown> = { config };
    if (traceOf !== undefined) body.trace_of = traceOf;
    return (await this.post("/simulations", body)) as unknown as SimJobDoc;
  }

  async listSimulations(): Promise<SimJobDoc[]> {
    const doc = await this.get("/simulations");
    return doc.simulations as SimJobDoc[];
  }

  async simulation(id: string): Promise<SimJobDoc> {
    return (await this.get(`/simulations/${encodeURIComponent(id)}`)) as unknown as SimJobDoc;
  }

  async cancelSimulation(id: string): Promise<SimJobDoc> {
    const res = await this.fetchFn(this.base + `/simulations/${encodeURIComponent(id)}`, {
      method: "DELETE",
    });
    if (!res.ok) throw new ApiError(res.status, await readDetail(res));
    const doc = (await res.json()) as Record<string, unknown>;
    this.checkVersion(doc);
    return doc as unknown as SimJobDoc;
  }

  async metrics(id: string, metric: string): Promise<MetricSeriesDoc> {
    const path = `/simulations/${encodeURIComponent(id)}/metrics?metric=${encodeURIComponent(metric)}`;
    return (await this.get(path)) as unknown as MetricSeriesDoc;
  }

  async compare(a: string, b: string, metric: string, alpha?: number): Promise<CompareDoc> {
    const body: Record<string, unknown> = { a, b, metric };
    if (alpha !== undefined) body.alpha = alpha;
    return (await this.post("/compare", body)) as unknown as CompareDoc;
  }
}
