// Wire types for the tracebench HTTP API.  Field names follow the JSON
// payloads verbatim; every response carries schema_version.

export const SCHEMA_VERSION = 1;

export interface ColumnDoc {
  name: string;
  dtype: string;
}

export interface TableMetaDoc {
  name: string;
  columns: ColumnDoc[];
  row_count: number;
  origin: string;
}

export type Cell = number | string | null;

export interface TablePageDoc {
  meta: TableMetaDoc;
  offset: number;
  limit: number;
  total_rows: number;
  rows: Cell[][];
}

export interface StorageDoc {
  id: string;
  kind: string;
}

export interface CommandDoc {
  name: string;
  param_count: number;
  param_descriptions: string[];
  template: string;
}

export interface CommandRunDoc {
  script: string;
  result: {
    kind: string;
    columns?: ColumnDoc[];
    rows?: Cell[][];
    fit?: Record<string, unknown>;
  };
  plot_ids: string[];
}

export interface PlotDoc {
  schema_version: number;
  kind: string;
  series: Record<string, number[]>;
  labels: { title: string; x: string; y: string };
  x_scale: "linear" | "log";
  y_scale: "linear" | "log";
}

export interface FitDoc {
  fit: Record<string, unknown>;
  plot_ids: string[];
}

export interface SimJobDoc {
  id: string;
  status: "queued" | "running" | "done" | "failed" | "cancelled";
  mode: string;
  horizon: number;
  seed: number;
  dt: number;
  error?: string;
  n_events?: number;
}

export interface MetricSeriesDoc {
  id: string;
  metric: string;
  t: number[];
  v: number[];
  dt: number;
}

export interface CompareDoc {
  metric: string;
  rmse: number;
  pearson_r: number;
  max_abs_diff: number;
  n_samples: number;
}
