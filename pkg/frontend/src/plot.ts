// PlotSpec renderer: one JSON document in, one SVG string out.  Series
// follow the service conventions: "edges"/"counts" describe a histogram
// (one more edge than counts), every other series comes as <name>_x /
// <name>_y pairs.  Prefixes carry meaning: data is drawn as circles
// (step line for ecdf kind), fit as a solid line, ref as a dashed line,
// knot as squares.  Unrecognised prefixes (timeseries metrics) become
// plain lines with a legend entry.

import { SCHEMA_VERSION, PlotDoc } from "./types.js";

export class PlotError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PlotError";
  }
}

export const PLOT_KINDS = [
  "density_fit",
  "cdf_fit",
  "qq",
  "pp",
  "ecdf",
  "log_histogram",
  "spline_cdf",
  "timeseries",
] as const;

type Scale = "linear" | "log";
type Mark = "bars" | "points" | "line" | "dashed" | "squares" | "step";

interface Shape {
  mark: Mark;
  label: string;
  x: number[];
  y: number[];
}

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { left: 60, right: 16, top: 30, bottom: 44 };
const PALETTE = ["#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377"];

function isNumberArray(v: unknown): v is number[] {
  return Array.isArray(v) && v.every((x) => typeof x === "number");
}

/** Structural check; throws PlotError with a reason instead of misdrawing. */
export function parsePlotDoc(doc: unknown): PlotDoc {
  if (typeof doc !== "object" || doc === null) throw new PlotError("plot payload is not an object");
  const d = doc as Record<string, unknown>;
  if (d.schema_version !== SCHEMA_VERSION) {
    throw new PlotError(
      `plot has schema_version ${String(d.schema_version)}, this console renders ${SCHEMA_VERSION}`,
    );
  }
  if (typeof d.kind !== "string" || !(PLOT_KINDS as readonly string[]).includes(d.kind)) {
    throw new PlotError(`unknown plot kind ${JSON.stringify(d.kind)}`);
  }
  if (typeof d.series !== "object" || d.series === null) throw new PlotError("plot has no series");
  for (const [name, values] of Object.entries(d.series as Record<string, unknown>)) {
    if (!isNumberArray(values)) throw new PlotError(`series ${name} is not a number array`);
  }
  if (d.x_scale !== "linear" && d.x_scale !== "log") throw new PlotError("bad x_scale");
  if (d.y_scale !== "linear" && d.y_scale !== "log") throw new PlotError("bad y_scale");
  const labels = d.labels as Record<string, unknown> | null;
  if (typeof labels !== "object" || labels === null) throw new PlotError("plot has no labels");
  return d as unknown as PlotDoc;
}

const zOrder: Record<Mark, number> = { bars: 0, dashed: 1, line: 2, step: 3, points: 4, squares: 5 };

function classify(doc: PlotDoc): Shape[] {
  const series = doc.series;
  const shapes: Shape[] = [];
  if ("edges" in series || "counts" in series) {
    const edges = series.edges ?? [];
    const counts = series.counts ?? [];
    if (edges.length !== counts.length + 1) {
      throw new PlotError(`histogram has ${edges.length} edges for ${counts.length} counts`);
    }
    if (counts.length > 0) shapes.push({ mark: "bars", label: "counts", x: edges, y: counts });
  }
  for (const name of Object.keys(series)) {
    if (!name.endsWith("_x")) continue;
    const prefix = name.slice(0, -2);
    const x = series[name] ?? [];
    const y = series[prefix + "_y"];
    if (y === undefined) throw new PlotError(`series ${name} has no ${prefix}_y mate`);
    if (x.length === 0) continue;
    let mark: Mark;
    if (prefix === "data") mark = doc.kind === "ecdf" ? "step" : "points";
    else if (prefix === "fit") mark = "line";
    else if (prefix === "ref") mark = "dashed";
    else if (prefix === "knot") mark = "squares";
    else mark = "line";
    shapes.push({ mark, label: prefix, x, y });
  }
  shapes.sort((a, b) => zOrder[a.mark] - zOrder[b.mark]);
  return shapes;
}

interface Mapper {
  (v: number): number;
  min: number;
  max: number;
  ticks: number[];
}

function niceStep(span: number): number {
  const raw = span / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const unit = raw / mag;
  const step = unit >= 5 ? 5 : unit >= 2 ? 2 : 1;
  return step * mag;
}

function linearTicks(lo: number, hi: number): number[] {
  if (hi <= lo) return [lo];
  const step = niceStep(hi - lo);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let k = Math.ceil(Math.log10(lo) - 1e-9); ; k += 1) {
    const v = Math.pow(10, k);
    if (v > hi * (1 + 1e-9)) break;
    ticks.push(v);
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

function makeMapper(values: number[], scale: Scale, pxLo: number, pxHi: number): Mapper {
  const usable = values.filter((v) => Number.isFinite(v) && (scale === "linear" || v > 0));
  let lo = usable.length > 0 ? Math.min(...usable) : scale === "log" ? 1 : 0;
  let hi = usable.length > 0 ? Math.max(...usable) : scale === "log" ? 10 : 1;
  if (scale === "log") {
    if (lo === hi) {
      lo /= 2;
      hi *= 2;
    }
    const la = Math.log10(lo);
    const lb = Math.log10(hi);
    const fn = (v: number) => pxLo + ((Math.log10(v) - la) / (lb - la)) * (pxHi - pxLo);
    return Object.assign(fn, { min: lo, max: hi, ticks: logTicks(lo, hi) });
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * 0.04;
  lo -= pad;
  hi += pad;
  const fn = (v: number) => pxLo + ((v - lo) / (hi - lo)) * (pxHi - pxLo);
  return Object.assign(fn, { min: lo, max: hi, ticks: linearTicks(lo, hi) });
}

function fmtTick(v: number, scale: Scale): string {
  if (scale === "log") {
    const k = Math.round(Math.log10(v));
    return k >= -3 && k <= 4 ? String(v) : `1e${k}`;
  }
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) return v.toExponential(0);
  return String(Number(v.toPrecision(6)));
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function visible(shape: Shape, xs: Scale, ys: Scale): [number, number][] {
  const pts: [number, number][] = [];
  for (let i = 0; i < Math.min(shape.x.length, shape.y.length); i += 1) {
    const x = shape.x[i]!;
    const y = shape.y[i]!;
    if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
    if (xs === "log" && x <= 0) continue;
    if (ys === "log" && y <= 0) continue;
    pts.push([x, y]);
  }
  return pts;
}

function polyline(pts: [number, number][], fx: Mapper, fy: Mapper): string {
  return pts.map(([x, y]) => `${fx(x).toFixed(1)},${fy(y).toFixed(1)}`).join(" ");
}

function stepPath(pts: [number, number][], fx: Mapper, fy: Mapper): string {
  // step-post: hold each value until the next x
  const parts: string[] = [];
  pts.forEach(([x, y], i) => {
    const px = fx(x).toFixed(1);
    const py = fy(y).toFixed(1);
    if (i === 0) parts.push(`M${px},${py}`);
    else parts.push(`H${px}`, `V${py}`);
  });
  return parts.join(" ");
}

function renderShape(shape: Shape, color: string, fx: Mapper, fy: Mapper, xs: Scale, ys: Scale): string {
  const pts = visible(shape, xs, ys);
  if (pts.length === 0) return "";
  const cls = `series series-${shape.mark}`;
  switch (shape.mark) {
    case "bars": {
      // shape.x holds bin edges, shape.y the counts
      const rects: string[] = [];
      for (let i = 0; i < shape.y.length; i += 1) {
        const x0 = shape.x[i]!;
        const x1 = shape.x[i + 1]!;
        const c = shape.y[i]!;
        if (xs === "log" && x0 <= 0) continue;
        if (ys === "log" && c <= 0) continue;
        const left = fx(x0);
        const top = fy(c);
        const base = ys === "log" ? fy(fy.min) : fy(Math.max(0, fy.min));
        rects.push(
          `<rect x="${left.toFixed(1)}" y="${top.toFixed(1)}" ` +
            `width="${(fx(x1) - left).toFixed(1)}" height="${(base - top).toFixed(1)}"/>`,
        );
      }
      return `<g class="${cls}" fill="${color}" fill-opacity="0.45" stroke="${color}">${rects.join("")}</g>`;
    }
    case "points": {
      const dots = pts
        .map(([x, y]) => `<circle cx="${fx(x).toFixed(1)}" cy="${fy(y).toFixed(1)}" r="3"/>`)
        .join("");
      return `<g class="${cls}" fill="${color}" fill-opacity="0.7" stroke="none">${dots}</g>`;
    }
    case "squares": {
      const boxes = pts
        .map(([x, y]) => `<rect x="${(fx(x) - 3).toFixed(1)}" y="${(fy(y) - 3).toFixed(1)}" width="6" height="6"/>`)
        .join("");
      return `<g class="${cls}" fill="${color}" stroke="none">${boxes}</g>`;
    }
    case "step":
      return `<path class="${cls}" d="${stepPath(pts, fx, fy)}" fill="none" stroke="${color}" stroke-width="1.6"/>`;
    case "dashed":
      return (
        `<polyline class="${cls}" points="${polyline(pts, fx, fy)}" fill="none" ` +
        `stroke="${color}" stroke-width="1.4" stroke-dasharray="6 4"/>`
      );
    case "line":
      return (
        `<polyline class="${cls}" points="${polyline(pts, fx, fy)}" fill="none" ` +
        `stroke="${color}" stroke-width="1.8"/>`
      );
  }
}

function legend(entries: { label: string; color: string }[]): string {
  const rows = entries.map((e, i) => {
    const y = MARGIN.top + 10 + i * 18;
    const x = WIDTH - MARGIN.right - 120;
    return (
      `<rect x="${x}" y="${y - 8}" width="14" height="10" fill="${e.color}"/>` +
      `<text x="${x + 20}" y="${y}" class="legend-label">${esc(e.label)}</text>`
    );
  });
  return `<g class="legend">${rows.join("")}</g>`;
}

function axes(fx: Mapper, fy: Mapper, xs: Scale, ys: Scale, labels: PlotDoc["labels"]): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const parts: string[] = [
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" class="axis"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" class="axis"/>`,
  ];
  for (const t of fx.ticks) {
    const px = fx(t).toFixed(1);
    parts.push(
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" class="axis"/>`,
      `<text x="${px}" y="${y0 + 18}" class="tick tick-x">${esc(fmtTick(t, xs))}</text>`,
    );
  }
  for (const t of fy.ticks) {
    const py = fy(t).toFixed(1);
    parts.push(
      `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" class="axis"/>`,
      `<text x="${x0 - 8}" y="${py}" class="tick tick-y">${esc(fmtTick(t, ys))}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 8}" class="axis-label">${esc(labels.x)}</text>`,
    `<text x="14" y="${(y0 + y1) / 2}" class="axis-label" transform="rotate(-90 14 ${(y0 + y1) / 2})">${esc(labels.y)}</text>`,
    `<text x="${(x0 + x1) / 2}" y="18" class="title">${esc(labels.title)}</text>`,
  );
  return parts.join("");
}

/** Render a PlotSpec document to a standalone SVG string. */
export function renderPlot(rawDoc: unknown): string {
  const doc = parsePlotDoc(rawDoc);
  const shapes = classify(doc);
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
    `class="plot plot-${doc.kind}" data-kind="${doc.kind}" ` +
    `data-x-scale="${doc.x_scale}" data-y-scale="${doc.y_scale}">`;
  if (shapes.length === 0) {
    return (
      head +
      `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" class="empty">no data</text>` +
      `<text x="${WIDTH / 2}" y="18" class="title">${esc(doc.labels.title)}</text></svg>`
    );
  }
  const xsAll: number[] = [];
  const ysAll: number[] = [];
  for (const s of shapes) {
    xsAll.push(...s.x);
    ysAll.push(...s.y);
  }
  const fx = makeMapper(xsAll, doc.x_scale, MARGIN.left, WIDTH - MARGIN.right);
  const fy = makeMapper(ysAll, doc.y_scale, HEIGHT - MARGIN.bottom, MARGIN.top);
  const body = shapes
    .map((s, i) => renderShape(s, PALETTE[i % PALETTE.length]!, fx, fy, doc.x_scale, doc.y_scale))
    .join("");
  const lineShapes = shapes.filter((s) => s.mark === "line" || s.mark === "step");
  const withLegend =
    lineShapes.length >= 2
      ? legend(lineShapes.map((s) => ({ label: s.label, color: PALETTE[shapes.indexOf(s) % PALETTE.length]! })))
      : "";
  return head + axes(fx, fy, doc.x_scale, doc.y_scale, doc.labels) + body + withLegend + "</svg>";
}

/**
 * Build a timeseries PlotSpec from fetched metric series, e.g. a real
 * run overlaid with its simulated replay.  Rendering stays in renderPlot.
 */
export function timeseriesSpec(
  metric: string,
  runs: { label: string; t: number[]; v: number[] }[],
): PlotDoc {
  const series: Record<string, number[]> = {};
  for (const run of runs) {
    series[`${run.label}_x`] = run.t;
    series[`${run.label}_y`] = run.v;
  }
  return {
    schema_version: SCHEMA_VERSION,
    kind: "timeseries",
    series,
    labels: { title: metric, x: "time (s)", y: metric },
    x_scale: "linear",
    y_scale: "linear",
  };
}
