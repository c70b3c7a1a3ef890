/**
 * The three shipped figure kinds, each a pure mapping from parsed CSV
 * tables to a line-chart configuration:
 *
 *  - "ber-curves":  raw BER vs instantaneous SNR, one curve per
 *                   (scheme, ring ratio, β) found in the inputs;
 *  - "ring-ratio":  raw BER vs ring ratio at a fixed SNR, one curve per β;
 *  - "efficiency":  average spectral efficiency vs mean SNR, one curve
 *                   per (scheme, ring ratio).
 */

import {
  CsvFormatError,
  numberAt,
  requireColumns,
  type Cell,
  type CsvTable,
} from "./csv.js";
import { decadeTicks, formatLinearTick, formatLogTick, rangeTicks } from "./scales.js";
import type { AxisSpec, ChartConfig, Marker, Series } from "./chart.js";

export const FIGURE_KINDS = ["ber-curves", "ring-ratio", "efficiency"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

/** One named CSV input (name is used only for the provenance note). */
export interface FigureInput {
  name: string;
  table: CsvTable;
}

/** Optional axis overrides; defaults depend on the figure kind. */
export interface FigureOptions {
  yMin?: number;
  yMax?: number;
}

/** Raised when inputs or options cannot produce the requested figure. */
export class FigureConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FigureConfigError";
  }
}

const BETA_COLORS: Record<number, string> = {
  1: "#1f77b4",
  2: "#d62728",
  3: "#2ca02c",
  4: "#9467bd",
};
const FALLBACK_COLOR = "#8c564b";

function betaColor(beta: number): string {
  return BETA_COLORS[beta] ?? FALLBACK_COLOR;
}

function schemeName(scheme: Cell | undefined, ringRatio: Cell | undefined): string {
  if (scheme === "dpsk") {
    return "16-DPSK";
  }
  if (scheme === "dapsk") {
    return typeof ringRatio === "number"
      ? `16-DAPSK (R=${formatLinearTick(ringRatio)})`
      : "16-DAPSK";
  }
  return String(scheme);
}

function sourceNote(inputs: FigureInput[]): string {
  const parts = inputs.map(
    (i) => `${i.name}: config_hash=${i.table.meta["config_hash"] ?? "unknown"}`,
  );
  return `source ${parts.join("; ")}`;
}

function logAxis(
  label: string,
  defMin: number,
  defMax: number,
  stepExp: number,
  opts: FigureOptions,
): AxisSpec {
  const lo = opts.yMin ?? defMin;
  const hi = opts.yMax ?? defMax;
  if (!(lo > 0) || !(hi > lo)) {
    throw new FigureConfigError(
      `log axis bounds must satisfy 0 < min < max, got [${lo}, ${hi}]`,
    );
  }
  return {
    label,
    kind: "log",
    domain: [lo, hi],
    ticks: decadeTicks(Math.ceil(Math.log10(lo)), Math.floor(Math.log10(hi)), stepExp),
  };
}

function xExtent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  if (!Number.isFinite(lo) || !(hi > lo)) {
    throw new FigureConfigError("need at least two distinct x values to draw a curve");
  }
  return [lo, hi];
}

/** Group rows into series in first-encounter order of the grouping key. */
function groupSeries(
  tables: CsvTable[],
  keyOf: (row: Record<string, Cell>) => string,
): Map<string, Record<string, Cell>[]> {
  const groups = new Map<string, Record<string, Cell>[]>();
  for (const table of tables) {
    for (const row of table.rows) {
      const key = keyOf(row);
      const bucket = groups.get(key);
      if (bucket === undefined) {
        groups.set(key, [row]);
      } else {
        bucket.push(row);
      }
    }
  }
  return groups;
}

function sortedPoints(
  rows: Record<string, Cell>[],
  xCol: string,
  yCol: string,
): { x: number; y: number }[] {
  return rows
    .map((r) => ({ x: numberAt(r, xCol), y: numberAt(r, yCol) }))
    .sort((a, b) => a.x - b.x);
}

function berCurves(inputs: FigureInput[], opts: FigureOptions): ChartConfig {
  for (const i of inputs) {
    requireColumns(i.table, ["scheme", "variant", "beta", "R", "snr_db", "ber"]);
  }
  const tables = inputs.map((i) => i.table);
  const groups = groupSeries(tables, (row) => {
    const ratio = typeof row["R"] === "number" ? String(row["R"]) : "-";
    return `${String(row["scheme"])}|${ratio}|${String(row["beta"])}`;
  });

  const series: Series[] = [];
  for (const rows of groups.values()) {
    const first = rows[0];
    if (first === undefined) {
      continue;
    }
    const beta = numberAt(first, "beta");
    const isDapsk = first["scheme"] === "dapsk";
    series.push({
      label: `${schemeName(first["scheme"], first["R"])} β=${beta}`,
      points: sortedPoints(rows, "snr_db", "ber"),
      color: betaColor(beta),
      dash: isDapsk ? "6 3" : undefined,
      marker: (isDapsk ? "square" : "circle") as Marker,
    });
  }

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const [xLo, xHi] = xExtent(xs);
  return {
    title: "Raw bit error rate vs instantaneous SNR",
    subtitle:
      "β most-reliable bits decided per 16-ary symbol pair, remaining bits erased",
    x: {
      label: "instantaneous SNR (dB)",
      kind: "linear",
      domain: [xLo, xHi],
      ticks: rangeTicks(xLo, xHi, 5),
    },
    y: logAxis("bit error rate", 1e-7, 1, 1, opts),
    series,
    legend: "top-right",
    sourceNote: sourceNote(inputs),
  };
}

function ringRatio(inputs: FigureInput[], opts: FigureOptions): ChartConfig {
  const input = inputs[0];
  if (inputs.length !== 1 || input === undefined) {
    throw new FigureConfigError("ring-ratio takes exactly one input CSV");
  }
  requireColumns(input.table, ["scheme", "beta", "R", "snr_db", "ber"]);

  const groups = groupSeries([input.table], (row) => String(row["beta"]));
  const series: Series[] = [];
  for (const rows of groups.values()) {
    const first = rows[0];
    if (first === undefined) {
      continue;
    }
    const beta = numberAt(first, "beta");
    series.push({
      label: `β=${beta}`,
      points: sortedPoints(rows, "R", "ber"),
      color: betaColor(beta),
      marker: "circle",
    });
  }

  const ratios = [...new Set(input.table.rows.map((r) => numberAt(r, "R")))].sort(
    (a, b) => a - b,
  );
  const [xLo, xHi] = xExtent(ratios);
  const firstRow = input.table.rows[0];
  const snrDb = firstRow === undefined ? 0 : numberAt(firstRow, "snr_db");
  return {
    title: "Raw bit error rate vs ring ratio",
    subtitle: `16-DAPSK, β most-reliable bits kept, instantaneous SNR ${formatLinearTick(snrDb)} dB`,
    x: {
      label: "ring ratio (outer/inner amplitude)",
      kind: "linear",
      domain: [xLo, xHi],
      ticks: ratios,
    },
    y: logAxis("bit error rate", 1e-18, 1e-2, 2, opts),
    series,
    legend: "bottom-right",
    sourceNote: sourceNote(inputs),
  };
}

function efficiency(inputs: FigureInput[], opts: FigureOptions): ChartConfig {
  const input = inputs[0];
  if (inputs.length !== 1 || input === undefined) {
    throw new FigureConfigError("efficiency takes exactly one input CSV");
  }
  requireColumns(input.table, ["scheme", "R", "target", "avg_snr_db", "se"]);

  const groups = groupSeries([input.table], (row) => {
    const ratio = typeof row["R"] === "number" ? String(row["R"]) : "-";
    return `${String(row["scheme"])}|${ratio}`;
  });
  const palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
  const markers: Marker[] = ["circle", "square", "diamond", "triangle"];
  const series: Series[] = [];
  let idx = 0;
  for (const rows of groups.values()) {
    const first = rows[0];
    if (first === undefined) {
      continue;
    }
    const isDapsk = first["scheme"] === "dapsk";
    series.push({
      label: schemeName(first["scheme"], first["R"]),
      points: sortedPoints(rows, "avg_snr_db", "se"),
      color: palette[idx % palette.length] ?? FALLBACK_COLOR,
      dash: isDapsk ? "6 3" : undefined,
      marker: markers[idx % markers.length] ?? "circle",
    });
    idx += 1;
  }

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const [xLo, xHi] = xExtent(xs);
  const yLo = opts.yMin ?? 0;
  const yHi = opts.yMax ?? 4;
  if (!(yHi > yLo)) {
    throw new FigureConfigError(`axis bounds must satisfy min < max, got [${yLo}, ${yHi}]`);
  }
  const firstRow = input.table.rows[0];
  const target = firstRow === undefined ? null : firstRow["target"];
  const targetLabel = typeof target === "number" ? formatLogTick(target) : "?";
  return {
    title: "Average spectral efficiency vs mean SNR",
    subtitle: `Rayleigh fading, raw BER target ${targetLabel} per decided bit`,
    x: {
      label: "average SNR (dB)",
      kind: "linear",
      domain: [xLo, xHi],
      ticks: rangeTicks(xLo, xHi, 5),
    },
    y: {
      label: "decided bits per symbol pair",
      kind: "linear",
      domain: [yLo, yHi],
      ticks: rangeTicks(yLo, yHi, 0.5),
    },
    series,
    legend: "top-left",
    sourceNote: sourceNote(inputs),
  };
}

/** Build the chart configuration for one figure kind. */
export function buildFigure(
  kind: FigureKind,
  inputs: FigureInput[],
  opts: FigureOptions = {},
): ChartConfig {
  if (inputs.length === 0) {
    throw new FigureConfigError("at least one input CSV is required");
  }
  switch (kind) {
    case "ber-curves":
      return berCurves(inputs, opts);
    case "ring-ratio":
      return ringRatio(inputs, opts);
    case "efficiency":
      return efficiency(inputs, opts);
  }
}

// Re-exported so callers can type tables without importing csv.js directly.
export type { CsvTable };
export { CsvFormatError };
