/**
 * Generic line chart rendered to an SVG string.  Pure function of its
 * configuration: no ids, no dates, no environment lookups, so equal inputs
 * yield byte-identical output.
 */

import { el, esc, fmt, text } from "./svg.js";
import {
  formatLinearTick,
  formatLogTick,
  makeScale,
  type ScaleKind,
} from "./scales.js";

export interface Point {
  x: number;
  y: number;
}

export type Marker = "circle" | "square" | "diamond" | "triangle" | "none";

export interface Series {
  label: string;
  points: Point[];
  color: string;
  /** SVG dash pattern (e.g. "6 3"); solid when omitted. */
  dash?: string;
  marker: Marker;
}

export interface AxisSpec {
  label: string;
  kind: ScaleKind;
  domain: [number, number];
  ticks: number[];
}

export type LegendCorner = "top-right" | "top-left" | "bottom-right" | "bottom-left";

export interface ChartConfig {
  title: string;
  subtitle?: string;
  x: AxisSpec;
  y: AxisSpec;
  series: Series[];
  legend: LegendCorner;
  /** Provenance line embedded in the SVG <desc> element. */
  sourceNote?: string;
  width?: number;
  height?: number;
}

const MARGIN = { top: 64, right: 24, bottom: 56, left: 76 } as const;
const FONT = "Helvetica, Arial, sans-serif";

function inDomain(v: number, domain: readonly [number, number], kind: ScaleKind): boolean {
  if (!Number.isFinite(v)) {
    return false;
  }
  if (kind === "log" && v <= 0) {
    return false;
  }
  const lo = Math.min(domain[0], domain[1]);
  const hi = Math.max(domain[0], domain[1]);
  return v >= lo && v <= hi;
}

/** Split a point list into runs of consecutive in-domain points. */
export function visibleRuns(
  points: readonly Point[],
  x: AxisSpec,
  y: AxisSpec,
): Point[][] {
  const runs: Point[][] = [];
  let current: Point[] = [];
  for (const p of points) {
    if (inDomain(p.x, x.domain, x.kind) && inDomain(p.y, y.domain, y.kind)) {
      current.push(p);
    } else if (current.length > 0) {
      runs.push(current);
      current = [];
    }
  }
  if (current.length > 0) {
    runs.push(current);
  }
  return runs;
}

function markerGlyph(marker: Marker, cx: number, cy: number, color: string): string {
  const r = 3.2;
  switch (marker) {
    case "circle":
      return el("circle", { cx, cy, r, fill: color });
    case "square":
      return el("rect", {
        x: cx - 2.8,
        y: cy - 2.8,
        width: 5.6,
        height: 5.6,
        fill: color,
      });
    case "diamond":
      return el("polygon", {
        points: `${fmt(cx)},${fmt(cy - 3.8)} ${fmt(cx + 3.8)},${fmt(cy)} ${fmt(cx)},${fmt(cy + 3.8)} ${fmt(cx - 3.8)},${fmt(cy)}`,
        fill: color,
      });
    case "triangle":
      return el("polygon", {
        points: `${fmt(cx)},${fmt(cy - 3.6)} ${fmt(cx + 3.4)},${fmt(cy + 2.9)} ${fmt(cx - 3.4)},${fmt(cy + 2.9)}`,
        fill: color,
      });
    case "none":
      return "";
  }
}

function tickLabel(kind: ScaleKind, v: number): string {
  return kind === "log" ? formatLogTick(v) : formatLinearTick(v);
}

export function renderLineChart(cfg: ChartConfig): string {
  const width = cfg.width ?? 760;
  const height = cfg.height ?? 520;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = MARGIN.top;
  const y1 = height - MARGIN.bottom;

  const sx = makeScale(cfg.x.kind, cfg.x.domain, [x0, x1]);
  const sy = makeScale(cfg.y.kind, cfg.y.domain, [y1, y0]);

  const parts: string[] = [];
  parts.push(el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }));
  if (cfg.sourceNote !== undefined) {
    parts.push(el("desc", {}, esc(cfg.sourceNote)));
  }

  parts.push(
    text(
      {
        x: width / 2,
        y: 27,
        "text-anchor": "middle",
        "font-family": FONT,
        "font-size": 17,
        "font-weight": "bold",
        fill: "#111111",
      },
      cfg.title,
    ),
  );
  if (cfg.subtitle !== undefined) {
    parts.push(
      text(
        {
          x: width / 2,
          y: 47,
          "text-anchor": "middle",
          "font-family": FONT,
          "font-size": 12.5,
          fill: "#444444",
        },
        cfg.subtitle,
      ),
    );
  }

  // Grid lines.
  for (const t of cfg.x.ticks) {
    const gx = sx(t);
    parts.push(el("line", { x1: gx, y1: y0, x2: gx, y2: y1, stroke: "#dddddd", "stroke-width": 1 }));
  }
  for (const t of cfg.y.ticks) {
    const gy = sy(t);
    parts.push(el("line", { x1: x0, y1: gy, x2: x1, y2: gy, stroke: "#dddddd", "stroke-width": 1 }));
  }

  // Plot frame.
  parts.push(
    el("rect", {
      x: x0,
      y: y0,
      width: x1 - x0,
      height: y1 - y0,
      fill: "none",
      stroke: "#333333",
      "stroke-width": 1,
    }),
  );

  // Tick labels.
  for (const t of cfg.x.ticks) {
    parts.push(
      text(
        {
          x: sx(t),
          y: y1 + 18,
          "text-anchor": "middle",
          "font-family": FONT,
          "font-size": 11.5,
          fill: "#222222",
        },
        tickLabel(cfg.x.kind, t),
      ),
    );
  }
  for (const t of cfg.y.ticks) {
    parts.push(
      text(
        {
          x: x0 - 8,
          y: sy(t) + 4,
          "text-anchor": "end",
          "font-family": FONT,
          "font-size": 11.5,
          fill: "#222222",
        },
        tickLabel(cfg.y.kind, t),
      ),
    );
  }

  // Axis titles.
  parts.push(
    text(
      {
        x: (x0 + x1) / 2,
        y: y1 + 40,
        "text-anchor": "middle",
        "font-family": FONT,
        "font-size": 13,
        fill: "#111111",
      },
      cfg.x.label,
    ),
  );
  parts.push(
    text(
      {
        x: x0 - 56,
        y: (y0 + y1) / 2,
        "text-anchor": "middle",
        "font-family": FONT,
        "font-size": 13,
        fill: "#111111",
        transform: `rotate(-90 ${fmt(x0 - 56)} ${fmt((y0 + y1) / 2)})`,
      },
      cfg.y.label,
    ),
  );

  // Series.
  for (const s of cfg.series) {
    const runs = visibleRuns(s.points, cfg.x, cfg.y);
    for (const run of runs) {
      if (run.length >= 2) {
        const pts = run.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
        const attrs: Record<string, string | number> = {
          points: pts,
          fill: "none",
          stroke: s.color,
          "stroke-width": 1.8,
        };
        if (s.dash !== undefined) {
          attrs["stroke-dasharray"] = s.dash;
        }
        parts.push(el("polyline", attrs));
      }
      for (const p of run) {
        const glyph = markerGlyph(s.marker, sx(p.x), sy(p.y), s.color);
        if (glyph !== "") {
          parts.push(glyph);
        }
      }
    }
  }

  // Legend.
  if (cfg.series.length > 0) {
    const rowH = 17;
    const sample = 26;
    const pad = 9;
    const labelPx = Math.max(...cfg.series.map((s) => s.label.length)) * 6.4;
    const boxW = pad + sample + 7 + labelPx + pad;
    const boxH = pad * 2 + rowH * cfg.series.length - 5;
    const inset = 10;
    const bx = cfg.legend.endsWith("left") ? x0 + inset : x1 - inset - boxW;
    const by = cfg.legend.startsWith("top") ? y0 + inset : y1 - inset - boxH;

    const legendParts: string[] = [
      el("rect", {
        x: bx,
        y: by,
        width: boxW,
        height: boxH,
        fill: "#ffffff",
        "fill-opacity": 0.88,
        stroke: "#999999",
        "stroke-width": 1,
      }),
    ];
    cfg.series.forEach((s, i) => {
      const cy = by + pad + 4 + i * rowH;
      const lineAttrs: Record<string, string | number> = {
        x1: bx + pad,
        y1: cy,
        x2: bx + pad + sample,
        y2: cy,
        stroke: s.color,
        "stroke-width": 1.8,
      };
      if (s.dash !== undefined) {
        lineAttrs["stroke-dasharray"] = s.dash;
      }
      legendParts.push(el("line", lineAttrs));
      const glyph = markerGlyph(s.marker, bx + pad + sample / 2, cy, s.color);
      if (glyph !== "") {
        legendParts.push(glyph);
      }
      legendParts.push(
        text(
          {
            x: bx + pad + sample + 7,
            y: cy + 4,
            "font-family": FONT,
            "font-size": 12,
            fill: "#111111",
          },
          s.label,
        ),
      );
    });
    parts.push(...legendParts);
  }

  const body = parts.join("\n  ");
  return `${el(
    "svg",
    {
      xmlns: "http://www.w3.org/2000/svg",
      viewBox: `0 0 ${width} ${height}`,
      width,
      height,
      role: "img",
    },
    `\n  ${body}\n`,
  )}\n`;
}
