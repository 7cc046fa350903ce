import { readTable, SchemaError, Table } from "./csv.js";
import {
  boxStats,
  cdfPoints,
  column,
  mean,
  normalizedBars,
  sweepSeries,
  Point,
} from "./data.js";
import * as svg from "./svg.js";

export const KINDS = [
  "cdf",
  "bars",
  "sweep",
  "utilization",
  "wait",
  "overhead",
] as const;
export type Kind = (typeof KINDS)[number];

export interface LabeledInput {
  label: string;
  path: string;
}

function nonEmpty(table: Table, path: string): Table {
  if (table.rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return table;
}

function loadEach(
  inputs: LabeledInput[],
  required: string[],
): { label: string; table: Table }[] {
  return inputs.map(({ label, path }) => ({
    label,
    table: nonEmpty(readTable(path, required), path),
  }));
}

function overlaidLines(
  series: { label: string; points: Point[] }[],
  xLabel: string,
  yLabel: string,
  title: string,
  yDomain?: [number, number],
): string {
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  const x = svg.xScale(svg.extent(xs));
  const y = svg.yScale(yDomain ?? svg.extent(ys));
  const body = [
    svg.axes(x, y, xLabel, yLabel, title),
    ...series.map((s, i) =>
      svg.polyline(s.points, x, y, svg.PALETTE[i % svg.PALETTE.length]),
    ),
    svg.legend(series.map((s) => s.label)),
  ].join("\n");
  return svg.document(body);
}

/** Overlaid empirical JCT CDFs, one step line per jobs.csv. */
export function plotCdf(inputs: LabeledInput[]): string {
  const loaded = loadEach(inputs, ["jct_s"]);
  const series = loaded.map(({ label, table }) => ({
    label,
    points: cdfPoints(column(table, "jct_s")),
  }));
  return overlaidLines(series, "JCT (s)", "fraction of jobs",
    "JCT distribution", [0, 1]);
}

/** Average JCT per input, normalized so the baseline's bar is 1.0. */
export function plotBars(inputs: LabeledInput[], baseline: string): string {
  const loaded = loadEach(inputs, ["jct_s"]);
  const bars = normalizedBars(
    loaded.map(({ label, table }) => ({
      label,
      avg: mean(column(table, "jct_s")),
    })),
    baseline,
  );
  const x = svg.xScale([-0.5, bars.length - 0.5]);
  const y = svg.yScale([0, Math.max(1, ...bars.map((b) => b.value)) * 1.1]);
  const bandHalf = Math.min(40, (x(1) - x(0)) * 0.35 || 40);
  const parts = [
    svg.axes(x, y, "policy", `avg JCT / ${baseline}`, "Normalized average JCT",
      { numericX: false }),
  ];
  bars.forEach((b, i) => {
    const cx = x(i);
    parts.push(
      `<rect x="${(cx - bandHalf).toFixed(2)}" y="${y(b.value).toFixed(2)}" ` +
        `width="${(2 * bandHalf).toFixed(2)}" ` +
        `height="${(y(0) - y(b.value)).toFixed(2)}" ` +
        `fill="${svg.PALETTE[i % svg.PALETTE.length]}"/>`,
      `<text x="${cx}" y="${y(0) + 20}" text-anchor="middle" font-size="12">` +
        `${svg.esc(b.label)}</text>`,
      `<text x="${cx}" y="${y(b.value) - 5}" text-anchor="middle" ` +
        `font-size="11">${b.value.toFixed(2)}</text>`,
    );
  });
  // reference line at the baseline's height
  parts.push(
    `<line x1="${x(-0.5)}" y1="${y(1)}" x2="${x(bars.length - 0.5)}" ` +
      `y2="${y(1)}" stroke="#333" stroke-dasharray="5,4"/>`,
  );
  return svg.document(parts.join("\n"));
}

/** Per-policy avg-JCT lines against the across-node locality penalty. */
export function plotSweep(inputs: LabeledInput[]): string {
  const { path } = inputs[0];
  const table = nonEmpty(
    readTable(path, ["l_across", "placement", "avg_jct_s"]),
    path,
  );
  const series = sweepSeries(table, "l_across", "avg_jct_s", "placement");
  return overlaidLines(series, "across-node locality penalty", "avg JCT (s)",
    "Locality-penalty sweep");
}

/** GPUs-in-use timeline, one step line per rounds.csv. */
export function plotUtilization(inputs: LabeledInput[]): string {
  const loaded = loadEach(inputs, ["time_s", "gpus_in_use"]);
  const series = loaded.map(({ label, table }) => {
    const t = column(table, "time_s");
    const g = column(table, "gpus_in_use");
    const points: Point[] = [];
    t.forEach((tv, i) => {
      if (i > 0) points.push({ x: tv, y: g[i - 1] });
      points.push({ x: tv, y: g[i] });
    });
    return { label, points };
  });
  return overlaidLines(series, "time (s)", "GPUs in use", "Cluster utilization");
}

/** Queueing delay per job, scattered against job id. */
export function plotWait(inputs: LabeledInput[]): string {
  const loaded = loadEach(inputs, ["job_id", "wait_s"]);
  const series = loaded.map(({ label, table }) => {
    const ids = column(table, "job_id");
    const waits = column(table, "wait_s");
    return { label, points: ids.map((id, i) => ({ x: id, y: waits[i] })) };
  });
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  const x = svg.xScale(svg.extent(xs));
  const y = svg.yScale([0, Math.max(1e-9, ...ys)]);
  const body = [
    svg.axes(x, y, "job id", "wait (s)", "Queueing delay"),
    ...series.map((s, i) =>
      svg.scatter(s.points, x, y, svg.PALETTE[i % svg.PALETTE.length]),
    ),
    svg.legend(series.map((s) => s.label)),
  ].join("\n");
  return svg.document(body);
}

/** Box-and-whisker of per-round placement compute time per rounds.csv. */
export function plotOverhead(inputs: LabeledInput[]): string {
  const loaded = loadEach(inputs, ["placement_time_s"]);
  const stats = loaded.map(({ label, table }) => ({
    label,
    box: boxStats(column(table, "placement_time_s")),
  }));
  const x = svg.xScale([-0.5, stats.length - 0.5]);
  const hi = Math.max(1e-9, ...stats.map((s) => s.box.max));
  const y = svg.yScale([0, hi * 1.1]);
  const half = Math.min(35, (x(1) - x(0)) * 0.3 || 35);
  const parts = [
    svg.axes(x, y, "run", "placement time per round (s)", "Placement overhead",
      { numericX: false }),
  ];
  stats.forEach(({ label, box }, i) => {
    const cx = x(i);
    const color = svg.PALETTE[i % svg.PALETTE.length];
    parts.push(
      `<line x1="${cx}" y1="${y(box.min)}" x2="${cx}" y2="${y(box.max)}" ` +
        `stroke="${color}"/>`,
      `<rect x="${cx - half}" y="${y(box.q3)}" width="${2 * half}" ` +
        `height="${Math.max(1, y(box.q1) - y(box.q3))}" fill="${color}" ` +
        `fill-opacity="0.35" stroke="${color}"/>`,
      `<line x1="${cx - half}" y1="${y(box.median)}" x2="${cx + half}" ` +
        `y2="${y(box.median)}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${cx}" y="${y(0) + 20}" text-anchor="middle" font-size="12">` +
        `${svg.esc(label)}</text>`,
    );
  });
  return svg.document(parts.join("\n"));
}

export function render(
  kind: Kind,
  inputs: LabeledInput[],
  baseline: string,
): string {
  switch (kind) {
    case "cdf":
      return plotCdf(inputs);
    case "bars":
      return plotBars(inputs, baseline);
    case "sweep":
      return plotSweep(inputs);
    case "utilization":
      return plotUtilization(inputs);
    case "wait":
      return plotWait(inputs);
    case "overhead":
      return plotOverhead(inputs);
  }
}
