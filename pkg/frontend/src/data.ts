import { numeric, SchemaError, Table } from "./csv.js";

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface BoxStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export function column(table: Table, col: string): number[] {
  return table.rows.map((r) => numeric(r, col));
}

export function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

/**
 * Empirical CDF as step points: starts at (min, 0), ends at (max, 1),
 * non-decreasing throughout.
 */
export function cdfPoints(values: number[]): Point[] {
  if (values.length === 0) {
    throw new SchemaError("no values to build a CDF from");
  }
  const sorted = [...values].sort((a, b) => a - b);
  const n = sorted.length;
  const pts: Point[] = [{ x: sorted[0], y: 0 }];
  sorted.forEach((v, i) => {
    pts.push({ x: v, y: i / n });
    pts.push({ x: v, y: (i + 1) / n });
  });
  return pts;
}

/**
 * Average values normalized to the named baseline; the baseline's own bar
 * is exactly 1.0.
 */
export function normalizedBars(
  series: { label: string; avg: number }[],
  baseline: string,
): { label: string; value: number }[] {
  const base = series.find((s) => s.label === baseline);
  if (!base) {
    throw new SchemaError(
      `baseline "${baseline}" not among inputs: ${series
        .map((s) => s.label)
        .join(", ")}`,
    );
  }
  return series.map((s) => ({
    label: s.label,
    value: s.label === baseline ? 1.0 : s.avg / base.avg,
  }));
}

function quantile(sorted: number[], q: number): number {
  const pos = (sorted.length - 1) * q;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
}

export function boxStats(values: number[]): BoxStats {
  if (values.length === 0) {
    throw new SchemaError("no values for box statistics");
  }
  const s = [...values].sort((a, b) => a - b);
  return {
    min: s[0],
    q1: quantile(s, 0.25),
    median: quantile(s, 0.5),
    q3: quantile(s, 0.75),
    max: s[s.length - 1],
  };
}

/**
 * Group sweep rows into one line per value of `seriesCol`, sorted by the
 * x column. Rows with a non-empty error column are skipped.
 */
export function sweepSeries(
  table: Table,
  xCol: string,
  yCol: string,
  seriesCol: string,
): Series[] {
  const groups = new Map<string, Point[]>();
  for (const row of table.rows) {
    if ((row["error"] ?? "") !== "") continue;
    const key = row[seriesCol];
    if (!groups.has(key)) groups.set(key, []);
    groups.get(key)!.push({ x: numeric(row, xCol), y: numeric(row, yCol) });
  }
  if (groups.size === 0) {
    throw new SchemaError("sweep contains no successful rows");
  }
  return [...groups.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([label, points]) => ({
      label,
      points: points.sort((a, b) => a.x - b.x),
    }));
}
