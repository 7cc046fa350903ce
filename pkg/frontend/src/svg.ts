/** Tiny SVG chart scaffolding shared by all plot kinds. */

import { Point } from "./data.js";

export const WIDTH = 720;
export const HEIGHT = 440;
const MARGIN = { top: 36, right: 24, bottom: 52, left: 76 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
  "#e377c2", "#7f7f7f",
];

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const span = d1 - d0 || 1;
  const f = ((v: number) =>
    range[0] + ((v - d0) / span) * (range[1] - range[0])) as Scale;
  f.domain = domain;
  return f;
}

export function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

export function xScale(domain: [number, number]): Scale {
  return linearScale(domain, [MARGIN.left, WIDTH - MARGIN.right]);
}

export function yScale(domain: [number, number]): Scale {
  return linearScale(domain, [HEIGHT - MARGIN.bottom, MARGIN.top]);
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  if (lo === hi) return [lo];
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

function fmt(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e5 || Math.abs(v) < 1e-3)) {
    return v.toExponential(1);
  }
  return Number(v.toPrecision(4)).toString();
}

export function axes(
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
  opts: { numericX?: boolean } = {},
): string {
  const numericX = opts.numericX ?? true;
  const parts: string[] = [];
  const bottom = HEIGHT - MARGIN.bottom;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${bottom}" x2="${WIDTH - MARGIN.right}" ` +
      `y2="${bottom}" stroke="#333"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
      `y2="${bottom}" stroke="#333"/>`,
  );
  for (const t of numericX ? ticks(x.domain) : []) {
    const px = x(t);
    parts.push(
      `<line x1="${px}" y1="${bottom}" x2="${px}" y2="${bottom + 5}" stroke="#333"/>`,
      `<text x="${px}" y="${bottom + 20}" text-anchor="middle" font-size="11">` +
        `${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(y.domain)) {
    const py = y(t);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 9}" y="${py + 4}" text-anchor="end" font-size="11">` +
        `${fmt(t)}</text>`,
      `<line x1="${MARGIN.left}" y1="${py}" x2="${WIDTH - MARGIN.right}" ` +
        `y2="${py}" stroke="#ddd" stroke-dasharray="2,3"/>`,
    );
  }
  parts.push(
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 12}" ` +
      `text-anchor="middle" font-size="13">${esc(xLabel)}</text>`,
    `<text x="18" y="${(MARGIN.top + bottom) / 2}" text-anchor="middle" ` +
      `font-size="13" transform="rotate(-90 18 ${(MARGIN.top + bottom) / 2})">` +
      `${esc(yLabel)}</text>`,
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15" ` +
      `font-weight="bold">${esc(title)}</text>`,
  );
  return parts.join("\n");
}

export function polyline(
  points: Point[],
  x: Scale,
  y: Scale,
  color: string,
): string {
  const coords = points
    .map((p) => `${x(p.x).toFixed(2)},${y(p.y).toFixed(2)}`)
    .join(" ");
  return `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.8"/>`;
}

export function scatter(
  points: Point[],
  x: Scale,
  y: Scale,
  color: string,
): string {
  return points
    .map(
      (p) =>
        `<circle cx="${x(p.x).toFixed(2)}" cy="${y(p.y).toFixed(2)}" r="2.4" ` +
        `fill="${color}" fill-opacity="0.7"/>`,
    )
    .join("\n");
}

export function legend(labels: string[]): string {
  return labels
    .map((label, i) => {
      const lx = WIDTH - MARGIN.right - 150;
      const ly = MARGIN.top + 8 + i * 18;
      return (
        `<rect x="${lx}" y="${ly - 9}" width="12" height="12" ` +
        `fill="${PALETTE[i % PALETTE.length]}"/>` +
        `<text x="${lx + 18}" y="${ly + 2}" font-size="12">${esc(label)}</text>`
      );
    })
    .join("\n");
}

export function document(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
    `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
    `font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
    body +
    `\n</svg>\n`
  );
}

export const PLOT_AREA = MARGIN;
