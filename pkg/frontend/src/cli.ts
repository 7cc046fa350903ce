#!/usr/bin/env node
/**
 * varsched-plot: render SVG figures from varsched CLI output CSVs.
 *
 * Usage:
 *   varsched-plot <kind> --in <csv> [--in <csv>...] --out <img>
 *                 [--baseline <label>] [--label <name>...]
 *
 * Kinds: cdf, bars, sweep, utilization, wait, overhead.
 * Labels default to the basename of each input's parent directory (the
 * varsched run output directory is usually named after the policy).
 */

import { writeFileSync } from "fs";
import path from "path";
import { SchemaError } from "./csv.js";
import { KINDS, Kind, LabeledInput, render } from "./plots.js";

export interface Options {
  kind: Kind;
  inputs: LabeledInput[];
  out: string;
  baseline: string;
}

export function parseArgs(argv: string[]): Options {
  if (argv.length === 0) {
    throw new SchemaError(
      `usage: varsched-plot <${KINDS.join("|")}> --in <csv>... --out <img>`,
    );
  }
  const kind = argv[0] as Kind;
  if (!KINDS.includes(kind)) {
    throw new SchemaError(`unknown plot kind "${argv[0]}"`);
  }
  const ins: string[] = [];
  const labels: string[] = [];
  let out = "";
  let baseline = "packed-sticky";
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[++i];
    if (value === undefined) {
      throw new SchemaError(`${flag} requires a value`);
    }
    switch (flag) {
      case "--in":
        ins.push(value);
        break;
      case "--out":
        out = value;
        break;
      case "--baseline":
        baseline = value;
        break;
      case "--label":
        labels.push(value);
        break;
      default:
        throw new SchemaError(`unknown flag "${flag}"`);
    }
  }
  if (ins.length === 0) throw new SchemaError("at least one --in is required");
  if (!out) throw new SchemaError("--out is required");
  if (labels.length > 0 && labels.length !== ins.length) {
    throw new SchemaError("--label count must match --in count");
  }
  const inputs = ins.map((p, i) => ({
    path: p,
    label: labels[i] ?? path.basename(path.dirname(path.resolve(p))),
  }));
  return { kind, inputs, out, baseline };
}

/** Render and write the image; throws on any input problem. */
export function execute(argv: string[]): void {
  const opts = parseArgs(argv);
  const image = render(opts.kind, opts.inputs, opts.baseline);
  writeFileSync(opts.out, image);
}

export function main(argv: string[]): number {
  try {
    execute(argv);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (process.argv[1] && /cli\.[jt]s$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
