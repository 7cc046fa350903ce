import { beforeAll, describe, expect, it } from "vitest";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import os from "os";
import path from "path";
import { fileURLToPath } from "url";

import { execute, main, parseArgs } from "../src/cli.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixture = (...p: string[]) => path.join(here, "fixtures", ...p);

let tmp: string;
beforeAll(() => {
  tmp = mkdtempSync(path.join(os.tmpdir(), "varsched-plot-"));
});

function renderOk(argv: string[], name: string): string {
  const out = path.join(tmp, name);
  expect(main([...argv, "--out", out])).toBe(0);
  const svg = readFileSync(out, "utf8");
  expect(svg.startsWith("<svg")).toBe(true);
  expect(svg).toContain("</svg>");
  return svg;
}

describe("all six kinds render from simulator outputs", () => {
  it("cdf", () => {
    const svg = renderOk(
      ["cdf", "--in", fixture("pal", "jobs.csv"),
       "--in", fixture("packed-sticky", "jobs.csv")],
      "cdf.svg",
    );
    expect(svg).toContain("pal");
    expect(svg).toContain("packed-sticky");
  });

  it("bars", () => {
    const svg = renderOk(
      ["bars", "--in", fixture("pal", "jobs.csv"),
       "--in", fixture("pm-first", "jobs.csv"),
       "--in", fixture("packed-sticky", "jobs.csv"),
       "--baseline", "packed-sticky"],
      "bars.svg",
    );
    // the baseline bar is labeled exactly 1.00
    expect(svg).toContain(">1.00</text>");
  });

  it("sweep", () => {
    renderOk(["sweep", "--in", fixture("sweep.csv")], "sweep.svg");
  });

  it("utilization", () => {
    renderOk(
      ["utilization", "--in", fixture("pal", "rounds.csv"),
       "--in", fixture("packed-sticky", "rounds.csv")],
      "util.svg",
    );
  });

  it("wait", () => {
    renderOk(["wait", "--in", fixture("pal", "jobs.csv")], "wait.svg");
  });

  it("overhead", () => {
    renderOk(
      ["overhead", "--in", fixture("pal", "rounds.csv"),
       "--in", fixture("pm-first", "rounds.csv")],
      "overhead.svg",
    );
  });
});

describe("error handling", () => {
  it("schema mismatch names the missing column and exits nonzero", () => {
    const out = path.join(tmp, "bad.svg");
    expect(() =>
      execute(["cdf", "--in", fixture("pal", "rounds.csv"), "--out", out]),
    ).toThrow(/missing column "jct_s"/);
    expect(main(["cdf", "--in", fixture("pal", "rounds.csv"), "--out", out]))
      .toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("empty jobs.csv is an error and writes no image", () => {
    const empty = path.join(tmp, "empty-jobs.csv");
    writeFileSync(
      empty,
      "job_id,arrival_s,start_s,finish_s,jct_s,wait_s,gpu_demand,class,migrations\n",
    );
    const out = path.join(tmp, "empty.svg");
    expect(main(["cdf", "--in", empty, "--out", out])).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("unknown kind", () => {
    expect(main(["pie", "--in", "x.csv", "--out", "x.svg"])).toBe(1);
  });

  it("missing --out", () => {
    expect(() => parseArgs(["cdf", "--in", "x.csv"])).toThrow(/--out/);
  });

  it("label count mismatch", () => {
    expect(() =>
      parseArgs(["cdf", "--in", "a.csv", "--in", "b.csv",
                 "--label", "one", "--out", "x.svg"]),
    ).toThrow(/--label count/);
  });
});

describe("labels", () => {
  it("defaults to the parent directory name", () => {
    const opts = parseArgs([
      "cdf", "--in", fixture("pal", "jobs.csv"), "--out", "x.svg",
    ]);
    expect(opts.inputs[0].label).toBe("pal");
  });

  it("explicit labels override", () => {
    const opts = parseArgs([
      "cdf", "--in", fixture("pal", "jobs.csv"),
      "--label", "PAL (ours)", "--out", "x.svg",
    ]);
    expect(opts.inputs[0].label).toBe("PAL (ours)");
  });
});
