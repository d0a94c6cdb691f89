import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { decodePng } from "../src/png.js";
import { plotDiagnostics, renderDiagnostics } from "../src/plot_diagnostics.js";
import { plotTrajectories } from "../src/plot_trajectories.js";
import { expandGlob, readReports } from "../src/data.js";

let dir: string;

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "bohmflow-figs-"));
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

/** Synthetic three-frame run with a drifting bump and three worldlines. */
function writeTrajectoryFixture(): { csv: string; ndjson: string } {
  const nx = 64;
  const x = Array.from({ length: nx }, (_, i) => -8 + (16 * i) / (nx - 1));
  const times = [0.0, 0.5, 1.0];
  const lines = [
    JSON.stringify({
      schema_version: "bohmflow/frames-v1",
      generated_at: "fixture",
      n_frames: times.length,
      barrier: [1.0, 2.5],
    }),
  ];
  for (const t of times) {
    const P = x.map((xi) => Math.exp(-((xi - t) ** 2)));
    lines.push(JSON.stringify({ t, x, P }));
  }
  const ndjson = path.join(dir, "frames.ndjson");
  fs.writeFileSync(ndjson, lines.join("\n") + "\n");

  const rows = ["traj_id,t,x,flag"];
  const flags = ["transmitted", "reflected", "interior"];
  for (let i = 0; i < 3; i++) {
    for (const t of times) {
      rows.push(`${i},${t},${(i - 1) + t * (i === 1 ? -1 : 1)},${flags[i]}`);
    }
  }
  const csv = path.join(dir, "traj.csv");
  fs.writeFileSync(csv, rows.join("\n") + "\n");
  return { csv, ndjson };
}

function writeReport(name: string, nPoints: number, cont: number, qhj: number): string {
  const file = path.join(dir, name);
  fs.writeFileSync(file, JSON.stringify({
    schema_version: "bohmflow/diagnostics-v1",
    n_points: nPoints,
    dt: 1.0 / nPoints,
    continuity_residual_max: cont,
    qhj_residual_max: qhj,
  }));
  return file;
}

describe("plot-trajectories", () => {
  it("renders every worldline and reports the count", () => {
    const { csv, ndjson } = writeTrajectoryFixture();
    const png = path.join(dir, "traj.png");
    const summary = plotTrajectories(csv, ndjson, png);
    expect(summary.worldlines).toBe(3);
    expect(summary.frames).toBe(3);
    const img = decodePng(fs.readFileSync(png));
    expect(img.width).toBe(summary.width);
    expect(img.height).toBe(summary.height);

    // each flag's color must appear: lines really are colored by flag
    const want: Array<[number, number, number]> = [
      [64, 220, 255],   // transmitted
      [255, 170, 40],   // reflected
      [120, 255, 120],  // interior
    ];
    for (const [r, g, b] of want) {
      let found = false;
      for (let i = 0; i < img.rgba.length && !found; i += 4) {
        found = img.rgba[i] === r && img.rgba[i + 1] === g && img.rgba[i + 2] === b;
      }
      expect(found, `color ${r},${g},${b}`).toBe(true);
    }
  });

  it("is byte-deterministic", () => {
    const { csv, ndjson } = writeTrajectoryFixture();
    const a = path.join(dir, "a.png");
    const b = path.join(dir, "b.png");
    plotTrajectories(csv, ndjson, a);
    plotTrajectories(csv, ndjson, b);
    expect(fs.readFileSync(a).equals(fs.readFileSync(b))).toBe(true);
  });
});

describe("plot-diagnostics", () => {
  it("fits the decay slope across resolutions", () => {
    writeReport("rep_1024.json", 1024, 1e-4, 2e-4);
    writeReport("rep_2048.json", 2048, 2.5e-5, 5e-5);
    writeReport("rep_4096.json", 4096, 6.25e-6, 1.25e-5);
    const png = path.join(dir, "diag.png");
    const summary = plotDiagnostics(path.join(dir, "rep_*.json"), png);
    expect(summary.reports).toBe(3);
    expect(summary.slope).toBeCloseTo(-2.0, 3);
    const img = decodePng(fs.readFileSync(png));
    expect(img.width).toBe(summary.width);
  });

  it("falls back to a bar chart for one report", () => {
    const file = writeReport("single.json", 512, 3e-3, 4e-3);
    const summary = plotDiagnostics(file, path.join(dir, "single.png"));
    expect(summary.reports).toBe(1);
    expect(summary.slope).toBeNull();
  });

  it("errors on an empty glob", () => {
    expect(() => plotDiagnostics(path.join(dir, "missing_*.json"),
      path.join(dir, "x.png"))).toThrow(/no report files/);
  });

  it("errors on corrupt json", () => {
    const file = path.join(dir, "broken.json");
    fs.writeFileSync(file, "{not json");
    expect(() => readReports(file)).toThrow(/invalid JSON/);
  });

  it("renders from in-memory points without touching disk", () => {
    const { summary } = renderDiagnostics([
      { file: "a", nPoints: 100, dt: 0.01, continuity: 1e-3, qhj: 1e-3 },
      { file: "b", nPoints: 200, dt: 0.005, continuity: 2.5e-4, qhj: 2.5e-4 },
    ]);
    expect(summary.slope).toBeCloseTo(-2.0, 6);
  });
});

describe("glob expansion", () => {
  it("matches within a single directory", () => {
    writeReport("glob_a.json", 10, 1, 1);
    writeReport("glob_b.json", 20, 1, 1);
    const hits = expandGlob(path.join(dir, "glob_*.json"));
    expect(hits).toHaveLength(2);
  });
});
