/**
 * Worldline fan over the probability-density heatmap.
 *
 * Time runs along the horizontal axis, position along the vertical one; the
 * background is sqrt(P) through a perceptual ramp (sqrt lifts the faint
 * tails), the barrier band is shaded when the run had one, and each
 * trajectory is a one-pixel polyline colored by its flag.
 */

import * as fs from "node:fs";

import { FieldsData, TrajectoryData, readFieldsNdjson, readTrajectoriesCsv } from "./data.js";
import { Raster, flagColor, heatColor } from "./raster.js";
import { encodePng } from "./png.js";
import { textWidth } from "./font.js";

export const WIDTH = 900;
export const HEIGHT = 560;
const MARGIN = { left: 64, right: 16, top: 16, bottom: 40 };

export interface TrajectoriesSummary {
  worldlines: number;
  frames: number;
  width: number;
  height: number;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return Number(v.toPrecision(4)).toString();
  }
  return v.toExponential(1).replace("e-", "e-").replace("e+", "e+");
}

export function renderTrajectories(traj: TrajectoryData, fields: FieldsData): {
  raster: Raster;
  summary: TrajectoriesSummary;
} {
  if (fields.frames.length === 0) {
    throw new Error("fields file has no frames to draw");
  }
  const raster = new Raster(WIDTH, HEIGHT, [24, 24, 28, 255]);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const frames = fields.frames;
  const x = frames[0].x;
  const xMin = x[0];
  const xMax = x[x.length - 1];
  const tMin = frames[0].t;
  const tMax = frames[frames.length - 1].t;
  const tSpan = tMax - tMin || 1;

  const toPx = (t: number) => MARGIN.left + ((t - tMin) / tSpan) * (plotW - 1);
  const toPy = (xv: number) => MARGIN.top + (1 - (xv - xMin) / (xMax - xMin)) * (plotH - 1);

  // density heatmap: one source frame per pixel column, sqrt scaling
  let peak = 0;
  for (const f of frames) {
    for (const p of f.P) peak = Math.max(peak, p);
  }
  const scale = peak > 0 ? 1 / Math.sqrt(peak) : 1;
  for (let px = 0; px < plotW; px++) {
    const t = tMin + (px / (plotW - 1)) * tSpan;
    let k = 0;
    let best = Infinity;
    for (let i = 0; i < frames.length; i++) {
      const d = Math.abs(frames[i].t - t);
      if (d < best) {
        best = d;
        k = i;
      }
    }
    const P = frames[k].P;
    for (let py = 0; py < plotH; py++) {
      const xv = xMin + (1 - py / (plotH - 1)) * (xMax - xMin);
      const j = Math.min(x.length - 1,
        Math.max(0, Math.round(((xv - xMin) / (xMax - xMin)) * (x.length - 1))));
      raster.set(MARGIN.left + px, MARGIN.top + py, heatColor(Math.sqrt(P[j]) * scale));
    }
  }

  // barrier band
  if (fields.barrier) {
    const [a, b] = fields.barrier;
    const yTop = Math.round(toPy(b));
    const yBot = Math.round(toPy(a));
    raster.blendRect(MARGIN.left, yTop, plotW, yBot - yTop + 1, [255, 255, 255, 255], 0.28);
  }

  // worldlines colored by flag
  for (const line of traj.worldlines) {
    const xs = traj.times.map(toPx);
    const ys = line.xs.map(toPy);
    raster.polyline(xs, ys, flagColor(line.flag));
  }

  // frame, ticks, labels
  const axis: [number, number, number, number] = [210, 210, 210, 255];
  raster.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + plotH, axis);
  raster.line(MARGIN.left, MARGIN.top + plotH, MARGIN.left + plotW, MARGIN.top + plotH, axis);
  for (const t of [tMin, tMin + tSpan / 2, tMax]) {
    const px = Math.round(toPx(t));
    raster.line(px, MARGIN.top + plotH, px, MARGIN.top + plotH + 4, axis);
    const label = fmt(t);
    raster.text(px - Math.floor(textWidth(label) / 2), MARGIN.top + plotH + 8, label, axis);
  }
  for (const xv of [xMin, (xMin + xMax) / 2, xMax]) {
    const py = Math.round(toPy(xv));
    raster.line(MARGIN.left - 4, py, MARGIN.left, py, axis);
    const label = fmt(xv);
    raster.text(MARGIN.left - 6 - textWidth(label), py - 3, label, axis);
  }
  raster.text(MARGIN.left + plotW - textWidth("t") - 2, MARGIN.top + plotH - 10, "t", axis);
  raster.text(MARGIN.left + 6, MARGIN.top + 4, "x", axis);

  return {
    raster,
    summary: {
      worldlines: traj.worldlines.length,
      frames: frames.length,
      width: WIDTH,
      height: HEIGHT,
    },
  };
}

export function plotTrajectories(csvPath: string, ndjsonPath: string,
                                 pngPath: string): TrajectoriesSummary {
  const traj = readTrajectoriesCsv(csvPath);
  const fields = readFieldsNdjson(ndjsonPath);
  const { raster, summary } = renderTrajectories(traj, fields);
  fs.writeFileSync(pngPath, encodePng(raster.width, raster.height, raster.data));
  return summary;
}
