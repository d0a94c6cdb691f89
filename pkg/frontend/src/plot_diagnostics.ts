/**
 * Residual-vs-resolution figure from diagnostics reports.
 *
 * Two or more reports: log-log plot of the transport and energy-balance
 * residual maxima against n_points, with the fitted slope annotated (the
 * runs halve dx and dt together, so second order shows up as slope -2).
 * A single report degrades to a bar chart of its residuals.
 */

import * as fs from "node:fs";

import { ReportPoint, readReports } from "./data.js";
import { Raster } from "./raster.js";
import { encodePng } from "./png.js";
import { textWidth } from "./font.js";

export const WIDTH = 720;
export const HEIGHT = 480;
const MARGIN = { left: 80, right: 20, top: 20, bottom: 48 };

const BG: [number, number, number, number] = [255, 255, 255, 255];
const AXIS: [number, number, number, number] = [40, 40, 40, 255];
const CONT: [number, number, number, number] = [31, 119, 180, 255];
const QHJ: [number, number, number, number] = [214, 39, 40, 255];

export interface DiagnosticsSummary {
  reports: number;
  slope: number | null;
  width: number;
  height: number;
}

function fitSlope(xs: number[], ys: number[]): number {
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) ** 2;
  }
  return num / den;
}

function marker(r: Raster, x: number, y: number, color: [number, number, number, number]) {
  r.fillRect(Math.round(x) - 2, Math.round(y) - 2, 5, 5, color);
}

export function renderDiagnostics(points: ReportPoint[]): {
  raster: Raster;
  summary: DiagnosticsSummary;
} {
  const raster = new Raster(WIDTH, HEIGHT, BG);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  raster.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + plotH, AXIS);
  raster.line(MARGIN.left, MARGIN.top + plotH, MARGIN.left + plotW, MARGIN.top + plotH, AXIS);

  if (points.length === 1) {
    // bar-chart fallback: the two residuals of the single report
    const p = points[0];
    const values = [p.continuity, p.qhj];
    const labels = ["transport", "e rate"];
    const colors = [CONT, QHJ];
    const top = Math.max(...values, 1e-300);
    values.forEach((v, i) => {
      const h = Math.max(2, Math.round((v / top) * (plotH - 20)));
      const x0 = MARGIN.left + 60 + i * 160;
      raster.fillRect(x0, MARGIN.top + plotH - h, 80, h, colors[i]);
      raster.text(x0 + 8, MARGIN.top + plotH + 8, labels[i], AXIS);
      raster.text(x0 + 8, MARGIN.top + plotH - h - 12, v.toExponential(1), AXIS);
    });
    raster.text(MARGIN.left + 8, MARGIN.top + 6, `n=${p.nPoints}`, AXIS);
    return {
      raster,
      summary: { reports: 1, slope: null, width: WIDTH, height: HEIGHT },
    };
  }

  const lx = points.map((p) => Math.log10(p.nPoints));
  const lCont = points.map((p) => Math.log10(Math.max(p.continuity, 1e-300)));
  const lQhj = points.map((p) => Math.log10(Math.max(p.qhj, 1e-300)));
  const xLo = Math.min(...lx);
  const xHi = Math.max(...lx);
  const yLo = Math.min(...lCont, ...lQhj) - 0.3;
  const yHi = Math.max(...lCont, ...lQhj) + 0.3;

  const toPx = (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo || 1)) * (plotW - 1);
  const toPy = (v: number) => MARGIN.top + (1 - (v - yLo) / (yHi - yLo || 1)) * (plotH - 1);

  for (const [series, color] of [[lCont, CONT], [lQhj, QHJ]] as const) {
    raster.polyline(lx.map(toPx), series.map(toPy), color);
    series.forEach((v, i) => marker(raster, toPx(lx[i]), toPy(v), color));
  }

  // ticks: one per report on x, decades on y
  points.forEach((p, i) => {
    const px = Math.round(toPx(lx[i]));
    raster.line(px, MARGIN.top + plotH, px, MARGIN.top + plotH + 4, AXIS);
    const label = String(p.nPoints);
    raster.text(px - Math.floor(textWidth(label) / 2), MARGIN.top + plotH + 8, label, AXIS);
  });
  for (let d = Math.ceil(yLo); d <= Math.floor(yHi); d++) {
    const py = Math.round(toPy(d));
    raster.line(MARGIN.left - 4, py, MARGIN.left, py, AXIS);
    const label = `1e${d}`;
    raster.text(MARGIN.left - 6 - textWidth(label), py - 3, label, AXIS);
  }
  raster.text(MARGIN.left + Math.floor(plotW / 2) - 20, MARGIN.top + plotH + 24,
    "n points", AXIS);

  // average fitted slope over both series, annotated
  const slope = (fitSlope(lx, lCont) + fitSlope(lx, lQhj)) / 2;
  const note = `slope=${slope.toFixed(2)}`;
  raster.text(MARGIN.left + plotW - textWidth(note, 2) - 8, MARGIN.top + 8, note, AXIS, 2);

  return {
    raster,
    summary: { reports: points.length, slope, width: WIDTH, height: HEIGHT },
  };
}

export function plotDiagnostics(pattern: string, pngPath: string): DiagnosticsSummary {
  const points = readReports(pattern);
  const { raster, summary } = renderDiagnostics(points);
  fs.writeFileSync(pngPath, encodePng(raster.width, raster.height, raster.data));
  return summary;
}
