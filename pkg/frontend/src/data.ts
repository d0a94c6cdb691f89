/**
 * Readers for the simulator's file interfaces. These scripts are strictly
 * read-only consumers: parse, validate the schema version, hand back arrays.
 */

import * as fs from "node:fs";
import * as path from "node:path";

export const FRAMES_SCHEMA = "bohmflow/frames-v1";
export const REPORT_SCHEMA = "bohmflow/diagnostics-v1";

export class DataError extends Error {}

// ---------------------------------------------------------------------------
// worldline CSV
// ---------------------------------------------------------------------------

export interface Worldline {
  id: number;
  flag: string;
  xs: number[];
}

export interface TrajectoryData {
  times: number[];
  worldlines: Worldline[];
}

export function parseTrajectoriesCsv(text: string): TrajectoryData {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new DataError("trajectory CSV is empty");
  }
  const header = lines[0].split(",");
  const need = ["traj_id", "t", "x", "flag"];
  const cols: Record<string, number> = {};
  for (const name of need) {
    const at = header.indexOf(name);
    if (at < 0) {
      throw new DataError(`trajectory CSV is missing column '${name}'`);
    }
    cols[name] = at;
  }
  const byId = new Map<number, Worldline>();
  const timesSeen = new Map<number, number>(); // value -> first-seen order
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    const id = Number(parts[cols.traj_id]);
    const t = Number(parts[cols.t]);
    const x = Number(parts[cols.x]);
    const flag = parts[cols.flag];
    if (!Number.isFinite(id) || !Number.isFinite(t) || !Number.isFinite(x)) {
      throw new DataError(`trajectory CSV row ${i + 1} is not numeric`);
    }
    if (!timesSeen.has(t)) timesSeen.set(t, timesSeen.size);
    let line = byId.get(id);
    if (!line) {
      line = { id, flag, xs: [] };
      byId.set(id, line);
    }
    line.xs.push(x);
  }
  const times = [...timesSeen.keys()];
  for (const line of byId.values()) {
    if (line.xs.length !== times.length) {
      throw new DataError(
        `trajectory ${line.id} has ${line.xs.length} samples, expected ${times.length}`);
    }
  }
  return { times, worldlines: [...byId.values()].sort((a, b) => a.id - b.id) };
}

export function readTrajectoriesCsv(file: string): TrajectoryData {
  return parseTrajectoriesCsv(fs.readFileSync(file, "utf-8"));
}

// ---------------------------------------------------------------------------
// fields NDJSON
// ---------------------------------------------------------------------------

export interface FrameRecord {
  t: number;
  x: number[];
  P: number[];
}

export interface FieldsData {
  barrier: [number, number] | null;
  frames: FrameRecord[];
}

export function parseFieldsNdjson(text: string): FieldsData {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new DataError("fields file is empty, expected a schema header");
  }
  let header: any;
  try {
    header = JSON.parse(lines[0]);
  } catch (err) {
    throw new DataError(`fields header is not valid JSON: ${err}`);
  }
  if (header.schema_version !== FRAMES_SCHEMA) {
    throw new DataError(
      `fields schema mismatch: got ${JSON.stringify(header.schema_version)}, ` +
      `need ${FRAMES_SCHEMA}`);
  }
  const frames: FrameRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    let rec: any;
    try {
      rec = JSON.parse(lines[i]);
    } catch (err) {
      throw new DataError(`fields record ${i} is not valid JSON: ${err}`);
    }
    for (const key of ["t", "x", "P"]) {
      if (!(key in rec)) {
        throw new DataError(`fields record ${i} is missing '${key}'`);
      }
    }
    frames.push({ t: rec.t, x: rec.x, P: rec.P });
  }
  return { barrier: header.barrier ?? null, frames };
}

export function readFieldsNdjson(file: string): FieldsData {
  return parseFieldsNdjson(fs.readFileSync(file, "utf-8"));
}

// ---------------------------------------------------------------------------
// diagnostics reports
// ---------------------------------------------------------------------------

export interface ReportPoint {
  file: string;
  nPoints: number;
  dt: number;
  continuity: number;
  qhj: number;
}

export function readReport(file: string): ReportPoint {
  let data: any;
  try {
    data = JSON.parse(fs.readFileSync(file, "utf-8"));
  } catch (err) {
    throw new DataError(`${file}: invalid JSON: ${err}`);
  }
  if (data.schema_version !== REPORT_SCHEMA) {
    throw new DataError(
      `${file}: report schema mismatch: got ${JSON.stringify(data.schema_version)}`);
  }
  for (const key of ["n_points", "dt", "continuity_residual_max", "qhj_residual_max"]) {
    if (!(key in data)) {
      throw new DataError(`${file}: report is missing '${key}'`);
    }
  }
  return {
    file,
    nPoints: data.n_points,
    dt: data.dt,
    continuity: data.continuity_residual_max,
    qhj: data.qhj_residual_max,
  };
}

/** Expand a single-directory glob ('dir/x*.json'); plain paths pass through. */
export function expandGlob(pattern: string): string[] {
  if (!pattern.includes("*")) {
    return fs.existsSync(pattern) ? [pattern] : [];
  }
  const dir = path.dirname(pattern);
  const base = path.basename(pattern);
  const rx = new RegExp(
    "^" + base.split("*").map((s) => s.replace(/[.+?^${}()|[\]\\]/g, "\\$&")).join(".*") + "$");
  if (!fs.existsSync(dir)) return [];
  return fs.readdirSync(dir).filter((f) => rx.test(f)).sort()
    .map((f) => path.join(dir, f));
}

export function readReports(pattern: string): ReportPoint[] {
  const files = expandGlob(pattern);
  if (files.length === 0) {
    throw new DataError(`no report files match ${pattern}`);
  }
  return files.map(readReport).sort((a, b) => a.nPoints - b.nPoints);
}
