/**
 * Input contracts: the simulator's run-log CSV, the sweep summary CSV and the
 * compare JSON. Everything here validates against the published column lists
 * and fails with a named-column error on mismatch.
 */

import * as fs from "fs";
import Papa from "papaparse";

export const LOG_COLUMNS = [
  "t", "x", "y", "z", "chi", "gamma", "target_idx", "eta_lat", "eta_lon",
  "a_yc", "a_zc", "e_d", "k1", "k2", "qp_status", "clipped", "d_chi", "d_gamma",
] as const;

export const SWEEP_COLUMNS = [
  "l_d",
  "eta_lon_mean", "eta_lon_std",
  "eta_lat_mean", "eta_lat_std",
  "a_yc_mean", "a_yc_std",
  "a_zc_mean", "a_zc_std",
  "ed_conv_median_s",
] as const;

export class SchemaMismatch extends Error {
  constructor(file: string, column: string) {
    super(`${file}: missing required column '${column}'`);
    this.name = "SchemaMismatch";
  }
}

export class EmptyInput extends Error {
  constructor(file: string) {
    super(`${file}: no data rows`);
    this.name = "EmptyInput";
  }
}

export interface LogRow {
  t: number;
  x: number;
  y: number;
  z: number;
  eta_lat: number;
  eta_lon: number;
  a_yc: number;
  a_zc: number;
  e_d: number;
}

export interface SweepRow {
  l_d: number;
  [metric: string]: number;
}

function parseCsv(file: string): { header: string[]; rows: string[][] } {
  const text = fs.readFileSync(file, "utf-8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new Error(`${file}: ${parsed.errors[0].message}`);
  }
  const data = parsed.data;
  if (data.length === 0) throw new EmptyInput(file);
  return { header: data[0], rows: data.slice(1) };
}

function requireColumns(file: string, header: string[], wanted: readonly string[]): Map<string, number> {
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name, i));
  for (const col of wanted) {
    if (!index.has(col)) throw new SchemaMismatch(file, col);
  }
  return index;
}

export function readLog(file: string): LogRow[] {
  const { header, rows } = parseCsv(file);
  const idx = requireColumns(file, header, LOG_COLUMNS);
  if (rows.length === 0) throw new EmptyInput(file);
  const get = (row: string[], col: string) => Number(row[idx.get(col)!]);
  return rows.map((row) => ({
    t: get(row, "t"),
    x: get(row, "x"),
    y: get(row, "y"),
    z: get(row, "z"),
    eta_lat: get(row, "eta_lat"),
    eta_lon: get(row, "eta_lon"),
    a_yc: get(row, "a_yc"),
    a_zc: get(row, "a_zc"),
    e_d: get(row, "e_d"),
  }));
}

export function readSweep(file: string): SweepRow[] {
  const { header, rows } = parseCsv(file);
  const idx = requireColumns(file, header, SWEEP_COLUMNS);
  if (rows.length === 0) throw new EmptyInput(file);
  return rows.map((row) => {
    const out: SweepRow = { l_d: 0 };
    for (const col of SWEEP_COLUMNS) {
      const raw = row[idx.get(col)!];
      out[col] = raw === "" || raw === undefined ? NaN : Number(raw);
    }
    return out;
  });
}

/** Waypoint CSV (`x,y,z` lines, `#` comments), for trajectory overlays. */
export function readPathCsv(file: string): Array<[number, number, number]> {
  const text = fs.readFileSync(file, "utf-8");
  const pts: Array<[number, number, number]> = [];
  for (const raw of text.split("\n")) {
    const line = raw.split("#", 1)[0].trim();
    if (!line) continue;
    const parts = line.split(",").map(Number);
    if (parts.length !== 3 || parts.some((v) => !Number.isFinite(v))) {
      throw new Error(`${file}: bad waypoint line '${raw.trim()}'`);
    }
    pts.push([parts[0], parts[1], parts[2]]);
  }
  if (pts.length === 0) throw new EmptyInput(file);
  return pts;
}

export function seriesName(file: string): string {
  const base = file.split("/").pop() ?? file;
  return base.replace(/\.csv$/i, "");
}
