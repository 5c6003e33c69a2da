/** Parsing and validation of sparsectl per-step CSVs.
 *
 * Schema (version 1): k,mean_sq_norm,std_sq_norm,active_sensors_mean
 * plus optional x_mean_<i> (and x_std_<i>) columns.
 */

import { readFileSync } from "fs";
import { basename } from "path";

export class SchemaError extends Error {}

export interface Table {
  path: string;
  header: string[];
  rows: number[][];
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new SchemaError(`${path}: expected a header line and data rows`);
  }
  const header = lines[0].split(",");
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(
        `${path}: row ${i} has ${parts.length} fields, header has ${header.length}`,
      );
    }
    const row = parts.map(Number);
    const bad = row.findIndex((v) => Number.isNaN(v));
    if (bad >= 0) {
      throw new SchemaError(
        `${path}: row ${i} column '${header[bad]}' is not numeric: ${parts[bad]}`,
      );
    }
    rows.push(row);
  }
  return { path, header, rows };
}

export function readTable(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.header.includes(name)) {
      throw new SchemaError(
        `${table.path}: missing required column '${name}' ` +
          `(have: ${table.header.join(", ")})`,
      );
    }
  }
}

export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`${table.path}: missing required column '${name}'`);
  }
  return table.rows.map((r) => r[idx]);
}

export function columnsMatching(table: Table, prefix: string): string[] {
  return table.header.filter((h) => h.startsWith(prefix));
}

/** Curve label for a table: "p = X" for sweep files named p_<X>.csv. */
export function tableLabel(table: Table): string {
  const name = basename(table.path).replace(/\.csv$/i, "");
  const sweep = name.match(/^p_([0-9.eE+-]+)$/);
  return sweep ? `p = ${sweep[1]}` : name;
}
