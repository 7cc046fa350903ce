import { readFileSync } from "fs";

/** Raised when an input CSV does not match the expected schema. */
export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

/** Minimal RFC-4180-ish parser: quoted fields, no embedded newlines. */
export function parseCsv(text: string): string[][] {
  const out: string[][] = [];
  for (const line of text.split(/\r?\n/)) {
    if (line === "") continue;
    const fields: string[] = [];
    let cur = "";
    let quoted = false;
    for (let i = 0; i < line.length; i++) {
      const ch = line[i];
      if (quoted) {
        if (ch === '"' && line[i + 1] === '"') {
          cur += '"';
          i++;
        } else if (ch === '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch === '"') {
        quoted = true;
      } else if (ch === ",") {
        fields.push(cur);
        cur = "";
      } else {
        cur += ch;
      }
    }
    fields.push(cur);
    out.push(fields);
  }
  return out;
}

/**
 * Read a CSV file into labeled rows, checking that every required column
 * is present in the header.
 */
export function readTable(path: string, required: string[]): Table {
  const records = parseCsv(readFileSync(path, "utf8"));
  if (records.length === 0) {
    throw new SchemaError(`${path}: empty file`);
  }
  const columns = records[0];
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new SchemaError(`${path}: missing column "${col}"`);
    }
  }
  const rows = records.slice(1).map((fields) => {
    const row: Record<string, string> = {};
    columns.forEach((c, i) => (row[c] = fields[i] ?? ""));
    return row;
  });
  return { columns, rows };
}

/** Parse one cell as a finite number, naming the column on failure. */
export function numeric(row: Record<string, string>, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`non-numeric value "${row[col]}" in column "${col}"`);
  }
  return v;
}
