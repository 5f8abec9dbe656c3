import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** A parsed CSV: column names in file order plus numeric row records. */
export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, number>[];
}

/** Input does not match the documented column schema. */
export class SchemaError extends Error {
  constructor(
    public readonly path: string,
    public readonly required: string[],
    public readonly found: string[],
  ) {
    const missing = required.filter((c) => !found.includes(c));
    const extra = found.filter((c) => !required.includes(c));
    super(
      [
        `schema mismatch in ${path}`,
        `  required columns: ${required.join(", ")}`,
        `  found columns:    ${found.join(", ")}`,
        `  missing:          ${missing.length ? missing.join(", ") : "(none)"}`,
        `  unexpected:       ${extra.length ? extra.join(", ") : "(none)"}`,
      ].join("\n"),
    );
    this.name = "SchemaError";
  }
}

/**
 * Read a CSV file and verify every required column is present.  Extra
 * columns are allowed; missing ones raise a SchemaError carrying a full
 * column diff.
 */
export function readTable(path: string, required: string[]): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, number>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`cannot parse ${path}: ${first.message} (row ${first.row})`);
  }
  const columns = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(path, required, columns);
  }
  return { path, columns, rows: parsed.data };
}

/** Column values as a plain array, in row order. */
export function column(table: Table, name: string): number[] {
  return table.rows.map((row) => row[name]);
}

/** Group row indices by the integer value of a column, in first-seen order. */
export function groupBy(table: Table, name: string): Map<number, number[]> {
  const groups = new Map<number, number[]>();
  table.rows.forEach((row, i) => {
    const key = row[name];
    const bucket = groups.get(key);
    if (bucket) bucket.push(i);
    else groups.set(key, [i]);
  });
  return groups;
}
