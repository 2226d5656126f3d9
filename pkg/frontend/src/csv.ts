import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** One sampled point of a named curve. */
export interface CurvePoint {
  x: number;
  y: number;
  fn: string;
  d: number;
}

export interface Curve {
  id: string;
  d: number;
  points: CurvePoint[];
}

/** Raised for missing or malformed inputs; the CLI maps it to exit code 2. */
export class CsvError extends Error {
  constructor(public readonly file: string, detail: string) {
    super(`${file}: ${detail}`);
    this.name = "CsvError";
  }
}

const HEADER = ["x", "y", "function", "d"];

/**
 * Load one curve CSV (header `x,y,function,d`). Every row must carry the
 * same function id and dimension; rows are kept in file order.
 */
export function loadCurve(file: string): Curve {
  let text: string;
  try {
    text = readFileSync(file, "utf8");
  } catch {
    throw new CsvError(file, "cannot read file");
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new CsvError(file, `parse error: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new CsvError(file, "empty CSV");
  }
  const header = rows[0].map((h) => h.trim());
  if (header.length !== HEADER.length || !HEADER.every((h, i) => header[i] === h)) {
    throw new CsvError(file, `bad header [${rows[0].join(",")}], expected ${HEADER.join(",")}`);
  }
  if (rows.length === 1) {
    throw new CsvError(file, "no data rows");
  }
  const points: CurvePoint[] = [];
  for (const row of rows.slice(1)) {
    if (row.length !== HEADER.length) {
      throw new CsvError(file, `row has ${row.length} fields: [${row.join(",")}]`);
    }
    const x = Number(row[0]);
    const y = Number(row[1]);
    const d = Number(row[3]);
    if (!Number.isFinite(x) || !Number.isFinite(y) || !Number.isInteger(d)) {
      throw new CsvError(file, `non-numeric row: [${row.join(",")}]`);
    }
    points.push({ x, y, fn: row[2], d });
  }
  const id = points[0].fn;
  const d = points[0].d;
  if (!points.every((p) => p.fn === id && p.d === d)) {
    throw new CsvError(file, "mixed function ids or dimensions in one file");
  }
  return { id, d, points };
}
