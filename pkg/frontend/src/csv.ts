/**
 * Reader for the simulator's CSV output format: a block of `#`-prefixed
 * header lines (tool banner plus sorted `key=value` metadata), then a
 * column-header row and the data rows.
 */

import Papa from "papaparse";

/** A cell is a number, a bare string, or null for an empty field. */
export type Cell = number | string | null;

export interface CsvTable {
  /** `key=value` pairs from the `#` header block. */
  meta: Record<string, string>;
  /** Tool banner (first `#` line that is not `key=value`), if present. */
  tool: string | null;
  /** Column names, in file order. */
  columns: string[];
  /** One record per data row, keyed by column name. */
  rows: Record<string, Cell>[];
}

/** Raised when a CSV file does not match the expected shape. */
export class CsvFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvFormatError";
  }
}

function toCell(raw: string): Cell {
  if (raw === "") {
    return null;
  }
  const n = Number(raw);
  return Number.isFinite(n) ? n : raw;
}

/** Parse CSV text into a table; throws CsvFormatError on malformed input. */
export function parseCsv(text: string): CsvTable {
  const meta: Record<string, string> = {};
  let tool: string | null = null;

  const lines = text.split(/\r?\n/);
  let body = 0;
  while (body < lines.length) {
    const line = lines[body];
    if (line === undefined || !line.startsWith("#")) {
      break;
    }
    const stripped = line.slice(1).trim();
    const eq = stripped.indexOf("=");
    if (eq > 0) {
      meta[stripped.slice(0, eq)] = stripped.slice(eq + 1);
    } else if (tool === null && stripped !== "") {
      tool = stripped;
    }
    body += 1;
  }

  const bodyText = lines.slice(body).join("\n");
  if (bodyText.trim() === "") {
    throw new CsvFormatError("malformed CSV: missing column header row");
  }
  const parsed = Papa.parse<string[]>(bodyText, {
    skipEmptyLines: true,
    delimiter: ",",
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvFormatError(`malformed CSV: ${first?.message ?? "parse error"}`);
  }

  const grid = parsed.data;
  const header = grid[0];
  if (header === undefined || header.length === 0 || header[0] === "") {
    throw new CsvFormatError("malformed CSV: missing column header row");
  }
  const columns = [...header];

  const rows: Record<string, Cell>[] = [];
  for (let i = 1; i < grid.length; i += 1) {
    const raw = grid[i];
    if (raw === undefined) {
      continue;
    }
    if (raw.length !== columns.length) {
      throw new CsvFormatError(
        `malformed CSV: row ${i} has ${raw.length} fields, expected ${columns.length}`,
      );
    }
    const record: Record<string, Cell> = {};
    columns.forEach((name, j) => {
      record[name] = toCell(raw[j] ?? "");
    });
    rows.push(record);
  }

  if (rows.length === 0) {
    throw new CsvFormatError("empty CSV: no data rows");
  }
  return { meta, tool, columns, rows };
}

/** Assert that a table carries every named column; throws CsvFormatError. */
export function requireColumns(table: CsvTable, names: string[]): void {
  const missing = names.filter((n) => !table.columns.includes(n));
  if (missing.length > 0) {
    throw new CsvFormatError(`missing expected column(s): ${missing.join(", ")}`);
  }
}

/** Read a cell that must be a finite number; throws CsvFormatError. */
export function numberAt(row: Record<string, Cell>, column: string): number {
  const v = row[column];
  if (typeof v !== "number") {
    throw new CsvFormatError(`column '${column}' holds non-numeric value '${String(v)}'`);
  }
  return v;
}
