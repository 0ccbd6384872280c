/** Minimal CSV reading with schema validation against the documented headers. */

export interface Table {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV input");
  }
  const header = lines[0]!.split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new SchemaError(
        `row has ${row.length} cells, header has ${header.length}`,
      );
    }
  }
  return { header, rows };
}

export const RUNS_HEADER = [
  "trial", "task", "phase", "policy", "samples", "decision",
  "mu", "reward", "cum_reward", "cum_cost", "candidates",
];

/** Raise with an explicit column diff when the header is not as documented. */
export function requireColumns(table: Table, expected: string[], label: string): void {
  const have = new Set(table.header);
  const want = new Set(expected);
  const missing = expected.filter((c) => !have.has(c));
  const extra = table.header.filter((c) => !want.has(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${label}: missing columns [${missing.join(", ")}]` +
        (extra.length > 0 ? `; unexpected columns [${extra.join(", ")}]` : ""),
    );
  }
}

export function column(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column ${name}`);
  }
  return table.rows.map((row) => row[idx]!);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((cell) => {
    const value = Number(cell);
    if (!Number.isFinite(value)) {
      throw new SchemaError(`column ${name} has non-numeric cell ${JSON.stringify(cell)}`);
    }
    return value;
  });
}
