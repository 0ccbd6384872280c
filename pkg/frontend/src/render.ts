/** Figure-spec dispatch: read CSV inputs, render SVG, write the output file. */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseCsv, SchemaError, Table } from "./csv";
import {
  renderCandidatesTrace,
  renderCoverageBars,
  renderEscTimeline,
  renderRegretCurve,
} from "./figures";

export const FIGURE_KINDS = [
  "regret_curve",
  "candidates_trace",
  "coverage_bars",
  "esc_timeline",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  input: string | string[];
  output: string;
}

export function parseSpec(raw: unknown): FigureSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("spec must be a JSON object");
  }
  const spec = raw as Record<string, unknown>;
  const kind = spec["kind"];
  if (typeof kind !== "string" || !FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new Error(`spec.kind must be one of ${FIGURE_KINDS.join(", ")}`);
  }
  const input = spec["input"];
  const inputOk =
    typeof input === "string" ||
    (Array.isArray(input) && input.length > 0 && input.every((p) => typeof p === "string"));
  if (!inputOk) {
    throw new Error("spec.input must be a CSV path or a nonempty list of paths");
  }
  if (typeof spec["output"] !== "string") {
    throw new Error("spec.output must be a file path");
  }
  return { kind: kind as FigureKind, input: input as string | string[], output: spec["output"] as string };
}

export function renderTable(kind: FigureKind, table: Table): string {
  switch (kind) {
    case "regret_curve":
      return renderRegretCurve(table);
    case "candidates_trace":
      return renderCandidatesTrace(table);
    case "coverage_bars":
      return renderCoverageBars(table);
    case "esc_timeline":
      return renderEscTimeline(table);
  }
}

/** Render one spec; inputs are read-only and the output directory is created. */
export function render(spec: FigureSpec): string {
  const inputs = Array.isArray(spec.input) ? spec.input : [spec.input];
  for (const file of inputs) {
    if (!fs.existsSync(file)) {
      throw new Error(`input not found: ${file}`);
    }
  }
  const table = parseCsv(fs.readFileSync(inputs[0]!, "utf-8"));
  const svg = renderTable(spec.kind, table);
  fs.mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  fs.writeFileSync(spec.output, svg, "utf-8");
  return spec.output;
}

export { SchemaError };
