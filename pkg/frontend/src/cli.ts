#!/usr/bin/env node
/** `plots render --spec spec.json`: batch figure rendering from CSV files. */

import * as fs from "node:fs";

import { SchemaError } from "./csv";
import { parseSpec, render } from "./render";

function usage(): void {
  process.stderr.write("usage: plots render --spec <spec.json>\n");
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    usage();
    return 1;
  }
  const flag = argv.indexOf("--spec");
  const specPath = flag >= 0 ? argv[flag + 1] : undefined;
  if (!specPath) {
    usage();
    return 1;
  }
  try {
    const spec = parseSpec(JSON.parse(fs.readFileSync(specPath, "utf-8")));
    const output = render(spec);
    process.stdout.write(`${spec.kind} -> ${output}\n`);
    return 0;
  } catch (err) {
    const prefix = err instanceof SchemaError ? "schema mismatch" : "error";
    process.stderr.write(`${prefix}: ${err instanceof Error ? err.message : String(err)}\n`);
    return err instanceof SchemaError ? 2 : 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
