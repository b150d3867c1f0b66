#!/usr/bin/env node
// plot <kind> --in <csv...> --out <img.svg>
//
// kinds: ler_curves | threshold | histogram. Inputs are the evaluator's
// CSV files; output is a deterministic SVG. Exit 0 on success, 1 on bad
// usage or malformed/empty input (message names the offending row).

import { readFileSync, writeFileSync } from "node:fs";
import { parseHistCsv, parseResultsCsv } from "./csv.js";
import { plotHist, plotLer, plotThreshold } from "./plots.js";

export interface FigureSpec {
  kind: string;
  inputs: string[];
  out: string;
  logY: boolean;
}

export function parseArgs(argv: string[]): FigureSpec {
  const [kind, ...rest] = argv;
  if (!kind || kind.startsWith("--")) throw new Error("usage: plot <kind> --in <csv...> --out <img>");
  const inputs: string[] = [];
  let out = "";
  let logY = true;
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i];
    if (flag === "--in") {
      const v = rest[++i];
      if (!v) throw new Error("--in needs a path");
      inputs.push(v);
    } else if (flag === "--out") {
      const v = rest[++i];
      if (!v) throw new Error("--out needs a path");
      out = v;
    } else if (flag === "--linear-y") {
      logY = false;
    } else {
      throw new Error(`unknown flag ${flag}`);
    }
  }
  if (inputs.length === 0) throw new Error("at least one --in CSV is required");
  if (!out) throw new Error("--out is required");
  return { kind, inputs, out, logY };
}

export function render(spec: Pick<FigureSpec, "kind" | "logY">, csvTexts: string[]): string {
  switch (spec.kind) {
    case "ler_curves":
      return plotLer(csvTexts.flatMap(parseResultsCsv), { logY: spec.logY });
    case "threshold":
      return plotThreshold(csvTexts.flatMap(parseResultsCsv), { logY: spec.logY });
    case "histogram": {
      if (csvTexts.length !== 1) throw new Error("histogram takes exactly one CSV");
      return plotHist(parseHistCsv(csvTexts[0]!));
    }
    default:
      throw new Error(`unknown figure kind ${spec.kind}; use ler_curves | threshold | histogram`);
  }
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const texts = spec.inputs.map((p) => readFileSync(p, "utf8"));
    writeFileSync(spec.out, render(spec, texts));
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

// run when invoked directly (node dist/cli.js ...), not when imported
if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
