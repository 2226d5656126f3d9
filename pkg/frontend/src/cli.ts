#!/usr/bin/env node
import { CsvError } from "./csv.js";
import { render, type FigureId } from "./figures.js";

const USAGE = `usage: figgen --figure 1|2 --out FILE.svg CSV [CSV ...]

Renders the rate-curve figures from entsampler CSV output:
  figure 1: R, C, upper_qq, upper_cq on axes [-1,1] x [-1,1]
  figure 2: gamma, gamma_d on axes [-1,1] x [0,1]`;

export function main(argv: string[]): number {
  let figure: FigureId | null = null;
  let out: string | null = null;
  const csvs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--figure") {
      const v = argv[++i];
      if (v !== "1" && v !== "2") {
        console.error(`error: --figure must be 1 or 2, got ${v}`);
        return 2;
      }
      figure = Number(v) as FigureId;
    } else if (arg === "--out") {
      out = argv[++i] ?? null;
    } else if (arg === "--help" || arg === "-h") {
      console.log(USAGE);
      return 0;
    } else if (arg.startsWith("--")) {
      console.error(`error: unknown flag ${arg}\n${USAGE}`);
      return 2;
    } else {
      csvs.push(arg);
    }
  }
  if (figure === null || out === null || csvs.length === 0) {
    console.error(`error: --figure, --out and at least one CSV are required\n${USAGE}`);
    return 2;
  }
  try {
    const written = render({ figure, csvFiles: csvs, outFile: out });
    console.log(`wrote ${written}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

import { fileURLToPath } from "node:url";
if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
