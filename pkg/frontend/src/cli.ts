#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./csv.js";
import { FIGURES } from "./index.js";

const EXIT_SCHEMA_ERROR = 2;

export function run(figureId: string, inDir: string, outFile: string): void {
  const render = FIGURES[figureId];
  if (!render) {
    throw new Error(`unknown figure id ${figureId}; choose from ${Object.keys(FIGURES).join(", ")}`);
  }
  writeFileSync(outFile, render(inDir));
}

const argv = yargs(hideBin(process.argv))
  .scriptName("plot")
  .command("$0 <figure-id>", "render one figure from a run output directory", (cmd) =>
    cmd
      .positional("figure-id", {
        type: "string",
        choices: Object.keys(FIGURES),
        describe: "which figure to render",
      })
      .option("in", {
        type: "string",
        demandOption: true,
        describe: "experiment output directory (the CLI's --out)",
      })
      .option("out", {
        type: "string",
        demandOption: true,
        describe: "output SVG file path",
      }),
  )
  .strict()
  .parseSync();

try {
  run(argv["figure-id"] as string, argv.in as string, argv.out as string);
  console.log(`wrote ${argv.out}`);
} catch (error) {
  if (error instanceof SchemaError) {
    console.error(error.message);
    process.exit(EXIT_SCHEMA_ERROR);
  }
  console.error(error instanceof Error ? error.message : String(error));
  process.exit(1);
}
