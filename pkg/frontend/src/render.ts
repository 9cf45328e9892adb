/** CLI: render lrsim outputs to SVG figures.
 *
 * Usage:
 *   node dist/render.js --style fig2 --samples sweep.csv --fit fit.json --output fig2.svg
 *   node dist/render.js --style fig3 --reports a.json,b.json,c.json --output fig3.svg
 */

import * as fs from "node:fs";
import { parseArgs } from "node:util";
import { parseSamplesCsv } from "./csv.js";
import { renderFig2 } from "./fig2.js";
import { renderFig3 } from "./fig3.js";
import { SchemaError, parseFitModel, parseResourceReport } from "./types.js";

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        style: { type: "string" },
        samples: { type: "string" },
        fit: { type: "string" },
        reports: { type: "string" },
        output: { type: "string" },
      },
      strict: true,
    }).values;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }

  try {
    let svg: string;
    if (args.style === "fig2") {
      if (!args.samples || !args.fit) throw new SchemaError("fig2 needs --samples and --fit");
      const samples = parseSamplesCsv(fs.readFileSync(args.samples, "utf8"));
      const fit = parseFitModel(JSON.parse(fs.readFileSync(args.fit, "utf8")));
      svg = renderFig2(samples, fit);
    } else if (args.style === "fig3") {
      if (!args.reports) throw new SchemaError("fig3 needs --reports (comma-separated JSON paths)");
      const reports = args.reports
        .split(",")
        .filter((p) => p.length > 0)
        .map((p) => parseResourceReport(JSON.parse(fs.readFileSync(p, "utf8"))));
      svg = renderFig3(reports);
    } else {
      throw new SchemaError(`--style must be fig2 or fig3, got ${JSON.stringify(args.style)}`);
    }
    if (args.output) {
      fs.writeFileSync(args.output, svg);
    } else {
      process.stdout.write(svg);
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof SyntaxError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly = process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
