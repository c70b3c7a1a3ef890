/**
 * Command line: render one figure from simulator CSV output.
 *
 *   render --kind <ber-curves|ring-ratio|efficiency> \
 *          --in <csv> [--in <csv> ...] --out <svg> [--y-min v] [--y-max v]
 *
 * Exit codes: 0 success; 1 usage or input error (malformed/empty CSV,
 * unreadable file, bad flag); 2 unexpected runtime error.  The output file
 * is written only after the figure has rendered completely, so a failing
 * run never leaves a file behind.
 */

import { parseArgs } from "node:util";
import { mkdir, readFile, writeFile } from "node:fs/promises";
import path from "node:path";
import { pathToFileURL } from "node:url";

import { CsvFormatError, parseCsv } from "./csv.js";
import {
  buildFigure,
  FIGURE_KINDS,
  FigureConfigError,
  type FigureInput,
  type FigureKind,
} from "./figures.js";
import { renderLineChart } from "./chart.js";

const USAGE = `usage: render --kind <${FIGURE_KINDS.join("|")}> --in <csv> [--in <csv> ...] --out <svg>
              [--y-min <value>] [--y-max <value>]

Renders one SVG figure from simulator CSV output.  "ber-curves" accepts
several --in files (curves are merged into one chart); the other kinds
take exactly one.  Rendering depends only on the CSV bytes, so identical
inputs produce identical SVG bytes.`;

class UsageError extends Error {}

function parseBound(name: string, raw: string | undefined): number | undefined {
  if (raw === undefined) {
    return undefined;
  }
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new UsageError(`--${name} expects a number, got '${raw}'`);
  }
  return v;
}

/** Run the renderer; returns the process exit code. */
export async function runCli(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string", multiple: true },
        out: { type: "string" },
        "y-min": { type: "string" },
        "y-max": { type: "string" },
        help: { type: "boolean" },
      },
      strict: true,
      allowPositionals: false,
    }));
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }

  if (values.help === true) {
    process.stdout.write(`${USAGE}\n`);
    return 0;
  }

  try {
    const kind = values.kind;
    if (kind === undefined || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
      throw new UsageError(
        `--kind must be one of ${FIGURE_KINDS.join(", ")}, got '${kind ?? ""}'`,
      );
    }
    const inPaths = values.in ?? [];
    if (inPaths.length === 0) {
      throw new UsageError("at least one --in CSV is required");
    }
    const out = values.out;
    if (out === undefined) {
      throw new UsageError("--out is required");
    }
    const opts = {
      yMin: parseBound("y-min", values["y-min"]),
      yMax: parseBound("y-max", values["y-max"]),
    };

    const inputs: FigureInput[] = [];
    for (const p of inPaths) {
      let textContent: string;
      try {
        textContent = await readFile(p, "utf8");
      } catch {
        throw new UsageError(`cannot read input CSV: ${p}`);
      }
      try {
        inputs.push({ name: path.basename(p), table: parseCsv(textContent) });
      } catch (err) {
        if (err instanceof CsvFormatError) {
          throw new CsvFormatError(`${p}: ${err.message}`);
        }
        throw err;
      }
    }

    const svg = renderLineChart(buildFigure(kind as FigureKind, inputs, opts));

    const dir = path.dirname(out);
    if (dir !== "") {
      await mkdir(dir, { recursive: true });
    }
    await writeFile(out, svg, "utf8");
    process.stdout.write(`wrote ${out}\n`);
    return 0;
  } catch (err) {
    if (
      err instanceof UsageError ||
      err instanceof CsvFormatError ||
      err instanceof FigureConfigError
    ) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(
      `runtime error: ${err instanceof Error ? err.message : String(err)}\n`,
    );
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
