/** Command line: render one figure from sparsectl CSV outputs.
 *
 *   node dist/cli.js --kind decay --inputs a.csv,b.csv --out fig.svg [--log]
 *
 * Exit codes: 0 on success, 1 for schema/data errors (the message names
 * the missing column), 2 for usage errors.
 */

import { writeFileSync } from "fs";

import { readTable, SchemaError } from "./csv";
import { FigureKind, FigureRequest, renderFigure } from "./render";

const KINDS: FigureKind[] = ["decay", "components", "sensors"];
const USAGE =
  "usage: cli --kind decay|components|sensors --inputs a.csv[,b.csv...] " +
  "--out figure.svg [--log]";

export function parseArgs(argv: string[]): FigureRequest {
  let kind: string | undefined;
  let inputs: string[] = [];
  let output: string | undefined;
  let logScale = false;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new UsageError(`${arg} needs a value`);
      return argv[i];
    };
    if (arg === "--kind") kind = next();
    else if (arg === "--inputs") {
      inputs = inputs.concat(next().split(",").filter((s) => s.length > 0));
    } else if (arg === "--out") output = next();
    else if (arg === "--log") logScale = true;
    else throw new UsageError(`unknown argument ${arg}`);
  }
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`--kind must be one of ${KINDS.join("|")}`);
  }
  if (inputs.length === 0) throw new UsageError("--inputs is required");
  if (!output) throw new UsageError("--out is required");
  return { kind: kind as FigureKind, inputs, output, logScale };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let request: FigureRequest;
  try {
    request = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  try {
    const tables = request.inputs.map(readTable);
    const svg = renderFigure(tables, request);
    writeFileSync(request.output, svg);
    console.log(
      `wrote ${request.output} (${request.kind}, ${tables.length} input${
        tables.length === 1 ? "" : "s"
      })`,
    );
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code !== undefined) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
