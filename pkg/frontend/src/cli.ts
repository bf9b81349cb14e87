#!/usr/bin/env node
/**
 * Render simulator outputs to SVG.
 *
 *   rllp-plots --kind accel_series --input a.csv --input b.csv --output fig.svg
 *   rllp-plots --kind metric_bars  --input sweep.csv --output bars.svg
 *   rllp-plots --kind trajectory3d --input run.csv --path waypoints.csv --output traj.svg
 */

import { parseArgs } from "node:util";
import { FIGURE_KINDS, FigureKind, FigureSpec } from "./figures";
import { renderToFile } from "./render";

export function specFromArgv(argv: string[]): { spec: FigureSpec; width: number; height: number } {
  const { values } = parseArgs({
    args: argv,
    options: {
      kind: { type: "string" },
      input: { type: "string", multiple: true },
      output: { type: "string" },
      path: { type: "string" },
      width: { type: "string", default: "900" },
      height: { type: "string", default: "560" },
    },
  });
  const kind = values.kind as FigureKind | undefined;
  if (!kind || !FIGURE_KINDS.includes(kind)) {
    throw new Error(`--kind must be one of: ${FIGURE_KINDS.join(", ")}`);
  }
  if (!values.input || values.input.length === 0) {
    throw new Error("at least one --input is required");
  }
  if (!values.output) {
    throw new Error("--output is required");
  }
  return {
    spec: {
      kind,
      inputs: values.input,
      output: values.output,
      pathFile: values.path,
    },
    width: Number(values.width),
    height: Number(values.height),
  };
}

export function main(argv: string[]): number {
  try {
    const { spec, width, height } = specFromArgv(argv);
    renderToFile(spec, width, height);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
