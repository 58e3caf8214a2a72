#!/usr/bin/env node
/** Command-line entry: render one figure from trajectory/sensor files.
 *
 * Usage:
 *   coclo-plot plot --kind <kind> --in <path> [--in <path> ...]
 *                   [--truth <path>] --out <figure.svg>
 *
 * Kinds: xy-trajectory, per-axis-position, velocity (trajectory CSVs in,
 * optional truth overlay) and accel-noise (one sensor JSONL in).
 * Exit codes: 0 ok, 1 data/file errors, 2 usage errors.
 */

import { parseArgs } from "node:util";
import { writeFileSync } from "node:fs";
import { basename, extname } from "node:path";

import { readTrajectory } from "./csv";
import { readSensorLog } from "./jsonl";
import {
  accelNoiseFigure,
  perAxisPositionFigure,
  velocityFigure,
  xyTrajectoryFigure,
} from "./figures";

export const KINDS = ["xy-trajectory", "per-axis-position", "velocity", "accel-noise"] as const;
export type FigureKind = (typeof KINDS)[number];

const USAGE =
  "usage: coclo-plot plot --kind {" +
  KINDS.join(",") +
  "} --in PATH [--in PATH ...] [--truth PATH] --out FIGURE.svg";

class UsageError extends Error {}

function stem(path: string): string {
  return basename(path, extname(path));
}

export function renderFigure(
  kind: FigureKind,
  inputs: string[],
  truthPath: string | undefined,
): string {
  if (kind === "accel-noise") {
    if (inputs.length !== 1) {
      throw new UsageError("accel-noise takes exactly one --in sensor log");
    }
    return accelNoiseFigure(readSensorLog(inputs[0]));
  }
  const truth = truthPath ? readTrajectory(truthPath) : null;
  const estimates = inputs.map((p) => ({ name: stem(p), table: readTrajectory(p) }));
  switch (kind) {
    case "xy-trajectory":
      return xyTrajectoryFigure(truth, estimates);
    case "per-axis-position":
      return perAxisPositionFigure(truth, estimates);
    case "velocity":
      return velocityFigure(truth, estimates);
  }
}

export function main(argv: string[]): number {
  try {
    if (argv.length === 0 || argv[0] !== "plot") {
      throw new UsageError(argv.length === 0 ? "missing subcommand" : `unknown subcommand "${argv[0]}"`);
    }
    let parsed;
    try {
      parsed = parseArgs({
        args: argv.slice(1),
        options: {
          kind: { type: "string" },
          in: { type: "string", multiple: true },
          truth: { type: "string" },
          out: { type: "string" },
        },
        allowPositionals: false,
      });
    } catch (err) {
      throw new UsageError((err as Error).message);
    }
    const { kind, in: inputs, truth, out } = parsed.values;
    if (!kind || !KINDS.includes(kind as FigureKind)) {
      throw new UsageError(`--kind must be one of {${KINDS.join(",")}}, got "${kind ?? ""}"`);
    }
    if (!inputs || inputs.length === 0) throw new UsageError("at least one --in is required");
    if (!out) throw new UsageError("--out is required");
    if (extname(out).toLowerCase() !== ".svg") {
      throw new UsageError(`--out must end in .svg, got "${out}"`);
    }

    const svg = renderFigure(kind as FigureKind, inputs, truth);
    writeFileSync(out, svg + "\n", "utf8");
    process.stderr.write(`wrote ${kind} figure to ${out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`error: ${err.message}\n${USAGE}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
