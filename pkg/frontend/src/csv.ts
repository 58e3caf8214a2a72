/** Trajectory CSV reader.
 *
 * Schema: t,x,y,z,qx,qy,qz,qw,vx,vy,vz, then foot{i}_x/_y/_z per leg,
 * then contact{i} per leg.  Parse errors carry `path:line:` prefixes.
 */

import { readFileSync } from "node:fs";

export interface Trajectory {
  t: number[];
  x: number[];
  y: number[];
  z: number[];
  vx: number[];
  vy: number[];
  vz: number[];
  nLegs: number;
}

const POSE_COLUMNS = ["t", "x", "y", "z", "qx", "qy", "qz", "qw", "vx", "vy", "vz"];

function expectedHeader(nLegs: number): string[] {
  const cols = [...POSE_COLUMNS];
  for (let i = 0; i < nLegs; i++) cols.push(`foot${i}_x`, `foot${i}_y`, `foot${i}_z`);
  for (let i = 0; i < nLegs; i++) cols.push(`contact${i}`);
  return cols;
}

export function parseTrajectoryCsv(content: string, path = "<string>"): Trajectory {
  const lines = content.split(/\r?\n/).filter((line, i) => line.length > 0 || i === 0);
  if (lines.length === 0 || lines[0].length === 0) {
    throw new Error(`${path}:1: empty trajectory file`);
  }
  const header = lines[0].split(",");
  const extra = header.length - POSE_COLUMNS.length;
  if (extra < 0 || extra % 4 !== 0) {
    throw new Error(
      `${path}:1: expected ${POSE_COLUMNS.length} pose columns plus 4 per leg, got ${header.length}`,
    );
  }
  const nLegs = extra / 4;
  const want = expectedHeader(nLegs);
  for (let i = 0; i < want.length; i++) {
    if (header[i] !== want[i]) {
      throw new Error(`${path}:1: column ${i} is "${header[i]}", expected "${want[i]}"`);
    }
  }

  const out: Trajectory = { t: [], x: [], y: [], z: [], vx: [], vy: [], vz: [], nLegs };
  for (let row = 1; row < lines.length; row++) {
    const cells = lines[row].split(",");
    if (cells.length !== want.length) {
      throw new Error(`${path}:${row + 1}: expected ${want.length} columns, got ${cells.length}`);
    }
    const nums = new Array<number>(POSE_COLUMNS.length);
    for (let i = 0; i < POSE_COLUMNS.length; i++) {
      const v = Number(cells[i]);
      if (cells[i].trim() === "" || Number.isNaN(v)) {
        throw new Error(`${path}:${row + 1}: column "${want[i]}" is not a number: "${cells[i]}"`);
      }
      nums[i] = v;
    }
    out.t.push(nums[0]);
    out.x.push(nums[1]);
    out.y.push(nums[2]);
    out.z.push(nums[3]);
    out.vx.push(nums[8]);
    out.vy.push(nums[9]);
    out.vz.push(nums[10]);
  }
  if (out.t.length === 0) {
    throw new Error(`${path}:1: trajectory has a header but no rows`);
  }
  return out;
}

export function readTrajectory(path: string): Trajectory {
  return parseTrajectoryCsv(readFileSync(path, "utf8"), path);
}
