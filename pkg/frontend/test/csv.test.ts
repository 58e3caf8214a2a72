import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { parseTrajectoryCsv, readTrajectory } from "../src/csv";

const FIXTURES = join(__dirname, "..", "fixtures");

const TINY_HEADER =
  "t,x,y,z,qx,qy,qz,qw,vx,vy,vz," +
  "foot0_x,foot0_y,foot0_z,contact0";

function tinyRow(t: number): string {
  return `${t},1,2,3,0,0,0,1,0.1,0.2,0.3,9,9,9,1`;
}

describe("trajectory CSV", () => {
  it("reads the committed fixture", () => {
    const truth = readTrajectory(join(FIXTURES, "truth.csv"));
    expect(truth.nLegs).toBe(6);
    expect(truth.t.length).toBe(401);
    expect(truth.t[0]).toBe(0);
    for (let i = 1; i < truth.t.length; i++) {
      expect(truth.t[i]).toBeGreaterThan(truth.t[i - 1]);
    }
    expect(truth.x.length).toBe(truth.t.length);
    expect(truth.vz.length).toBe(truth.t.length);
  });

  it("parses values into the right columns", () => {
    const table = parseTrajectoryCsv([TINY_HEADER, tinyRow(0), tinyRow(0.5)].join("\n"));
    expect(table.nLegs).toBe(1);
    expect(table.t).toEqual([0, 0.5]);
    expect(table.x).toEqual([1, 1]);
    expect(table.z).toEqual([3, 3]);
    expect(table.vy).toEqual([0.2, 0.2]);
  });

  it("rejects a wrong header column by name", () => {
    const bad = TINY_HEADER.replace(",qw,", ",qq,");
    expect(() => parseTrajectoryCsv([bad, tinyRow(0)].join("\n"), "bad.csv")).toThrow(
      /bad.csv:1: .*"qq", expected "qw"/,
    );
  });

  it("rejects a ragged row with its line number", () => {
    const content = [TINY_HEADER, tinyRow(0), "1,2,3"].join("\n");
    expect(() => parseTrajectoryCsv(content, "r.csv")).toThrow(/r.csv:3: expected 15 columns, got 3/);
  });

  it("rejects non-numeric cells with column name and line number", () => {
    const content = [TINY_HEADER, tinyRow(0).replace("0.2", "oops")].join("\n");
    expect(() => parseTrajectoryCsv(content, "n.csv")).toThrow(/n.csv:2: column "vy" is not a number/);
  });

  it("rejects empty input and header-only input", () => {
    expect(() => parseTrajectoryCsv("", "e.csv")).toThrow(/e.csv:1: empty/);
    expect(() => parseTrajectoryCsv(TINY_HEADER, "h.csv")).toThrow(/h.csv:1: .*no rows/);
  });

  it("fixture files agree on schema", () => {
    const est = readFileSync(join(FIXTURES, "estimate.csv"), "utf8");
    const tru = readFileSync(join(FIXTURES, "truth.csv"), "utf8");
    expect(est.split("\n")[0]).toBe(tru.split("\n")[0]);
  });
});
