import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { accelNoise, median, robustStd } from "../src/accel";
import type { SensorFrame } from "../src/jsonl";
import { readSensorLog } from "../src/jsonl";

const FIXTURES = join(__dirname, "..", "fixtures");

function frameAt(t: number, accel: [number, number, number]): SensorFrame {
  return { t, angles: [[0]], velocities: [[0]], torques: [[0]], gyro: [0, 0, 0], accel };
}

describe("median / robustStd", () => {
  it("median handles odd and even lengths", () => {
    expect(median([3, 1, 2])).toBe(2);
    expect(median([4, 1, 2, 3])).toBe(2.5);
  });

  it("robust std matches the gaussian factor on a symmetric set", () => {
    // MAD of {-1, 0, 1} is 1 -> 1.4826
    expect(robustStd([-1, 0, 1])).toBeCloseTo(1.4826, 12);
  });

  it("robust std ignores a single huge outlier", () => {
    const values = [0, 1, -1, 0.5, -0.5, 1000];
    expect(robustStd(values)).toBeLessThan(2);
  });
});

describe("accelNoise", () => {
  it("touchdown bursts in the fixture peak above twice the baseline std", () => {
    const noise = accelNoise(readSensorLog(join(FIXTURES, "sensors.jsonl")));
    expect(noise.baselineStd).toBeGreaterThan(0);
    expect(noise.peak).toBeGreaterThan(2 * noise.baselineStd);
    expect(noise.peakRatio).toBeGreaterThan(2);
    expect(noise.burstIndices.length).toBeGreaterThan(0);
  });

  it("flags a synthetic spike over a quiet floor", () => {
    const frames: SensorFrame[] = [];
    for (let i = 0; i < 200; i++) {
      const wobble = 0.01 * Math.sin(i * 1.7);
      frames.push(frameAt(i * 0.01, [0, 0, 9.81 + wobble]));
    }
    frames[120] = frameAt(1.2, [0, 0, 9.81 + 3.0]);
    const noise = accelNoise(frames);
    expect(noise.peakRatio).toBeGreaterThan(2);
    expect(noise.burstIndices).toContain(120);
  });

  it("a constant signal has zero baseline and no bursts", () => {
    const frames = Array.from({ length: 50 }, (_, i) => frameAt(i * 0.01, [0, 0, 9.81]));
    const noise = accelNoise(frames);
    expect(noise.baselineStd).toBe(0);
    expect(noise.peak).toBe(0);
    expect(noise.peakRatio).toBe(0);
    expect(noise.burstIndices).toEqual([]);
  });

  it("residuals are centered on the median magnitude", () => {
    const frames = [frameAt(0, [0, 0, 9]), frameAt(0.1, [0, 0, 10]), frameAt(0.2, [0, 0, 11])];
    const noise = accelNoise(frames);
    expect(noise.residual).toEqual([-1, 0, 1]);
  });
});
