/** Accelerometer-noise series: residual of |accel| around its median.
 *
 * Touchdown impacts show up as sparse large spikes on top of the sensor's
 * white-noise floor, so the baseline level is estimated robustly (median
 * absolute deviation scaled to sigma) and is insensitive to the spikes
 * themselves.
 */

import type { SensorFrame } from "./jsonl";

export interface AccelNoise {
  t: number[];
  /** |accel| minus the log-wide median, m/s^2 (signed). */
  residual: number[];
  /** Robust sigma of the residual (1.4826 x MAD). */
  baselineStd: number;
  /** Largest |residual|. */
  peak: number;
  /** peak / baselineStd (Infinity for an exactly constant signal). */
  peakRatio: number;
  /** Indices where |residual| exceeds 2 x baselineStd. */
  burstIndices: number[];
}

export function median(values: number[]): number {
  if (values.length === 0) throw new Error("median of empty array");
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 === 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

/** Robust standard deviation: 1.4826 x median absolute deviation. */
export function robustStd(values: number[]): number {
  const center = median(values);
  return 1.4826 * median(values.map((v) => Math.abs(v - center)));
}

export function accelNoise(frames: SensorFrame[]): AccelNoise {
  const t = frames.map((f) => f.t);
  const mag = frames.map((f) => Math.hypot(f.accel[0], f.accel[1], f.accel[2]));
  const center = median(mag);
  const residual = mag.map((m) => m - center);
  const baselineStd = robustStd(residual);
  let peak = 0;
  for (const r of residual) peak = Math.max(peak, Math.abs(r));
  const threshold = 2 * baselineStd;
  const burstIndices: number[] = [];
  if (baselineStd > 0) {
    for (let i = 0; i < residual.length; i++) {
      if (Math.abs(residual[i]) > threshold) burstIndices.push(i);
    }
  }
  return {
    t,
    residual,
    baselineStd,
    peak,
    peakRatio: baselineStd > 0 ? peak / baselineStd : peak > 0 ? Infinity : 0,
    burstIndices,
  };
}
