/** Sensor-log reader: JSON lines, one frame per line.
 *
 * Each record holds t (seconds), per-leg joint arrays (angles,
 * velocities, torques), and body-frame gyro/accel 3-vectors.
 */

import { readFileSync } from "node:fs";

export interface SensorFrame {
  t: number;
  angles: number[][];
  velocities: number[][];
  torques: number[][];
  gyro: [number, number, number];
  accel: [number, number, number];
}

function numberArray(value: unknown, where: string): number[] {
  if (!Array.isArray(value) || value.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
    throw new Error(`${where} must be an array of finite numbers`);
  }
  return value as number[];
}

function vec3(value: unknown, where: string): [number, number, number] {
  const arr = numberArray(value, where);
  if (arr.length !== 3) throw new Error(`${where} must have 3 entries, got ${arr.length}`);
  return [arr[0], arr[1], arr[2]];
}

function jointMatrix(value: unknown, where: string): number[][] {
  if (!Array.isArray(value) || value.length === 0) {
    throw new Error(`${where} must be a non-empty array of per-leg arrays`);
  }
  return value.map((leg, i) => numberArray(leg, `${where}[${i}]`));
}

export function parseSensorLog(content: string, path = "<string>"): SensorFrame[] {
  const frames: SensorFrame[] = [];
  const lines = content.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const lineno = i + 1;
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path}:${lineno}: invalid JSON: ${(err as Error).message}`);
    }
    if (typeof record !== "object" || record === null) {
      throw new Error(`${path}:${lineno}: record must be an object`);
    }
    const rec = record as Record<string, unknown>;
    try {
      if (typeof rec.t !== "number" || !Number.isFinite(rec.t)) {
        throw new Error(`"t" must be a finite number`);
      }
      frames.push({
        t: rec.t,
        angles: jointMatrix(rec.angles, '"angles"'),
        velocities: jointMatrix(rec.velocities, '"velocities"'),
        torques: jointMatrix(rec.torques, '"torques"'),
        gyro: vec3(rec.gyro, '"gyro"'),
        accel: vec3(rec.accel, '"accel"'),
      });
    } catch (err) {
      throw new Error(`${path}:${lineno}: ${(err as Error).message}`);
    }
  }
  if (frames.length === 0) {
    throw new Error(`${path}:1: sensor log is empty`);
  }
  return frames;
}

export function readSensorLog(path: string): SensorFrame[] {
  return parseSensorLog(readFileSync(path, "utf8"), path);
}
