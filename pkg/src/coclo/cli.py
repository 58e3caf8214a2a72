"""Command-line interface.

Subcommands:

* ``simulate``          synthesize a walk into a sensor log (+ truth table)
* ``replay``            run the filter over a sensor log into a trajectory
* ``compare``           drift metrics of estimate(s) against ground truth
* ``calibrate-contact`` derive contact-force thresholds from a log

Exit codes: 0 on success, 1 on runtime failures (bad data, unreachable
configurations, numerics), 2 on command-line usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import yaml

from .errors import CocloError
from .estimator import FilterConfig, calibrate_contact, load_filter_config
from .kinematics import load_robot_model, reference_hexapod
from .logio import (
    TrajectoryTable,
    read_sensor_log,
    read_trajectory,
    write_sensor_log,
    write_trajectory,
)
from .metrics import comparison_table, drift_report, write_report
from .replay import replay
from .simulator import (
    GaitParams,
    NoiseSpec,
    TerrainProfile,
    recommended_duration,
    simulate,
)


def _load_model(path: str | None):
    return load_robot_model(path) if path else reference_hexapod()


def _cmd_simulate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    gait = GaitParams(
        cycle_time=args.cycle_time,
        body_speed=args.body_speed,
        step_height=args.swing_height,
        settle_time=args.settle_time,
    )
    terrain = TerrainProfile(
        kind=args.terrain,
        extent=args.extent,
        ramp_angle=math.radians(args.ramp_angle_deg),
        step_width=args.stair_width,
        step_height=args.stair_height,
    )
    noise = NoiseSpec.zero() if args.noise == "none" else NoiseSpec.default()
    duration = args.duration if args.duration is not None else recommended_duration(gait, terrain)
    trace = simulate(model, gait, terrain, noise, duration, args.seed, rate_hz=args.rate)
    write_sensor_log(args.out_sensors, trace.frames)
    print(f"wrote {len(trace.frames)} frames ({duration:.2f} s, seed {args.seed}) "
          f"to {args.out_sensors}")
    if args.out_truth:
        write_trajectory(args.out_truth, TrajectoryTable.from_truth(trace.truth))
        print(f"wrote ground truth to {args.out_truth}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    result = replay(args.sensors, args.out, model_path=args.model, config_path=args.config)
    final = result.trajectory.r[-1]
    print(f"wrote {result.trajectory.t.shape[0]} estimates to {args.out}")
    print(f"final position: [{final[0]:.4f}, {final[1]:.4f}, {final[2]:.4f}] m")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    truth = read_trajectory(args.truth)
    reports = {}
    for path in args.estimate:
        estimate = read_trajectory(path)
        reports[Path(path).stem] = drift_report(estimate, truth)
    print(comparison_table(reports))
    if args.out_json:
        if len(reports) == 1:
            write_report(args.out_json, next(iter(reports.values())))
        else:
            import json

            with open(args.out_json, "w", encoding="utf-8") as fh:
                json.dump({k: v.to_dict() for k, v in reports.items()}, fh, indent=2)
                fh.write("\n")
        print(f"wrote drift report to {args.out_json}")
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    frames = read_sensor_log(args.sensors)
    model = _load_model(args.model)
    calib = calibrate_contact(frames, model)
    print(f"f_max = {calib.f_max:.4f} N, f_min = {calib.f_min:.4f} N")
    if args.out:
        payload = {"contact_calibration": {"f_max": calib.f_max, "f_min": calib.f_min}}
        with open(args.out, "w", encoding="utf-8") as fh:
            yaml.safe_dump(payload, fh, sort_keys=False)
        print(f"wrote calibration to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coclo",
        description="Contact-centric leg odometry: simulate, replay, compare.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="synthesize a walk into a sensor log")
    sim.add_argument("--terrain", choices=["flat", "ramp", "stairs"], default="flat")
    sim.add_argument("--extent", type=float, default=6.0,
                     help="path length in meters (square perimeter on flat ground)")
    sim.add_argument("--ramp-angle-deg", type=float, default=16.35)
    sim.add_argument("--stair-width", type=float, default=0.6)
    sim.add_argument("--stair-height", type=float, default=0.15)
    sim.add_argument("--duration", type=float, default=None,
                     help="trace length in seconds (default: settle + walk + settle)")
    sim.add_argument("--rate", type=float, default=100.0, help="sensor rate in Hz")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--noise", choices=["default", "none"], default="default")
    sim.add_argument("--cycle-time", type=float, default=2.0)
    sim.add_argument("--body-speed", type=float, default=0.15)
    sim.add_argument("--swing-height", type=float, default=0.06)
    sim.add_argument("--settle-time", type=float, default=2.0)
    sim.add_argument("--model", default=None, help="robot model YAML (default: built-in hexapod)")
    sim.add_argument("--out-sensors", required=True, help="sensor log output path (JSON lines)")
    sim.add_argument("--out-truth", default=None, help="ground-truth trajectory CSV path")
    sim.set_defaults(func=_cmd_simulate)

    rep = sub.add_parser("replay", help="run the filter over a sensor log")
    rep.add_argument("--sensors", required=True, help="sensor log (JSON lines)")
    rep.add_argument("--out", required=True, help="estimated trajectory CSV path")
    rep.add_argument("--model", default=None, help="robot model YAML (default: built-in hexapod)")
    rep.add_argument("--config", default=None, help="filter configuration YAML")
    rep.set_defaults(func=_cmd_replay)

    cmp_ = sub.add_parser("compare", help="drift metrics against ground truth")
    cmp_.add_argument("--truth", required=True, help="ground-truth trajectory CSV")
    cmp_.add_argument("--estimate", required=True, action="append",
                      help="estimated trajectory CSV (repeatable)")
    cmp_.add_argument("--out-json", default=None,
                      help="drift report JSON (single report, or name-keyed map "
                           "for several estimates)")
    cmp_.set_defaults(func=_cmd_compare)

    cal = sub.add_parser("calibrate-contact", help="derive contact thresholds from a log")
    cal.add_argument("--sensors", required=True, help="sensor log (JSON lines)")
    cal.add_argument("--model", default=None, help="robot model YAML (default: built-in hexapod)")
    cal.add_argument("--out", default=None, help="YAML output mergeable into a filter config")
    cal.set_defaults(func=_cmd_calibrate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CocloError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
