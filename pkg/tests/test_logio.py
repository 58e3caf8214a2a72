"""Sensor-log and trajectory file formats: exact round trips, line errors."""

import json

import numpy as np
import pytest

from coclo.errors import OrderingError, SchemaError
from coclo.logio import (
    TrajectoryTable,
    read_sensor_log,
    read_trajectory,
    write_sensor_log,
    write_trajectory,
)


@pytest.fixture()
def sensors_path(tmp_path, short_flat):
    path = tmp_path / "sensors.jsonl"
    write_sensor_log(path, short_flat.frames)
    return path


def test_sensor_log_round_trip_is_bit_exact(sensors_path, short_flat):
    frames = read_sensor_log(sensors_path)
    assert len(frames) == len(short_flat.frames)
    for a, b in zip(frames, short_flat.frames):
        assert a.timestamp == b.timestamp
        assert np.array_equal(a.joint_angles, b.joint_angles)
        assert np.array_equal(a.joint_velocities, b.joint_velocities)
        assert np.array_equal(a.joint_torques, b.joint_torques)
        assert np.array_equal(a.gyro, b.gyro)
        assert np.array_equal(a.accel, b.accel)


def test_sensor_log_is_json_lines(sensors_path):
    with open(sensors_path) as fh:
        first = json.loads(fh.readline())
    assert set(first) == {"t", "angles", "velocities", "torques", "gyro", "accel"}


def test_read_rejects_missing_key(tmp_path, sensors_path):
    lines = sensors_path.read_text().splitlines()
    record = json.loads(lines[1])
    del record["gyro"]
    lines[1] = json.dumps(record)
    bad = tmp_path / "missing.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError) as err:
        read_sensor_log(bad)
    assert ":2:" in str(err.value)  # the offending line is named


def test_read_rejects_extra_key(tmp_path, sensors_path):
    lines = sensors_path.read_text().splitlines()
    record = json.loads(lines[0])
    record["extra"] = 1
    lines[0] = json.dumps(record)
    bad = tmp_path / "extra.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError) as err:
        read_sensor_log(bad)
    assert ":1:" in str(err.value)


def test_read_rejects_invalid_json(tmp_path):
    bad = tmp_path / "broken.jsonl"
    bad.write_text('{"t": 0.0, "angles": [[0,0,0]]\n')
    with pytest.raises(SchemaError):
        read_sensor_log(bad)


def test_read_rejects_non_increasing_time(tmp_path, sensors_path):
    lines = sensors_path.read_text().splitlines()
    first, second = json.loads(lines[0]), json.loads(lines[1])
    second["t"] = first["t"]  # duplicate timestamp
    lines[1] = json.dumps(second)
    bad = tmp_path / "unordered.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(OrderingError):
        read_sensor_log(bad)


def test_read_rejects_inconsistent_shapes(tmp_path, sensors_path):
    lines = sensors_path.read_text().splitlines()
    record = json.loads(lines[1])
    record["angles"] = record["angles"][:3]  # drop legs mid-log
    lines[1] = json.dumps(record)
    bad = tmp_path / "shapes.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError):
        read_sensor_log(bad)


def test_read_rejects_empty_log(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(SchemaError):
        read_sensor_log(empty)


# --- trajectory CSV -----------------------------------------------------------


@pytest.fixture()
def truth_table(short_flat):
    return TrajectoryTable.from_truth(short_flat.truth)


def test_trajectory_round_trip_is_bit_exact(tmp_path, truth_table):
    path = tmp_path / "truth.csv"
    write_trajectory(path, truth_table)
    back = read_trajectory(path)
    assert np.array_equal(back.t, truth_table.t)
    assert np.array_equal(back.r, truth_table.r)
    assert np.array_equal(back.q, truth_table.q)
    assert np.array_equal(back.v, truth_table.v)
    assert np.array_equal(back.foot_pos, truth_table.foot_pos)
    assert np.array_equal(back.contact, truth_table.contact)


def test_trajectory_header_is_validated(tmp_path, truth_table):
    path = tmp_path / "truth.csv"
    write_trajectory(path, truth_table)
    lines = path.read_text().splitlines()
    lines[0] = lines[0].replace("qx", "QX")
    (tmp_path / "bad.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError):
        read_trajectory(tmp_path / "bad.csv")


def test_trajectory_rejects_ragged_rows(tmp_path, truth_table):
    path = tmp_path / "truth.csv"
    write_trajectory(path, truth_table)
    lines = path.read_text().splitlines()
    lines[3] = ",".join(lines[3].split(",")[:-2])
    (tmp_path / "ragged.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError):
        read_trajectory(tmp_path / "ragged.csv")


def test_trajectory_rejects_non_numeric(tmp_path, truth_table):
    path = tmp_path / "truth.csv"
    write_trajectory(path, truth_table)
    lines = path.read_text().splitlines()
    cells = lines[2].split(",")
    cells[1] = "oops"
    lines[2] = ",".join(cells)
    (tmp_path / "nonnum.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError):
        read_trajectory(tmp_path / "nonnum.csv")


def test_trajectory_n_legs_property(truth_table):
    assert truth_table.n_legs == 6
