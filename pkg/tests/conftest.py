"""Shared fixtures.

Full walking runs are expensive (tens of seconds each), so every simulated
trace used by more than one test is session-scoped and cached.
"""

from __future__ import annotations

import numpy as np
import pytest

from coclo.estimator import FilterConfig
from coclo.kinematics import reference_hexapod
from coclo.logio import TrajectoryTable
from coclo.replay import replay_frames
from coclo.simulator import (
    GaitParams,
    NoiseSpec,
    TerrainProfile,
    recommended_duration,
    simulate,
)


@pytest.fixture(scope="session")
def model():
    return reference_hexapod()


@pytest.fixture(scope="session")
def gait():
    return GaitParams()


def _run(model, gait, kind, noise, seed):
    terrain = TerrainProfile(kind=kind)
    duration = recommended_duration(gait, terrain)
    return simulate(model, gait, terrain, noise, duration=duration, seed=seed)


@pytest.fixture(scope="session")
def square_noiseless(model, gait):
    """6 m square flat walk with all noise terms zeroed."""
    return _run(model, gait, "flat", NoiseSpec.zero(), seed=0)


@pytest.fixture(scope="session")
def square_noisy(model, gait):
    """6 m square flat walk under the default noise model (seed-pinned)."""
    return _run(model, gait, "flat", NoiseSpec.default(), seed=7)


@pytest.fixture(scope="session")
def ramp_noisy(model, gait):
    return _run(model, gait, "ramp", NoiseSpec.default(), seed=11)


@pytest.fixture(scope="session")
def stairs_noisy(model, gait):
    return _run(model, gait, "stairs", NoiseSpec.default(), seed=13)


@pytest.fixture(scope="session")
def short_flat(model, gait):
    """Short flat segment (settle plus first strides) for cheap tests."""
    terrain = TerrainProfile(kind="flat")
    return simulate(model, gait, terrain, NoiseSpec.zero(), duration=4.0, seed=3)


def estimate_trajectory(trace, model, config=None, **replay_kw):
    """Replay a trace and return (estimate, truth) trajectory tables."""
    config = config or FilterConfig()
    result = replay_frames(trace.frames, model, config, **replay_kw)
    return result.trajectory, TrajectoryTable.from_truth(trace.truth)


@pytest.fixture(scope="session")
def square_noiseless_estimate(square_noiseless, model):
    return estimate_trajectory(square_noiseless, model)


@pytest.fixture(scope="session")
def square_noisy_estimate(square_noisy, model):
    return estimate_trajectory(square_noisy, model)


def stance_windows(contact_flags: np.ndarray):
    """Index ranges [start, end] of contiguous True runs in a boolean track."""
    c = np.asarray(contact_flags, dtype=bool)
    edges = np.flatnonzero(np.diff(c.astype(int)))
    starts = np.r_[0 if c[0] else [], edges[~c[edges]] + 1].astype(int)
    ends = np.r_[edges[c[edges]], len(c) - 1 if c[-1] else []].astype(int)
    return list(zip(starts, ends))
