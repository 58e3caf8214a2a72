"""Synthetic walking: physical consistency, gait structure, noise injection."""

import numpy as np
import pytest

from coclo.errors import ConfigurationError
from coclo.kinematics import body_jacobian, foot_force, forward_kinematics
from coclo.simulator import (
    BODY_MASS_KG,
    GRAVITY_W,
    GaitParams,
    NoiseSpec,
    TerrainProfile,
    inject_impact_noise,
    recommended_duration,
    simulate,
)
from coclo.spatial import quat_to_rotmat, rotate


# --- configuration validation ---------------------------------------------------


def test_terrain_rejects_unknown_kind():
    with pytest.raises(ConfigurationError):
        TerrainProfile(kind="lava")


def test_terrain_rejects_nonpositive_extent():
    with pytest.raises(ConfigurationError):
        TerrainProfile(kind="flat", extent=0.0)


def test_gait_rejects_bad_phase_offsets():
    with pytest.raises(ConfigurationError):
        GaitParams(phase_offsets=(0.0, 0.0, 0.1, 0.2, 0.3, 0.4)).resolved_phases(6)


def test_gait_default_phases_partition_the_cycle():
    phases = GaitParams().resolved_phases(6)
    assert sorted(phases) == pytest.approx([i / 6 for i in range(6)])


def test_unreachable_gait_raises():
    gait = GaitParams(reach=2.0)  # far beyond the leg length
    terrain = TerrainProfile(kind="flat", extent=1.0)
    with pytest.raises(ConfigurationError):
        simulate(
            __import__("coclo").reference_hexapod(), gait, terrain, NoiseSpec.zero(), duration=1.0, seed=0
        )


# --- standstill physics -----------------------------------------------------------


def test_standstill_accel_reads_minus_gravity(model, gait):
    terrain = TerrainProfile(kind="flat")
    trace = simulate(model, gait, terrain, NoiseSpec.zero(), duration=1.0, seed=0)
    # all frames inside the settle window: no motion at all
    for frame in trace.frames:
        assert np.allclose(frame.accel, [0.0, 0.0, 9.81], atol=1e-12)
        assert np.array_equal(frame.gyro, np.zeros(3))
        assert np.array_equal(frame.joint_velocities, np.zeros_like(frame.joint_velocities))


def test_standstill_torques_recover_even_weight_split(model, gait):
    terrain = TerrainProfile(kind="flat")
    trace = simulate(model, gait, terrain, NoiseSpec.zero(), duration=0.5, seed=0)
    frame = trace.frames[0]
    share = BODY_MASS_KG * 9.81 / model.n_legs
    for i, chain in enumerate(model.legs):
        force = foot_force(chain, frame.joint_angles[i], frame.joint_torques[i])
        assert np.allclose(force, [0.0, 0.0, share], atol=1e-9)


def test_stance_forces_balance_weight(model, gait, square_noiseless):
    truth = square_noiseless.truth
    frames = square_noiseless.frames
    weight = BODY_MASS_KG * 9.81
    # sample a few frames across the walk
    for k in range(0, len(frames), 700):
        frame = frames[k]
        R_wc = quat_to_rotmat(np.asarray(truth.q[k]))
        total = np.zeros(3)
        for i, chain in enumerate(model.legs):
            if not truth.contact[k, i]:
                continue
            force_c = foot_force(chain, frame.joint_angles[i], frame.joint_torques[i])
            total += R_wc @ force_c
        assert total[2] == pytest.approx(weight, abs=1e-6)
        assert np.allclose(total[:2], 0.0, atol=1e-6)


# --- trajectory geometry -------------------------------------------------------------


def test_square_path_closes(model, gait, square_noiseless):
    truth = square_noiseless.truth
    assert np.linalg.norm(truth.r[-1] - truth.r[0]) < 1e-9
    assert np.linalg.norm(truth.v[0]) == 0.0
    assert np.linalg.norm(truth.v[-1]) < 1e-12


def test_truth_quaternions_stay_normalized(square_noiseless):
    q = square_noiseless.truth.q
    assert np.abs(np.linalg.norm(q, axis=1) - 1.0).max() < 1e-12


def test_stance_feet_do_not_move_in_truth(model, square_noiseless):
    truth = square_noiseless.truth
    contact = truth.contact
    for leg in range(model.n_legs):
        pos = truth.foot_pos[:, leg]
        c = contact[:, leg]
        # positions while in contact change only at swing boundaries
        stationary = np.linalg.norm(np.diff(pos, axis=0), axis=1)
        both_stance = c[1:] & c[:-1]
        assert stationary[both_stance].max() < 1e-12


def test_exactly_one_swing_leg_during_walk(model, gait, square_noiseless):
    truth = square_noiseless.truth
    t = truth.t
    walking = (t > gait.settle_time + 0.5) & (t < t[-1] - gait.settle_time - 0.5)
    n_stance = truth.contact[walking].sum(axis=1)
    assert set(np.unique(n_stance)) == {model.n_legs - 1}


def test_ik_matches_fk_on_every_sampled_frame(model, gait, short_flat):
    truth = short_flat.truth
    frames = short_flat.frames
    R0 = quat_to_rotmat(np.asarray(truth.q[0]))
    for k in range(0, len(frames), 37):
        frame = frames[k]
        for i, chain in enumerate(model.legs):
            fk = forward_kinematics(chain, frame.joint_angles[i])
            world = truth.r[k] + quat_to_rotmat(np.asarray(truth.q[k])) @ fk.translation
            assert np.allclose(world, truth.foot_pos[k, i], atol=1e-8)


def test_ramp_body_climbs_the_slope(model, gait):
    terrain = TerrainProfile(kind="ramp", extent=2.0)
    trace = simulate(model, gait, terrain, NoiseSpec.zero(),
                     duration=recommended_duration(gait, terrain), seed=0)
    truth = trace.truth
    assert truth.r[-1][2] > 0.4  # climbed
    assert truth.r[-1][2] == pytest.approx(terrain.slope * truth.r[-1][0], abs=1e-9)


def test_stairs_feet_land_on_tread_heights(model, gait):
    terrain = TerrainProfile(kind="stairs", extent=2.0)
    trace = simulate(model, gait, terrain, NoiseSpec.zero(),
                     duration=recommended_duration(gait, terrain), seed=0)
    truth = trace.truth
    h, w = terrain.step_height, terrain.step_width
    slope = h / w
    feet = truth.foot_pos.reshape(-1, 3)
    grounded = truth.contact.reshape(-1)  # swing arcs are above the surface
    on_stairs = grounded & (feet[:, 0] >= 0.0)
    x, z = feet[on_stairs, 0], feet[on_stairs, 2]
    expected = -gait.clearance + slope * w * (np.floor(x / w) + 0.5)
    assert np.abs(z - expected).max() < 1e-9


# --- noise model -----------------------------------------------------------------------


def test_simulate_fixed_seed_is_bit_identical(model, gait):
    terrain = TerrainProfile(kind="flat")
    a = simulate(model, gait, terrain, NoiseSpec.default(), duration=3.0, seed=5)
    b = simulate(model, gait, terrain, NoiseSpec.default(), duration=3.0, seed=5)
    for fa, fb in zip(a.frames, b.frames):
        assert fa.timestamp == fb.timestamp
        assert np.array_equal(fa.joint_angles, fb.joint_angles)
        assert np.array_equal(fa.joint_velocities, fb.joint_velocities)
        assert np.array_equal(fa.joint_torques, fb.joint_torques)
        assert np.array_equal(fa.gyro, fb.gyro)
        assert np.array_equal(fa.accel, fb.accel)


def test_different_seeds_differ(model, gait):
    terrain = TerrainProfile(kind="flat")
    a = simulate(model, gait, terrain, NoiseSpec.default(), duration=1.0, seed=5)
    b = simulate(model, gait, terrain, NoiseSpec.default(), duration=1.0, seed=6)
    assert not np.array_equal(a.frames[10].accel, b.frames[10].accel)


def test_zero_noise_produces_clean_sensors(model, gait, short_flat):
    # gyro is exactly zero during settle; accel exactly gravity
    frame = short_flat.frames[10]
    assert np.array_equal(frame.gyro, np.zeros(3))
    assert np.allclose(frame.accel, [0.0, 0.0, 9.81], atol=1e-12)


def test_inject_impact_noise_peak_at_event(model, gait, short_flat):
    noise = NoiseSpec.default()
    events = [(1.5, 2)]
    frames = inject_impact_noise(short_flat.frames, events, noise, seed=9)
    t = np.array([f.timestamp for f in frames])
    delta = np.array([
        np.linalg.norm(f.accel - g.accel) for f, g in zip(frames, short_flat.frames)
    ])
    k0 = np.searchsorted(t, 1.5)
    # burst amplitude at the event equals the configured amplitude
    assert delta[k0] == pytest.approx(noise.impact_amplitude, abs=1e-12)
    # decays away: well past the window nothing is left
    assert delta[k0 + 200:].max() == 0.0
    assert delta[:k0].max() == 0.0


def test_inject_impact_noise_no_events_is_identity(model, short_flat):
    frames = inject_impact_noise(short_flat.frames, [], NoiseSpec.default(), seed=9)
    for fa, fb in zip(frames, short_flat.frames):
        assert np.array_equal(fa.accel, fb.accel)


def test_inject_impact_zero_amplitude_is_identity(model, short_flat):
    noise = NoiseSpec.default()
    noise.impact_amplitude = 0.0
    frames = inject_impact_noise(short_flat.frames, [(1.0, 0)], noise, seed=9)
    for fa, fb in zip(frames, short_flat.frames):
        assert np.array_equal(fa.accel, fb.accel)


def test_simulated_touchdowns_line_up_with_contact_transitions(model, gait, square_noiseless):
    truth = square_noiseless.truth
    t = truth.t
    for when, leg in square_noiseless.touchdowns[:10]:
        k = np.searchsorted(t, when)
        # swinging just before touchdown, stance just after
        assert not truth.contact[max(k - 2, 0), leg]
        assert truth.contact[min(k + 2, len(t) - 1), leg]


def test_recommended_duration_covers_the_course(gait):
    # extent is the total path length (a 6 m square walks 4 sides of 1.5 m)
    terrain = TerrainProfile(kind="flat", extent=6.0)
    d = recommended_duration(gait, terrain)
    assert d >= 2 * gait.settle_time + 6.0 / gait.body_speed
