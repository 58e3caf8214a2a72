"""Acceptance suite: nine quantitative end-to-end checks.

Each test is one criterion and emits exactly one pass/fail line under
``pytest -v``.  Tolerances are pinned here and nowhere else; simulated
scenarios are seed-pinned through the session fixtures in conftest.
"""

import time

import numpy as np
import pytest

from coclo.baseline import dead_reckon
from coclo.errors import InsufficientSupportError
from coclo.estimator import (
    FilterConfig,
    MeasurementLayout,
    body_twist_ls,
    contact_probability,
)
from coclo.kinematics import body_jacobian, foot_force, forward_kinematics
from coclo.logio import TrajectoryTable, read_sensor_log, write_sensor_log
from coclo.metrics import drift_report
from coclo.replay import ExternalPoseFix, replay_frames
from coclo.simulator import NoiseSpec, TerrainProfile, simulate
from coclo.srukf import SqrtBelief, predict, update

from conftest import stance_windows


# --- shared replays (each walking replay costs ~20 s) --------------------------


@pytest.fixture(scope="session")
def square_noiseless_replay(square_noiseless, model):
    result = replay_frames(square_noiseless.frames, model, FilterConfig(), keep_diagnostics=True)
    return result, TrajectoryTable.from_truth(square_noiseless.truth)


@pytest.fixture(scope="session")
def square_noisy_replay(square_noisy, model):
    result = replay_frames(square_noisy.frames, model, FilterConfig())
    return result, TrajectoryTable.from_truth(square_noisy.truth)


@pytest.fixture(scope="session")
def ramp_replay(ramp_noisy, model):
    result = replay_frames(ramp_noisy.frames, model, FilterConfig())
    return result, TrajectoryTable.from_truth(ramp_noisy.truth)


@pytest.fixture(scope="session")
def stairs_replay(stairs_noisy, model):
    result = replay_frames(stairs_noisy.frames, model, FilterConfig())
    return result, TrajectoryTable.from_truth(stairs_noisy.truth)


def _report(criterion: str, detail: str) -> None:
    print(f"[{criterion}] PASS — {detail}")


# --- 1. linear-Gaussian equivalence ----------------------------------------------


def test_criterion_1_linear_gaussian_equivalence():
    """SR-UKF equals a conventional KF on a 4-state linear system."""
    dt = 0.1
    F = np.array(
        [
            [1.0, 0.0, dt, 0.0],
            [0.0, 1.0, 0.0, dt],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    H = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    q = np.diag([0.02, 0.02, 0.05, 0.05])
    r = np.diag([0.1, 0.12])
    Q, R = q @ q.T, r @ r.T

    rng = np.random.default_rng(1234)
    x_true = np.zeros(4)
    observations = []
    for _ in range(1000):
        x_true = F @ x_true + q @ rng.normal(size=4)
        observations.append(H @ x_true + r @ rng.normal(size=2))

    # conventional KF reference
    x, P = np.zeros(4), np.eye(4)
    kf_trace = []
    for z in observations:
        x = F @ x
        P = F @ P @ F.T + Q
        S = H @ P @ H.T + R
        K = P @ H.T @ np.linalg.inv(S)
        x = x + K @ (z - H @ x)
        P = (np.eye(4) - K @ H) @ P
        kf_trace.append((x.copy(), P.copy()))

    belief = SqrtBelief(np.zeros(4), np.eye(4))
    worst_mean = worst_cov = 0.0
    started = time.perf_counter()
    for z, (mx, mP) in zip(observations, kf_trace):
        belief = predict(belief, lambda X: X @ F.T, q, alpha=1.0, beta=0.0, kappa=0.0)
        belief, _ = update(belief, lambda X: X @ H.T, r, z, alpha=1.0, beta=0.0, kappa=0.0)
        worst_mean = max(worst_mean, np.abs(belief.mean - mx).max())
        worst_cov = max(worst_cov, np.abs(belief.cov() - mP).max())
    elapsed = time.perf_counter() - started

    assert worst_mean < 1e-8, f"mean deviates from KF by {worst_mean:.3e}"
    assert worst_cov < 1e-8, f"covariance deviates from KF by {worst_cov:.3e}"
    assert elapsed < 1.0, f"1000 SR-UKF steps took {elapsed:.2f} s"
    _report(
        "criterion 1: linear-Gaussian equivalence",
        f"mean err {worst_mean:.2e}, cov err {worst_cov:.2e}, {elapsed:.2f} s / 1000 steps",
    )


# --- 2. Jacobian correctness -------------------------------------------------------


def test_criterion_2_jacobian_matches_finite_differences(model):
    """body_jacobian vs central differences over 100 random configurations."""
    rng = np.random.default_rng(77)
    h = 1e-6
    worst = 0.0
    for k in range(100):
        chain = model.legs[k % model.n_legs]
        angles = rng.uniform(-1.2, 1.2, size=model.dof)
        frame = forward_kinematics(chain, angles)
        J = body_jacobian(chain, angles)
        for j in range(model.dof):
            dq = np.zeros(model.dof)
            dq[j] = h
            p_plus = forward_kinematics(chain, angles + dq).translation
            p_minus = forward_kinematics(chain, angles - dq).translation
            col_fd = frame.rotation.T @ ((p_plus - p_minus) / (2 * h))
            rel = np.abs(J[:, j] - col_fd) / np.maximum(np.abs(col_fd), 1.0)
            worst = max(worst, rel.max())
    assert worst < 1e-5, f"worst Jacobian relative error {worst:.3e}"
    _report("criterion 2: Jacobian correctness", f"worst relative error {worst:.2e}")


# --- 3. twist recovery ----------------------------------------------------------------


def test_criterion_3_twist_recovery():
    """Exact body twist from noiseless rigid motion; degenerate support refuses."""
    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(100):
        v = rng.normal(size=3)
        omega = rng.normal(size=3)
        n_feet = int(rng.integers(3, 7))
        stance = []
        for _ in range(n_feet):
            p = rng.normal(size=3)
            stance.append((p, -(v + np.cross(omega, p))))
        v_hat, w_hat, _ = body_twist_ls(stance)
        worst = max(worst, np.abs(v_hat - v).max(), np.abs(w_hat - omega).max())
    assert worst < 1e-10, f"twist recovery error {worst:.3e}"

    for n_feet in (0, 1):
        degenerate = [(np.array([0.3, 0.0, -0.2]), np.zeros(3))] * n_feet
        with pytest.raises(InsufficientSupportError):
            body_twist_ls(degenerate)
    _report("criterion 3: twist recovery", f"max-abs error {worst:.2e}; <2 feet refused")


# --- 4. gating exactness -----------------------------------------------------------------


def test_criterion_4_gravity_gating_is_bit_exact(model, square_noiseless, square_noiseless_replay):
    """Frames without full contact carry exactly zero gravity innovation."""
    result, _ = square_noiseless_replay
    config = FilterConfig()
    lay = MeasurementLayout(model.n_legs)
    checked = 0
    for frame, innovation, gate in zip(
        square_noiseless.frames[1:], result.innovations, result.gates
    ):
        probs = []
        for i, chain in enumerate(model.legs):
            try:
                force = foot_force(chain, frame.joint_angles[i], frame.joint_torques[i])
                probs.append(contact_probability(force, config.contact_calibration))
            except Exception:
                probs.append(0.0)
        if min(probs) < config.all_contact_threshold:
            checked += 1
            assert not gate[lay.gravity].any(), f"gravity gate open at t={frame.timestamp}"
            block = innovation[lay.gravity]
            assert block[0] == 0.0 and block[1] == 0.0 and block[2] == 0.0, (
                f"nonzero gated gravity innovation {block} at t={frame.timestamp}"
            )
    assert checked > 1000, "walk should contain many sub-threshold frames"
    _report(
        "criterion 4: gating exactness",
        f"{checked} sub-threshold frames, all gravity innovations bit-exact zero",
    )


# --- 5. noiseless end-to-end ------------------------------------------------------------


def test_criterion_5_noiseless_square(square_noiseless_replay):
    """6 m square, zero noise: drift, quaternion norm, stance stationarity."""
    result, truth = square_noiseless_replay
    est = result.trajectory
    report = drift_report(est, truth)
    assert report.drift_percent < 0.5, f"drift {report.drift_percent:.3f}% >= 0.5%"

    quat_dev = np.abs(np.linalg.norm(est.q, axis=1) - 1.0).max()
    assert quat_dev < 1e-9, f"quaternion norm deviates by {quat_dev:.2e}"

    worst_move = 0.0
    contact = truth.contact > 0.5
    for leg in range(truth.n_legs):
        for s, e in stance_windows(contact[:, leg]):
            track = est.foot_pos[s : e + 1, leg]
            worst_move = max(worst_move, np.linalg.norm(track - track[0], axis=1).max())
    assert worst_move < 1e-3, f"stance foot moved {worst_move * 1e3:.3f} mm"
    _report(
        "criterion 5: noiseless end-to-end",
        f"drift {report.drift_percent:.3f}% of {report.path_length:.2f} m, "
        f"quat dev {quat_dev:.1e}, stance move {worst_move * 1e3:.3f} mm",
    )


# --- 6. noisy end-to-end -----------------------------------------------------------------


def test_criterion_6_noisy_square_beats_dead_reckoning(square_noisy, square_noisy_replay):
    """Default noise incl. impact bursts: < 5% drift and >= 5x the baseline."""
    result, truth = square_noisy_replay
    odo = drift_report(result.trajectory, truth)
    base = drift_report(dead_reckon(square_noisy.frames), truth)
    assert odo.drift_percent < 5.0, f"drift {odo.drift_percent:.2f}% >= 5%"
    ratio = base.drift_percent / odo.drift_percent
    assert ratio >= 5.0, f"only {ratio:.1f}x better than dead reckoning"
    _report(
        "criterion 6: noisy end-to-end",
        f"drift {odo.drift_percent:.3f}% vs dead-reckoning {base.drift_percent:.0f}% "
        f"({ratio:.0f}x)",
    )


# --- 7. terrain runs ---------------------------------------------------------------------


def test_criterion_7_ramp_and_stairs(ramp_replay, stairs_replay):
    """Ramp and stair climbs complete and stay under 10% drift."""
    ramp_result, ramp_truth = ramp_replay
    stairs_result, stairs_truth = stairs_replay
    ramp_rep = drift_report(ramp_result.trajectory, ramp_truth)
    stairs_rep = drift_report(stairs_result.trajectory, stairs_truth)
    for name, rep in (("ramp", ramp_rep), ("stairs", stairs_rep)):
        assert np.isfinite(rep.final_error_norm), f"{name} replay produced non-finite output"
        assert rep.drift_percent < 10.0, f"{name} drift {rep.drift_percent:.2f}% >= 10%"
    _report(
        "criterion 7: terrain runs",
        f"ramp {ramp_rep.drift_percent:.2f}%, stairs {stairs_rep.drift_percent:.2f}%",
    )


# --- 8. external-pose benefit ----------------------------------------------------------


def test_criterion_8_external_pose_strictly_helps(model, stairs_noisy, stairs_replay):
    """2 Hz truth-derived pose fixes (sigma 2 cm) strictly reduce final drift."""
    without_result, truth_table = stairs_replay
    without = drift_report(without_result.trajectory, truth_table)

    rng = np.random.default_rng(99)
    truth = stairs_noisy.truth
    fixes = []
    for t_fix in np.arange(0.5, truth.t[-1], 0.5):
        k = int(np.searchsorted(truth.t, t_fix))
        fixes.append(
            ExternalPoseFix(
                time=float(truth.t[k]),
                position=truth.r[k] + rng.normal(0.0, 0.02, 3),
                quaternion=truth.q[k],
            )
        )
    noise_sqrt = np.array([0.02, 0.02, 0.02, 0.01, 0.01, 0.01, 0.01])
    with_result = replay_frames(
        stairs_noisy.frames, model, FilterConfig(), external=fixes, external_noise_sqrt=noise_sqrt
    )
    with_rep = drift_report(with_result.trajectory, truth_table)
    assert with_rep.final_error_norm < without.final_error_norm, (
        f"fixes did not help: {with_rep.final_error_norm:.4f} m "
        f">= {without.final_error_norm:.4f} m"
    )
    _report(
        "criterion 8: external-pose benefit",
        f"final error {without.final_error_norm * 1e3:.1f} mm -> "
        f"{with_rep.final_error_norm * 1e3:.1f} mm with 2 Hz fixes",
    )


# --- 9. determinism and round-trip --------------------------------------------------------


def test_criterion_9_determinism_and_round_trip(tmp_path, model, gait):
    """Same seed, same bits; file round trip replays to an identical report."""
    terrain = TerrainProfile(kind="flat", extent=1.5)
    a = simulate(model, gait, terrain, NoiseSpec.default(), duration=14.0, seed=42)
    b = simulate(model, gait, terrain, NoiseSpec.default(), duration=14.0, seed=42)
    for fa, fb in zip(a.frames, b.frames):
        assert fa.timestamp == fb.timestamp
        assert np.array_equal(fa.joint_angles, fb.joint_angles)
        assert np.array_equal(fa.joint_velocities, fb.joint_velocities)
        assert np.array_equal(fa.joint_torques, fb.joint_torques)
        assert np.array_equal(fa.gyro, fb.gyro)
        assert np.array_equal(fa.accel, fb.accel)

    truth = TrajectoryTable.from_truth(a.truth)
    in_memory = drift_report(replay_frames(a.frames, model, FilterConfig()).trajectory, truth)

    log_path = tmp_path / "sensors.jsonl"
    write_sensor_log(log_path, a.frames)
    from_file = drift_report(
        replay_frames(read_sensor_log(log_path), model, FilterConfig()).trajectory, truth
    )
    assert from_file == in_memory, "file round-trip changed the drift report"
    _report(
        "criterion 9: determinism & round-trip",
        f"{len(a.frames)} frames bit-identical; reports equal "
        f"(drift {in_memory.drift_percent:.3f}%)",
    )
