"""Kinematic hexapod walking simulator.

Produces bit-reproducible sensor logs plus ground truth for a wave-gait
walk over flat ground, a constant ramp, or a staircase.  The body follows
a smooth commanded path (velocity-blended corners, so acceleration stays
bounded); stance feet are pinned to the terrain surface; swing feet follow
smooth arcs with zero touchdown velocity.  Joint angles come from per-leg
inverse kinematics of the true foot offsets, joint velocities from
differentiating those angles, and joint torques from a static load-sharing
model over the stance legs.  Sensor noise and touchdown impact bursts are
layered on top per NoiseSpec.

World frame: z up, origin at the initial body position, yaw aligned with
the initial walking direction.  On ramps and stairs the run starts on the
incline and the body (and its attitude) follows the mean slope line.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .estimator import SensorFrame
from .kinematics import LegChain, RobotModel, body_jacobian, forward_kinematics
from .spatial import quat_from_axis_angle, quat_to_rotmat

GRAVITY_W = np.array([0.0, 0.0, -9.81])
BODY_MASS_KG = 21.0

# Half-width of the central difference used for joint velocities, seconds.
_DIFF_H = 5e-4
# Impact bursts are truncated once the envelope has decayed to ~exp(-8).
_IMPACT_WINDOW_DECAYS = 8.0


@dataclass
class GaitParams:
    """Wave-gait shape parameters.

    ``step_length`` is derived as ``body_speed * cycle_time`` when left
    None (each leg must regain one cycle of body travel during its swing).
    ``phase_offsets`` are per-leg cycle fractions; they must be the
    multiples 0/n .. (n-1)/n in some order so exactly one leg swings at a
    time.
    """

    cycle_time: float = 2.0
    body_speed: float = 0.15
    step_height: float = 0.06
    step_length: float | None = None
    phase_offsets: tuple[float, ...] | None = None
    settle_time: float = 2.0
    blend_time: float = 1.0
    clearance: float = 0.22
    reach: float = 0.50

    def __post_init__(self):
        # blend_time must be positive: velocity transitions are smoothed
        # over it, and an instantaneous jump has no defined acceleration
        positive = ("cycle_time", "body_speed", "step_height", "clearance", "reach", "blend_time")
        for name in positive:
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"gait {name} must be positive")
        if self.settle_time < 0.0:
            raise ConfigurationError("gait settle_time must be non-negative")

    def resolved_step_length(self) -> float:
        if self.step_length is None:
            return self.body_speed * self.cycle_time
        return self.step_length

    def resolved_phases(self, n_legs: int) -> np.ndarray:
        if self.phase_offsets is None:
            phases = np.arange(n_legs) / n_legs
        else:
            phases = np.asarray(self.phase_offsets, dtype=float)
        if phases.shape != (n_legs,):
            raise ConfigurationError(f"need {n_legs} phase offsets, got {phases.shape}")
        expect = np.arange(n_legs) / n_legs
        if np.any(np.abs(np.sort(phases) - expect) > 1e-9):
            raise ConfigurationError(
                "wave gait phase offsets must be the multiples k/n in some order"
            )
        return phases


@dataclass
class TerrainProfile:
    """Terrain kind plus the total commanded path length.

    ``extent`` is the path length in meters: the perimeter of the square
    walked on flat ground, or the distance walked straight up a ramp or
    staircase.  ``step_width``/``step_height`` describe one stair step;
    ``ramp_angle`` is in radians.
    """

    kind: str = "flat"
    extent: float = 6.0
    ramp_angle: float = math.radians(16.35)
    step_width: float = 0.6
    step_height: float = 0.15

    def __post_init__(self):
        if self.kind not in ("flat", "ramp", "stairs"):
            raise ConfigurationError(f"unknown terrain kind {self.kind!r}")
        if self.extent <= 0.0:
            raise ConfigurationError("terrain extent must be positive")
        if self.kind == "stairs" and (self.step_width <= 0.0 or self.step_height <= 0.0):
            raise ConfigurationError("stair step dimensions must be positive")

    @property
    def slope(self) -> float:
        """Mean rise over run of the body's slope line."""
        if self.kind == "flat":
            return 0.0
        if self.kind == "ramp":
            return math.tan(self.ramp_angle)
        return self.step_height / self.step_width


@dataclass
class NoiseSpec:
    """Sensor corruption levels.

    White-noise densities are per sqrt(Hz); the per-sample standard
    deviation at rate f is density * sqrt(f).  Bias random walks are in
    units per sqrt(second).  The impact model adds an exponentially
    decaying cosine burst to the accelerometer at every touchdown.
    """

    gyro_density: float = 1e-3  # rad/s/sqrt(Hz)
    accel_density: float = 1.5e-2  # m/s^2/sqrt(Hz)
    gyro_bias_walk: float = 1e-4  # rad/s/sqrt(s)
    accel_bias_walk: float = 1e-3  # m/s^2/sqrt(s)
    encoder_std: float = 5e-4  # rad
    joint_vel_std: float = 5e-3  # rad/s
    torque_std: float = 5e-2  # N m
    impact_amplitude: float = 3.0  # m/s^2
    impact_freq: float = 15.0  # Hz
    impact_decay: float = 0.1  # s

    @classmethod
    def zero(cls) -> "NoiseSpec":
        return cls(
            gyro_density=0.0,
            accel_density=0.0,
            gyro_bias_walk=0.0,
            accel_bias_walk=0.0,
            encoder_std=0.0,
            joint_vel_std=0.0,
            torque_std=0.0,
            impact_amplitude=0.0,
        )

    @classmethod
    def default(cls) -> "NoiseSpec":
        return cls()


@dataclass
class TruthTrace:
    """Ground truth sampled on the sensor clock."""

    t: np.ndarray  # (k,)
    r: np.ndarray  # (k, 3)
    q: np.ndarray  # (k, 4)
    v: np.ndarray  # (k, 3)
    omega: np.ndarray  # (k, 3)
    foot_pos: np.ndarray  # (k, n_legs, 3)
    contact: np.ndarray  # (k, n_legs) bool


@dataclass
class SimTrace:
    """One simulation: sensor frames plus aligned ground truth."""

    truth: TruthTrace
    frames: list[SensorFrame]
    touchdowns: list[tuple[float, int]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Commanded body path: piecewise cruise/blend segments with closed forms.


def _smoothstep(w: np.ndarray | float):
    return ((6.0 * w - 15.0) * w + 10.0) * w**3


def _smoothstep_d(w: np.ndarray | float):
    return ((30.0 * w - 60.0) * w + 30.0) * w**2


def _smoothstep_int(w: np.ndarray | float):
    # integral of the quintic smoothstep from 0 to w
    return ((w - 3.0) * w + 2.5) * w**4


@dataclass(frozen=True)
class _Segment:
    t0: float
    t1: float
    p0: np.ndarray  # (2,) xy position at t0
    u0: np.ndarray  # (2,) xy velocity at t0
    u1: np.ndarray  # (2,) xy velocity at t1 (blended via smoothstep)

    def pos(self, t: float) -> np.ndarray:
        tau = t - self.t0
        T = self.t1 - self.t0
        w = tau / T
        return self.p0 + self.u0 * tau + (self.u1 - self.u0) * T * _smoothstep_int(w)

    def vel(self, t: float) -> np.ndarray:
        w = (t - self.t0) / (self.t1 - self.t0)
        return self.u0 + (self.u1 - self.u0) * _smoothstep(w)

    def acc(self, t: float) -> np.ndarray:
        T = self.t1 - self.t0
        w = (t - self.t0) / T
        return (self.u1 - self.u0) * _smoothstep_d(w) / T


class _PathPlan:
    """Horizontal body path built from blended piecewise-constant velocity."""

    def __init__(self, directions: list[np.ndarray], side_length: float, speed: float,
                 blend: float, t_start: float):
        if side_length / speed < blend:
            raise ConfigurationError(
                f"path legs of {side_length} m at {speed} m/s are shorter than the "
                f"{blend} s velocity blend"
            )
        self.segments: list[_Segment] = []
        p = np.zeros(2)
        t = t_start
        us = [np.zeros(2)] + [speed * d for d in directions] + [np.zeros(2)]
        cruise = side_length / speed - blend
        for k in range(len(us) - 1):
            seg = _Segment(t0=t, t1=t + blend, p0=p, u0=us[k], u1=us[k + 1])
            self.segments.append(seg)
            p = seg.pos(seg.t1)
            t = seg.t1
            if 1 <= k + 1 <= len(directions):
                seg = _Segment(t0=t, t1=t + cruise, p0=p, u0=us[k + 1], u1=us[k + 1])
                self.segments.append(seg)
                p = seg.pos(seg.t1)
                t = seg.t1
        self.t_start = t_start
        self.t_end = t
        self.p_end = p
        self._starts = [s.t0 for s in self.segments]

    def eval(self, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if t <= self.t_start:
            return np.zeros(2), np.zeros(2), np.zeros(2)
        if t >= self.t_end:
            return self.p_end.copy(), np.zeros(2), np.zeros(2)
        seg = self.segments[bisect_right(self._starts, t) - 1]
        return seg.pos(t), seg.vel(t), seg.acc(t)


def _path_directions(terrain: TerrainProfile) -> tuple[list[np.ndarray], float]:
    """Unit horizontal directions and per-leg length of the commanded path."""
    if terrain.kind == "flat":
        dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]),
                np.array([-1.0, 0.0]), np.array([0.0, -1.0])]
        return dirs, terrain.extent / 4.0
    return [np.array([1.0, 0.0])], terrain.extent


# ---------------------------------------------------------------------------
# Reference-structure leg IK (yaw about z, then two pitches about y).


@dataclass(frozen=True)
class _LegIK:
    chain: LegChain
    l1: float
    l2: float
    l3: float

    @classmethod
    def build(cls, chain: LegChain) -> "_LegIK":
        axes = chain.joint_axes
        want = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
        if chain.dof != 3 or np.any(np.abs(axes - want) > 1e-9):
            raise ConfigurationError(
                f"leg {chain.name!r}: simulator needs yaw-pitch-pitch legs (axes z, y, y)"
            )
        offs = chain.link_offsets
        tail = np.asarray(chain.foot_offset, dtype=float)
        for vec in (offs[0], offs[1], offs[2], tail):
            if abs(vec[1]) > 1e-12 or abs(vec[2]) > 1e-12 or vec[0] < 0.0:
                raise ConfigurationError(
                    f"leg {chain.name!r}: simulator needs links along the local +x axis"
                )
        return cls(chain=chain, l1=float(offs[0][0]), l2=float(offs[1][0]),
                   l3=float(offs[2][0] + tail[0]))

    def solve(self, target_c: np.ndarray) -> np.ndarray:
        """Joint angles reaching a CoM-frame foot target; raises if out of reach."""
        m = self.chain.mount_rotation.T @ (target_c - self.chain.mount_translation)
        theta1 = math.atan2(m[1], m[0])
        d = math.hypot(m[0], m[1]) - self.l1
        z = m[2]
        d2 = d * d + z * z
        cos3 = (d2 - self.l2 * self.l2 - self.l3 * self.l3) / (2.0 * self.l2 * self.l3)
        if not -1.0 - 1e-9 <= cos3 <= 1.0 + 1e-9:
            raise ConfigurationError(
                f"leg {self.chain.name!r}: foothold at distance {math.sqrt(d2):.3f} m "
                f"is outside the reachable annulus "
                f"[{abs(self.l2 - self.l3):.3f}, {self.l2 + self.l3:.3f}]"
            )
        theta3 = math.acos(min(1.0, max(-1.0, cos3)))
        psi = math.atan2(self.l3 * math.sin(theta3), self.l2 + self.l3 * math.cos(theta3))
        theta2 = math.atan2(-z, d) - psi
        return np.array([theta1, theta2, theta3])

    def solve_checked(self, target_c: np.ndarray) -> np.ndarray:
        angles = self.solve(target_c)
        reached = forward_kinematics(self.chain, angles).translation
        if np.linalg.norm(reached - target_c) > 1e-9:
            raise ConfigurationError(
                f"leg {self.chain.name!r}: inverse kinematics failed to reproduce the target"
            )
        return angles


def _mount_yaw(chain: LegChain) -> float:
    t = chain.mount_translation
    if math.hypot(t[0], t[1]) > 1e-9:
        return math.atan2(t[1], t[0])
    x_axis = chain.mount_rotation @ np.array([1.0, 0.0, 0.0])
    return math.atan2(x_axis[1], x_axis[0])


# ---------------------------------------------------------------------------
# Foot scheduling


@dataclass(frozen=True)
class _SwingWindow:
    t_lift: float
    t_down: float
    p_from: np.ndarray  # (3,) world
    p_to: np.ndarray  # (3,) world


class _FootTimeline:
    """World-frame foot trajectory of one leg: held footholds plus arcs."""

    def __init__(self, initial: np.ndarray, windows: list[_SwingWindow], step_height: float):
        self.initial = initial
        self.windows = windows
        self.step_height = step_height
        self._lifts = [w.t_lift for w in windows]

    def pos(self, t: float) -> np.ndarray:
        k = bisect_right(self._lifts, t) - 1
        if k < 0:
            return self.initial.copy()
        w = self.windows[k]
        if t >= w.t_down:
            return w.p_to.copy()
        u = (t - w.t_lift) / (w.t_down - w.t_lift)
        s = _smoothstep(u)
        p = w.p_from + (w.p_to - w.p_from) * s
        p[2] += self.step_height * math.sin(math.pi * u) ** 2
        return p

    def in_swing(self, t: float) -> bool:
        k = bisect_right(self._lifts, t) - 1
        return k >= 0 and t < self.windows[k].t_down


# ---------------------------------------------------------------------------


class _World:
    """Everything needed to evaluate the true robot state at any time."""

    def __init__(self, model: RobotModel, gait: GaitParams, terrain: TerrainProfile,
                 duration: float):
        self.model = model
        self.gait = gait
        self.terrain = terrain
        self.slope = terrain.slope
        dirs, side = _path_directions(terrain)
        self.path = _PathPlan(dirs, side, gait.body_speed, gait.blend_time,
                              t_start=gait.settle_time)
        pitch = math.atan(self.slope)
        # body x axis tips uphill: rotate about -y by the slope pitch
        self.q0 = quat_from_axis_angle(np.array([0.0, 1.0, 0.0]), -pitch)
        self.R0 = quat_to_rotmat(self.q0)
        self.ik = [_LegIK.build(chain) for chain in model.legs]
        self.nominal = np.array(
            [
                [gait.reach * math.cos(_mount_yaw(c)), gait.reach * math.sin(_mount_yaw(c)),
                 -gait.clearance]
                for c in model.legs
            ]
        )
        self.duration = duration
        self.timelines = self._schedule()

    # body pose -------------------------------------------------------------

    def body(self, t: float):
        """Return (r, v, a) of the body in the world frame."""
        p, v, a = self.path.eval(t)
        s = self.slope
        return (
            np.array([p[0], p[1], s * p[0]]),
            np.array([v[0], v[1], s * v[0]]),
            np.array([a[0], a[1], s * a[0]]),
        )

    def surface_z(self, x: float) -> float:
        """Terrain height under horizontal position x (independent of y)."""
        c = self.gait.clearance
        if self.terrain.kind == "flat":
            return -c
        if self.terrain.kind == "ramp":
            return -c + self.slope * x
        if x < 0.0:
            return -c  # flat approach before the first tread
        # Tread k spans [k*w, (k+1)*w) at the height where the equivalent
        # ramp passes through the tread centre, so the staircase straddles
        # the body's climb line.
        w = self.terrain.step_width
        return -c + self.slope * w * (math.floor(x / w) + 0.5)

    def _snap_foothold(self, target: np.ndarray) -> np.ndarray:
        out = target.copy()
        if self.terrain.kind == "stairs" and target[0] >= 0.0:
            # Pull the foothold toward the centre of its tread, moving at
            # most a quarter tread so leg reach is preserved.  The result
            # always sits at least w/4 from the nearest riser.
            w = self.terrain.step_width
            centre = w * (math.floor(target[0] / w) + 0.5)
            shift = centre - target[0]
            cap = 0.25 * w
            out[0] = centre if abs(shift) <= cap else target[0] + math.copysign(cap, shift)
        out[2] = self.surface_z(out[0])
        return out

    def _nominal_world(self, leg: int, t: float) -> np.ndarray:
        r, _, _ = self.body(t)
        return self._snap_foothold(r + self.R0 @ self.nominal[leg])

    def _schedule(self) -> list[_FootTimeline]:
        g = self.gait
        n = self.model.n_legs
        phases = g.resolved_phases(n)
        # The wave gait tiles the walking window with back-to-back swing
        # slots, one leg per slot in phase order.  Slot k spans
        # [ws + k*slot, ws + (k+1)*slot): both ends are the same float
        # expression, so adjacent windows partition time exactly and the
        # one-swing-leg invariant holds bit-for-bit.
        order = sorted(range(n), key=lambda i: phases[i])
        slot = g.cycle_time / n
        walk_start, walk_end = self.path.t_start, self.path.t_end
        hold_lead = 0.5 * (g.cycle_time - slot)
        initial = [self._nominal_world(leg, 0.0) for leg in range(n)]
        hold = list(initial)
        windows: list[list[_SwingWindow]] = [[] for _ in range(n)]
        k = 0
        while True:
            t_lift = walk_start + k * slot
            if t_lift >= walk_end or t_lift > self.duration:
                break
            leg = order[k % n]
            t_down = walk_start + (k + 1) * slot
            # Plant at the nominal point for the middle of the coming hold
            # so the foot trails symmetrically (+/- half a step) instead of
            # lagging a full step by the next lift-off.
            target = self._nominal_world(leg, t_down + hold_lead)
            windows[leg].append(
                _SwingWindow(t_lift=t_lift, t_down=t_down, p_from=hold[leg], p_to=target)
            )
            hold[leg] = target
            k += 1
        return [
            _FootTimeline(initial[leg], windows[leg], g.step_height) for leg in range(n)
        ]

    # per-time evaluation ----------------------------------------------------

    def joint_angles(self, t: float, checked: bool = False) -> np.ndarray:
        r, _, _ = self.body(t)
        out = np.empty((self.model.n_legs, self.model.dof))
        for i, ik in enumerate(self.ik):
            target_c = self.R0.T @ (self.timelines[i].pos(t) - r)
            out[i] = ik.solve_checked(target_c) if checked else ik.solve(target_c)
        return out

    def stance_mask(self, t: float) -> np.ndarray:
        return np.array([not tl.in_swing(t) for tl in self.timelines])

    def stance_forces(self, t: float) -> np.ndarray:
        """Per-leg vertical ground-reaction force, world frame; zero in swing.

        Minimum-norm static distribution balancing total weight and the
        horizontal moments about the CoM; tiny negative solutions are
        clamped and the sum renormalized, which keeps the force balance
        exact at the cost of an immaterial moment residue.
        """
        mask = self.stance_mask(t)
        r, _, _ = self.body(t)
        weight = BODY_MASS_KG * 9.81
        f = np.zeros(self.model.n_legs)
        idx = np.flatnonzero(mask)
        d = np.array([self.timelines[i].pos(t) - r for i in idx])
        A = np.vstack([np.ones(idx.size), d[:, 1], d[:, 0]])
        b = np.array([weight, 0.0, 0.0])
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        if np.any(sol < 0.0):
            sol = np.clip(sol, 0.0, None)
            sol *= weight / sol.sum()
        f[idx] = sol
        return f


def _generate_noise(noise: NoiseSpec, n_frames: int, n_legs: int, dof: int,
                    rate_hz: float, seed: int):
    """Pre-draw every noise array in a fixed order for reproducibility."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(0,))
    keys = ["encoder", "joint_vel", "torque", "gyro_w", "accel_w", "gyro_b", "accel_b"]
    rngs = {k: np.random.default_rng(child) for k, child in zip(keys, ss.spawn(len(keys)))}
    dt = 1.0 / rate_hz
    sq = math.sqrt(rate_hz)
    return {
        "encoder": rngs["encoder"].normal(0.0, 1.0, (n_frames, n_legs, dof)) * noise.encoder_std,
        "joint_vel": rngs["joint_vel"].normal(0.0, 1.0, (n_frames, n_legs, dof)) * noise.joint_vel_std,
        "torque": rngs["torque"].normal(0.0, 1.0, (n_frames, n_legs, dof)) * noise.torque_std,
        "gyro_w": rngs["gyro_w"].normal(0.0, 1.0, (n_frames, 3)) * (noise.gyro_density * sq),
        "accel_w": rngs["accel_w"].normal(0.0, 1.0, (n_frames, 3)) * (noise.accel_density * sq),
        "gyro_b": np.cumsum(
            rngs["gyro_b"].normal(0.0, 1.0, (n_frames, 3)) * (noise.gyro_bias_walk * math.sqrt(dt)),
            axis=0,
        ),
        "accel_b": np.cumsum(
            rngs["accel_b"].normal(0.0, 1.0, (n_frames, 3)) * (noise.accel_bias_walk * math.sqrt(dt)),
            axis=0,
        ),
    }


def inject_impact_noise(
    frames: list[SensorFrame],
    touchdown_events: list[tuple[float, int]],
    noise: NoiseSpec,
    seed: int,
) -> list[SensorFrame]:
    """Add a decaying accelerometer oscillation after each touchdown.

    Each event adds ``amplitude * exp(-dt/decay) * cos(2 pi f dt)`` along a
    unit direction drawn per event (horizontal/vertical biased), starting
    exactly at the event time; the added vector norm at the event instant
    equals the configured amplitude.  Returns new frames; inputs are not
    modified.  With no events the frames are returned unchanged (copies).
    """
    out = [
        SensorFrame(
            timestamp=f.timestamp,
            joint_angles=f.joint_angles.copy(),
            joint_velocities=f.joint_velocities.copy(),
            joint_torques=f.joint_torques.copy(),
            gyro=f.gyro.copy(),
            accel=f.accel.copy(),
        )
        for f in frames
    ]
    if not touchdown_events or noise.impact_amplitude == 0.0:
        return out
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    times = np.array([f.timestamp for f in out])
    window = _IMPACT_WINDOW_DECAYS * noise.impact_decay
    for t_event, _leg in sorted(touchdown_events):
        raw = rng.normal(0.0, 1.0, 3)
        raw[1] *= 0.3  # impacts land mostly in the sagittal plane
        norm = np.linalg.norm(raw)
        direction = raw / norm if norm > 1e-12 else np.array([1.0, 0.0, 0.0])
        lo = int(np.searchsorted(times, t_event))
        hi = int(np.searchsorted(times, t_event + window))
        for k in range(lo, hi):
            dt = times[k] - t_event
            burst = (
                noise.impact_amplitude
                * math.exp(-dt / noise.impact_decay)
                * math.cos(2.0 * math.pi * noise.impact_freq * dt)
            )
            out[k].accel += burst * direction
    return out


def recommended_duration(gait: GaitParams, terrain: TerrainProfile) -> float:
    """Settle, walk the full path, settle again: the natural trace length."""
    walk = terrain.extent / gait.body_speed + gait.blend_time
    return 2.0 * gait.settle_time + walk


def simulate(
    model: RobotModel,
    gait: GaitParams,
    terrain: TerrainProfile,
    noise: NoiseSpec,
    duration: float,
    seed: int,
    rate_hz: float = 100.0,
) -> SimTrace:
    """Run one walk and return sensor frames plus aligned ground truth.

    Identical arguments (including seed) give bit-identical traces.
    """
    if duration <= 0.0:
        raise ConfigurationError("duration must be positive")
    world = _World(model, gait, terrain, duration)
    n_frames = int(round(duration * rate_hz)) + 1
    dt = 1.0 / rate_hz
    n, dof = model.n_legs, model.dof
    draws = _generate_noise(noise, n_frames, n, dof, rate_hz, seed)

    t_arr = np.arange(n_frames) * dt
    truth = TruthTrace(
        t=t_arr,
        r=np.empty((n_frames, 3)),
        q=np.tile(world.q0, (n_frames, 1)),
        v=np.empty((n_frames, 3)),
        omega=np.zeros((n_frames, 3)),
        foot_pos=np.empty((n_frames, n, 3)),
        contact=np.empty((n_frames, n), dtype=bool),
    )
    frames: list[SensorFrame] = []
    R0 = world.R0
    for k in range(n_frames):
        t = float(t_arr[k])
        r, v, a = world.body(t)
        truth.r[k] = r
        truth.v[k] = v
        for i in range(n):
            truth.foot_pos[k, i] = world.timelines[i].pos(t)
        truth.contact[k] = world.stance_mask(t)

        angles = world.joint_angles(t, checked=True)
        ang_lo = world.joint_angles(t - _DIFF_H)
        ang_hi = world.joint_angles(t + _DIFF_H)
        velocities = (ang_hi - ang_lo) / (2.0 * _DIFF_H)

        forces = world.stance_forces(t)
        torques = np.zeros((n, dof))
        for i in np.flatnonzero(truth.contact[k]):
            chain = model.legs[i]
            fk = forward_kinematics(chain, angles[i])
            J_com = fk.rotation @ body_jacobian(chain, angles[i])
            F_c = R0.T @ np.array([0.0, 0.0, forces[i]])
            torques[i] = J_com.T @ F_c

        accel_true = R0.T @ (a - GRAVITY_W)
        frames.append(
            SensorFrame(
                timestamp=t,
                joint_angles=angles + draws["encoder"][k],
                joint_velocities=velocities + draws["joint_vel"][k],
                joint_torques=torques + draws["torque"][k],
                gyro=draws["gyro_b"][k] + draws["gyro_w"][k],
                accel=accel_true + draws["accel_b"][k] + draws["accel_w"][k],
            )
        )

    touchdowns = [
        (w.t_down, leg)
        for leg, tl in enumerate(world.timelines)
        for w in tl.windows
        if w.t_down <= duration
    ]
    frames = inject_impact_noise(frames, touchdowns, noise, seed)
    return SimTrace(truth=truth, frames=frames, touchdowns=touchdowns)
