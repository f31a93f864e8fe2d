"""Kinematic execution of waypoint plans with an optional IK joint model.

The follower moves the EE along straight segments at a bounded speed,
sampling every dt. TaskSpace mode interpolates positions directly and
reaches waypoints exactly; JointSpace mode routes every sample through a
damped-least-squares IK solve on a serial chain (planar revolute links
plus a prismatic height column) and records the achieved FK positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidRange, LimitViolation, Unreachable
from .geometry import EEState, EpisodeTrajectory, Vec3
from .ingest import Waypoint, WaypointPlan
from .interaction import CLOSED_SIGNAL, OPEN_SIGNAL, EventKind
from .similarity import as_waypoints, frechet_dp

_TWO_PI = 2.0 * math.pi


class SimMode(str, Enum):
    TASK_SPACE = "task"
    JOINT_SPACE = "joint"


@dataclass(frozen=True)
class SimConfig:
    max_speed: float = 0.5
    dt: float = 0.05
    mode: SimMode = SimMode.TASK_SPACE

    def __post_init__(self):
        if self.max_speed <= 0 or self.dt <= 0:
            raise InvalidRange("max_speed and dt must be positive")


@dataclass(frozen=True)
class IKParams:
    damping: float = 0.1
    max_iters: int = 200
    tol: float = 1e-6

    def __post_init__(self):
        if self.damping <= 0 or self.tol <= 0:
            raise InvalidRange("damping and tol must be positive")
        if self.max_iters < 1:
            raise InvalidRange("max_iters must be at least 1")


@dataclass(frozen=True)
class KinematicChain:
    """Planar revolute links plus a final prismatic z column.

    Joint vector layout: one angle per link (radians, measured cumulatively
    in the base xy-plane) followed by the column extension (meters). The
    default is a 3-link arm with 0.9 m reach over a 1 m column.
    """

    link_lengths: tuple[float, ...] = (0.4, 0.3, 0.2)
    joint_limits: tuple[tuple[float, float], ...] = (
        (-_TWO_PI, _TWO_PI),
        (-_TWO_PI, _TWO_PI),
        (-_TWO_PI, _TWO_PI),
        (0.0, 1.0),
    )
    base: Vec3 = Vec3(0.0, 0.0, 0.0)

    def __post_init__(self):
        lengths = tuple(float(l) for l in self.link_lengths)
        limits = tuple((float(lo), float(hi)) for lo, hi in self.joint_limits)
        object.__setattr__(self, "link_lengths", lengths)
        object.__setattr__(self, "joint_limits", limits)
        if not lengths:
            raise InvalidRange("chain needs at least 1 link")
        if any(l <= 0 for l in lengths):
            raise InvalidRange("link lengths must be positive")
        if len(limits) != len(lengths) + 1:
            raise InvalidRange("need one limit pair per link plus the z column")
        if any(lo >= hi for lo, hi in limits):
            raise InvalidRange("joint limits must satisfy low < high")

    @property
    def dof(self) -> int:
        return len(self.link_lengths) + 1

    def fk(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        lengths = np.asarray(self.link_lengths)
        angles = np.cumsum(q[: len(lengths)])
        return np.array(
            [
                self.base.x + float(np.dot(lengths, np.cos(angles))),
                self.base.y + float(np.dot(lengths, np.sin(angles))),
                self.base.z + float(q[-1]),
            ]
        )

    def jacobian(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        n = len(self.link_lengths)
        lengths = np.asarray(self.link_lengths)
        angles = np.cumsum(q[:n])
        sin_terms = lengths * np.sin(angles)
        cos_terms = lengths * np.cos(angles)
        jac = np.zeros((3, n + 1))
        for k in range(n):
            jac[0, k] = -float(np.sum(sin_terms[k:]))
            jac[1, k] = float(np.sum(cos_terms[k:]))
        jac[2, n] = 1.0
        return jac

    def clamp(self, q) -> np.ndarray:
        out = np.array(q, dtype=np.float64)
        for i, (lo, hi) in enumerate(self.joint_limits):
            out[i] = min(hi, max(lo, out[i]))
        return out

    def within_limits(self, q) -> bool:
        return all(lo <= qi <= hi for qi, (lo, hi) in zip(q, self.joint_limits))

    def neutral_q(self) -> np.ndarray:
        # Alternating elbow bend keeps the Jacobian full-rank at the first
        # step; a straight arm cannot correct radial error.
        q = np.zeros(self.dof)
        for i in range(len(self.link_lengths)):
            q[i] = 0.5 if i % 2 == 0 else -0.5
        lo, hi = self.joint_limits[-1]
        q[-1] = (lo + hi) / 2.0
        return self.clamp(q)

    def check_reachable(self, target: np.ndarray) -> None:
        """Quick annulus/column rejection; limit-constrained cases are left
        to the solver's stall detection."""
        dx = float(target[0]) - self.base.x
        dy = float(target[1]) - self.base.y
        dz = float(target[2]) - self.base.z
        radius = math.hypot(dx, dy)
        outer = sum(self.link_lengths)
        inner = max(0.0, 2.0 * max(self.link_lengths) - outer)
        if radius > outer + 1e-9 or radius < inner - 1e-9:
            raise Unreachable(
                f"planar radius {radius:.6g} outside reach [{inner:.6g}, {outer:.6g}]"
            )
        lo, hi = self.joint_limits[-1]
        if dz < lo - 1e-9 or dz > hi + 1e-9:
            raise Unreachable(f"height offset {dz:.6g} outside column range [{lo}, {hi}]")


# Per-iteration step-norm cap. The raw normal-equation step on a large
# error is essentially Gauss-Newton; unchecked it flings the iterate into
# the joint-limit corner, where clamping turns the loop into a fixed point.
_MAX_STEP = 0.5

# Residual below which the update drops the damping. Near a workspace-
# boundary target the damped step loses the singular direction and the
# residual decays like damping^2 / iteration, far too slow for tol.
_POLISH_RESIDUAL = 1e-3


def solve_ik_dls(
    chain: KinematicChain,
    target: Vec3,
    q_init=None,
    params: IKParams = IKParams(),
) -> np.ndarray:
    """Damped-least-squares IK: iterate dq = (J'J + damping^2 I)^-1 J'e.

    Steps are capped at _MAX_STEP per iteration and iterates are clamped to
    the joint limits. Once the residual falls under _POLISH_RESIDUAL the
    update switches to an undamped least-squares step, which keeps full-
    extension targets convergent; the damping itself is never adapted, so
    the solve stays deterministic.

    Returns the first q whose FK residual is within params.tol; raises
    Unreachable when the residual cannot get there (max_iters spent, or the
    clamp wedges the iterate), and LimitViolation when q_init itself breaks
    the limits.
    """
    t = target.as_array()
    chain.check_reachable(t)
    q = chain.neutral_q() if q_init is None else np.array(q_init, dtype=np.float64)
    if q.shape != (chain.dof,):
        raise InvalidRange(f"q_init must have {chain.dof} joints")
    if not chain.within_limits(q):
        raise LimitViolation("q_init violates joint limits")

    lam2 = params.damping**2
    eye = np.eye(chain.dof)
    err = math.inf
    for _ in range(params.max_iters):
        e = t - chain.fk(q)
        err = float(np.linalg.norm(e))
        if err <= params.tol:
            return q
        jac = chain.jacobian(q)
        if err <= _POLISH_RESIDUAL:
            dq = np.linalg.lstsq(jac, e, rcond=None)[0]
        else:
            dq = np.linalg.solve(jac.T @ jac + lam2 * eye, jac.T @ e)
        step = float(np.linalg.norm(dq))
        if step > _MAX_STEP:
            dq *= _MAX_STEP / step
        q_next = chain.clamp(q + dq)
        if np.array_equal(q_next, q):
            break  # wedged against the limits; no further progress possible
        q = q_next
    raise Unreachable(f"IK stalled at residual {err:.3g} after {params.max_iters} iterations")


def _as_plan(plan) -> WaypointPlan:
    if isinstance(plan, WaypointPlan):
        return plan
    points = as_waypoints(plan)
    return WaypointPlan(
        waypoints=tuple(Waypoint(position=Vec3.from_array(p)) for p in points)
    )


def execute(
    plan,
    cfg: SimConfig = SimConfig(),
    chain: KinematicChain | None = None,
    ik: IKParams = IKParams(),
    episode_id: str = "rollout",
    skill: str = "rollout",
    instruction: str = "",
) -> EpisodeTrajectory:
    """Follow a plan at bounded speed and return the executed episode.

    Each segment is split into ceil(L / (max_speed*dt)) hops, so consecutive
    samples never exceed one speed-limited step; waypoint samples land
    exactly on their waypoints. A gripper command takes effect on the sample
    after its waypoint, which makes detect_key_steps place the event at the
    waypoint's own sample; a command at the final waypoint appends one
    dwell sample to realize the transition. Commands that do not change the
    grasp state produce no event.

    JointSpace mode solves IK per sample (warm-started from the previous
    solution) and records achieved FK positions instead of commanded ones.
    """
    plan = _as_plan(plan)
    positions = plan.positions()
    step_len = cfg.max_speed * cfg.dt

    cmd = [positions[0]]
    wp_sample = [0]
    for j in range(len(positions) - 1):
        a, b = positions[j], positions[j + 1]
        seg = float(np.linalg.norm(b - a))
        hops = max(1, math.ceil(seg / step_len))
        for k in range(1, hops):
            cmd.append(a + (b - a) * (k / hops))
        cmd.append(b.copy())
        wp_sample.append(len(cmd) - 1)

    flips = {
        wp_sample[j] + 1: w.gripper
        for j, w in enumerate(plan.waypoints)
        if w.gripper is not None
    }
    if flips and max(flips) == len(cmd):
        cmd.append(cmd[-1].copy())

    if cfg.mode is SimMode.JOINT_SPACE:
        chain = chain if chain is not None else KinematicChain()
        q = chain.neutral_q()
        achieved = []
        for point in cmd:
            q = solve_ik_dls(chain, Vec3.from_array(point), q_init=q, params=ik)
            achieved.append(chain.fk(q))
        cmd = achieved

    steps = []
    grasping = False
    for i, point in enumerate(cmd):
        if i in flips:
            grasping = flips[i] is EventKind.CLOSE
        sensed, target = CLOSED_SIGNAL if grasping else OPEN_SIGNAL
        steps.append(
            EEState(
                step=i,
                position=Vec3.from_array(point),
                gripper_sensed=sensed,
                gripper_target=target,
            )
        )
    return EpisodeTrajectory(
        episode_id=episode_id, skill=skill, instruction=instruction, steps=tuple(steps)
    )


def _densify_polyline(points: np.ndarray, max_step: float) -> np.ndarray:
    out = [points[0]]
    for j in range(len(points) - 1):
        a, b = points[j], points[j + 1]
        seg = float(np.linalg.norm(b - a))
        hops = max(1, math.ceil(seg / max_step))
        for k in range(1, hops):
            out.append(a + (b - a) * (k / hops))
        out.append(b)
    return np.array(out)


def roundtrip_error(commanded, executed: EpisodeTrajectory) -> float:
    """Fréchet distance between the commanded path and the executed one.

    The commanded polyline is densified to the executed sampling resolution
    first; comparing raw sparse waypoints against a dense execution would
    report half the longest segment even for a perfect follow.
    """
    if isinstance(commanded, WaypointPlan):
        cmd = commanded.positions()
    else:
        cmd = as_waypoints(commanded)
    exe = executed.positions()
    if exe.shape[0] >= 2 and cmd.shape[0] >= 2:
        gaps = np.linalg.norm(np.diff(exe, axis=0), axis=1)
        max_gap = float(gaps.max())
        if max_gap > 0:
            cmd = _densify_polyline(cmd, max_gap)
    return frechet_dp(cmd, exe)
