"""Core value types, pinhole projection, and the time/height normalizations.

Positions live in the robot base frame (meters). A CameraModel carries the
rigid base-to-camera transform plus pinhole intrinsics; projecting an episode
yields a PixelPath whose vertices pair subpixel image coordinates with the
normalized time and height channel values used by the sketch rasterizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    BehindCamera,
    EmptyResult,
    EmptySequence,
    InvalidIndex,
    InvalidRange,
    NonMonotonicSteps,
)

# Camera-frame depth at or below this counts as behind the camera (meters).
MIN_DEPTH = 1e-6

# Dataset-wide workspace height bounds, meters above the robot base.
DEFAULT_H_MIN = 0.0
DEFAULT_H_MAX = 1.0


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class Vec3:
    """Point in the robot base frame, meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise InvalidRange("Vec3 components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, arr) -> "Vec3":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class CameraModel:
    """Pinhole intrinsics plus a rigid base-to-camera transform.

    rotation is a unit quaternion (w, x, y, z) taking base-frame points into
    the camera frame; translation is the camera-frame offset applied after
    rotation. Both are fixed for the lifetime of an episode: the camera and
    the robot base are assumed static.
    """

    fx: float
    fy: float
    cx: float
    cy: float
    rotation: tuple[float, float, float, float]
    translation: Vec3
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidRange("focal lengths must be positive")
        if self.width < 1 or self.height < 1:
            raise InvalidRange("image size must be at least 1x1")
        rot = tuple(float(c) for c in self.rotation)
        object.__setattr__(self, "rotation", rot)
        norm = math.sqrt(sum(c * c for c in rot))
        # Unit quaternion required; callers normalize before constructing.
        if abs(norm - 1.0) > 1e-9:
            raise InvalidRange(f"rotation quaternion norm {norm!r} is not 1")

    def rotation_matrix(self) -> np.ndarray:
        w, x, y, z = self.rotation
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ],
            dtype=np.float64,
        )

    def to_camera_frame(self, p: Vec3) -> np.ndarray:
        return self.rotation_matrix() @ p.as_array() + self.translation.as_array()


@dataclass(frozen=True)
class EEState:
    """One episode sample: step index, EE center position, and gripper signals.

    Gripper values outside [0,1] are sensor spikes and clamp on construction.
    """

    step: int
    position: Vec3
    gripper_sensed: float
    gripper_target: float

    def __post_init__(self):
        object.__setattr__(self, "gripper_sensed", _clamp01(float(self.gripper_sensed)))
        object.__setattr__(self, "gripper_target", _clamp01(float(self.gripper_target)))


@dataclass(frozen=True)
class EpisodeTrajectory:
    """A recorded episode: ordered EE states plus identifying metadata."""

    episode_id: str
    skill: str
    instruction: str
    steps: tuple[EEState, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise EmptySequence("episode has no steps")
        for prev, cur in zip(steps, steps[1:]):
            if cur.step <= prev.step:
                raise NonMonotonicSteps(
                    f"step {cur.step} does not increase after {prev.step}"
                )

    def __len__(self) -> int:
        return len(self.steps)

    def positions(self) -> np.ndarray:
        """All EE positions as a (T, 3) float64 array."""
        return np.array(
            [[s.position.x, s.position.y, s.position.z] for s in self.steps],
            dtype=np.float64,
        )


class PathVertex(NamedTuple):
    """One projected trajectory point with its sketch channel values.

    u, v are subpixel image coordinates (may fall outside the image; the
    rasterizer clips). step is the 0-based position of the source sample
    within its episode.
    """

    u: float
    v: float
    time_norm: float
    height_norm: float
    step: int


@dataclass(frozen=True)
class PixelPath:
    """Projected trajectory: one vertex per surviving step, in time order."""

    vertices: tuple[PathVertex, ...]
    dropped_count: int = 0

    def __post_init__(self):
        verts = tuple(self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            raise EmptyResult("pixel path has no vertices")
        for vert in verts:
            if not (0.0 <= vert.time_norm <= 1.0 and 0.0 <= vert.height_norm <= 1.0):
                raise InvalidRange("vertex norms must lie in [0, 1]")
        for prev, cur in zip(verts, verts[1:]):
            if cur.time_norm <= prev.time_norm:
                raise InvalidRange("time_norm must be strictly increasing")

    def __len__(self) -> int:
        return len(self.vertices)


def project_point(camera: CameraModel, p: Vec3, index: int = 0) -> tuple[float, float]:
    """Project a base-frame point to subpixel image coordinates.

    The result may fall outside the image bounds; rasterization clips.
    index is only used to label the BehindCamera error.

    Raises
    ------
    BehindCamera
        If the camera-frame depth is at or below MIN_DEPTH.
    """
    cam_x, cam_y, cam_z = camera.to_camera_frame(p)
    if cam_z <= MIN_DEPTH:
        raise BehindCamera(index)
    u = camera.fx * cam_x / cam_z + camera.cx
    v = camera.fy * cam_y / cam_z + camera.cy
    return u, v


def normalize_time(t: int, total: int) -> float:
    """Map step index t of an episode of `total` samples to (t+1)/total."""
    if total < 1:
        raise InvalidRange("episode length must be at least 1")
    if t < 0 or t >= total:
        raise InvalidIndex(f"step {t} outside [0, {total})")
    return (t + 1) / total


def normalize_height(h: float, h_min: float = DEFAULT_H_MIN, h_max: float = DEFAULT_H_MAX) -> float:
    """Map a base-frame height to [0,1]; out-of-range heights clamp."""
    if h_max <= h_min:
        raise InvalidRange("h_max must exceed h_min")
    return _clamp01((h - h_min) / (h_max - h_min))


def project_trajectory(
    camera: CameraModel,
    ep: EpisodeTrajectory,
    h_min: float = DEFAULT_H_MIN,
    h_max: float = DEFAULT_H_MAX,
) -> PixelPath:
    """Project every episode step, dropping (and counting) behind-camera ones.

    Each surviving vertex carries the subpixel projection, the (t+1)/T time
    value, the clamped height value from the step's base-frame z, and the
    step's 0-based position in the episode.

    Raises
    ------
    EmptyResult
        If every step is behind the camera.
    """
    total = len(ep.steps)
    vertices = []
    dropped = 0
    for i, state in enumerate(ep.steps):
        try:
            u, v = project_point(camera, state.position, index=i)
        except BehindCamera:
            dropped += 1
            continue
        vertices.append(
            PathVertex(
                u=u,
                v=v,
                time_norm=normalize_time(i, total),
                height_norm=normalize_height(state.position.z, h_min, h_max),
                step=i,
            )
        )
    if not vertices:
        raise EmptyResult("every step is behind the camera")
    return PixelPath(vertices=tuple(vertices), dropped_count=dropped)
