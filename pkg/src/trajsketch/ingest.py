"""Parsers turning external inputs into episodes and sketch specs.

Four sources are covered:

- episode logs: line-delimited JSON, one header line then one step per line;
- human-drawn strokes: pixel samples plus marker clicks and sparse height
  annotations (the studio wire payload);
- hand-landmark demos: per-frame 21-point hand landmarks with manually
  annotated grasp/release keyframes;
- waypoint plans: short 3D position lists with optional gripper commands,
  the contract for planner/LLM producers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadLandmarkIndex,
    InvalidIndex,
    InvalidRange,
    MissingDepth,
    SchemaError,
    TooFewSamples,
)
from .geometry import (
    DEFAULT_H_MAX,
    DEFAULT_H_MIN,
    CameraModel,
    EEState,
    EpisodeTrajectory,
    PathVertex,
    PixelPath,
    Vec3,
    normalize_height,
    normalize_time,
    project_point,
)
from .interaction import (
    CLOSED_SIGNAL,
    OPEN_SIGNAL,
    EventKind,
    InteractionEvent,
)
from .sketch import SketchMode, SketchSpec

DEFAULT_RESAMPLE_M = 64
DEFAULT_SAMPLES_PER_SEGMENT = 8

HAND_LANDMARK_COUNT = 21
# Thumb tip, thumb IP joint, index tip, index DIP joint.
DEFAULT_EE_LANDMARKS = (4, 3, 8, 7)

_HEADER_FIELDS = ("episode_id", "skill", "instruction", "camera_ref")
_STEP_FIELDS = ("step", "px", "py", "pz", "gripper_sensed", "gripper_target")


# --------------------------------------------------------------------------
# episode logs


def _parse_json_line(line: str, lineno: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaError(lineno, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(record, dict):
        raise SchemaError(lineno, "record must be a JSON object")
    return record


def _require_number(record: dict, key: str, lineno: int) -> float:
    value = record.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(lineno, f"field {key!r} missing or not a number")
    if not math.isfinite(value):
        raise SchemaError(lineno, f"field {key!r} is not finite")
    return float(value)


def parse_episode_log(source) -> EpisodeTrajectory:
    """Parse an episode log (path, text, or lines) into an EpisodeTrajectory.

    Line 1 is the header object; every following non-empty line is one step.
    Raises SchemaError with the offending 1-based line number, or
    NonMonotonicSteps when step indices do not strictly increase.
    """
    lines = _read_lines(source)
    if not lines:
        raise SchemaError(1, "empty log: missing header line")

    header = _parse_json_line(lines[0][1], lines[0][0])
    for key in ("episode_id", "skill", "instruction"):
        if not isinstance(header.get(key), str):
            raise SchemaError(lines[0][0], f"header field {key!r} missing or not a string")
    if "camera_ref" not in header:
        raise SchemaError(lines[0][0], "header field 'camera_ref' missing")

    steps = []
    for lineno, line in lines[1:]:
        record = _parse_json_line(line, lineno)
        step_value = record.get("step")
        if isinstance(step_value, bool) or not isinstance(step_value, int):
            raise SchemaError(lineno, "field 'step' missing or not an integer")
        steps.append(
            EEState(
                step=step_value,
                position=Vec3(
                    _require_number(record, "px", lineno),
                    _require_number(record, "py", lineno),
                    _require_number(record, "pz", lineno),
                ),
                gripper_sensed=_require_number(record, "gripper_sensed", lineno),
                gripper_target=_require_number(record, "gripper_target", lineno),
            )
        )
    if not steps:
        raise SchemaError(lines[0][0], "log has a header but no steps")
    return EpisodeTrajectory(
        episode_id=header["episode_id"],
        skill=header["skill"],
        instruction=header["instruction"],
        steps=tuple(steps),
    )


def read_episode_header(source) -> dict:
    """Parse just the header object of an episode log."""
    lines = _read_lines(source)
    if not lines:
        raise SchemaError(1, "empty log: missing header line")
    return _parse_json_line(lines[0][1], lines[0][0])


def serialize_episode_log(ep: EpisodeTrajectory, camera_ref: str | None = None) -> str:
    """Render an episode in the log format; parse_episode_log inverts this."""
    header = {
        "episode_id": ep.episode_id,
        "skill": ep.skill,
        "instruction": ep.instruction,
        "camera_ref": camera_ref,
    }
    out = [json.dumps(header, sort_keys=True)]
    for s in ep.steps:
        out.append(
            json.dumps(
                {
                    "step": s.step,
                    "px": s.position.x,
                    "py": s.position.y,
                    "pz": s.position.z,
                    "gripper_sensed": s.gripper_sensed,
                    "gripper_target": s.gripper_target,
                },
                sort_keys=True,
            )
        )
    return "\n".join(out) + "\n"


def _read_lines(source) -> list[tuple[int, str]]:
    """Numbered non-empty lines from a path, raw text, or line iterable."""
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
        raw = text.splitlines()
    elif isinstance(source, str):
        path = Path(source)
        if "\n" not in source and path.is_file():
            raw = path.read_text(encoding="utf-8").splitlines()
        else:
            raw = source.splitlines()
    elif hasattr(source, "read"):
        raw = source.read().splitlines()
    else:
        raw = [str(line).rstrip("\n") for line in source]
    return [(i + 1, line) for i, line in enumerate(raw) if line.strip()]


# --------------------------------------------------------------------------
# human-drawn strokes


@dataclass(frozen=True)
class StrokeInput:
    """A drawn curve: pixel samples plus optional markers and heights.

    marker_clicks entries are ((u, v), EventKind); height_annotations are
    ((u, v), height_meters). Clicks and annotations snap to the nearest
    resampled stroke vertex during conversion.
    """

    samples: tuple[tuple[float, float], ...]
    marker_clicks: tuple[tuple[tuple[float, float], EventKind], ...] = ()
    height_annotations: tuple[tuple[tuple[float, float], float], ...] = ()

    def __post_init__(self):
        samples = tuple((float(u), float(v)) for u, v in self.samples)
        object.__setattr__(self, "samples", samples)
        if len(samples) < 2:
            raise TooFewSamples(f"stroke needs >= 2 samples, got {len(samples)}")
        clicks = tuple(
            ((float(p[0]), float(p[1])), EventKind(k)) for p, k in self.marker_clicks
        )
        object.__setattr__(self, "marker_clicks", clicks)
        annos = tuple(
            ((float(p[0]), float(p[1])), float(h)) for p, h in self.height_annotations
        )
        object.__setattr__(self, "height_annotations", annos)


def _resample_polyline_2d(samples: np.ndarray, m: int) -> np.ndarray:
    seg = np.linalg.norm(np.diff(samples, axis=0), axis=1)
    s = np.concatenate(([0.0], np.cumsum(seg)))
    if s[-1] == 0.0:
        return np.repeat(samples[:1], m, axis=0)
    targets = np.linspace(0.0, s[-1], m)
    out = np.empty((m, 2), dtype=np.float64)
    for c in range(2):
        out[:, c] = np.interp(targets, s, samples[:, c])
    return out


def nearest_vertex(vertices_xy: np.ndarray, pixel: tuple[float, float]) -> int:
    """Index of the vertex closest to pixel (ties go to the lower index)."""
    d = vertices_xy - np.asarray(pixel, dtype=np.float64)
    return int(np.argmin(np.einsum("ij,ij->i", d, d)))


def stroke_to_spec(
    stroke: StrokeInput,
    resample_m: int = DEFAULT_RESAMPLE_M,
    h_min: float = DEFAULT_H_MIN,
    h_max: float = DEFAULT_H_MAX,
) -> SketchSpec:
    """Convert a drawn stroke into a sketch spec.

    The stroke is resampled to resample_m points uniform in arc length;
    vertex i gets time (i+1)/m. Height annotations snap to their nearest
    resampled vertex; heights between annotated vertices interpolate
    linearly in arc length and hold constant beyond the first/last one.
    A stroke without height annotations yields a flat (TwoD) spec.
    """
    if resample_m < 2:
        raise InvalidRange("resample_m must be at least 2")
    samples = np.asarray(stroke.samples, dtype=np.float64)
    pts = _resample_polyline_2d(samples, resample_m)

    if stroke.height_annotations:
        anchor: dict[int, float] = {}
        for pixel, height in stroke.height_annotations:
            anchor[nearest_vertex(pts, pixel)] = height
        idx = np.array(sorted(anchor), dtype=np.float64)
        vals = np.array([anchor[int(i)] for i in idx], dtype=np.float64)
        # Uniform arc-length spacing makes vertex index a linear proxy for
        # arc length, so interpolating over index is exact.
        heights = np.interp(np.arange(resample_m, dtype=np.float64), idx, vals)
        height_norms = [normalize_height(h, h_min, h_max) for h in heights]
        mode = SketchMode.TWO_POINT_FIVE_D
    else:
        height_norms = [0.0] * resample_m
        mode = SketchMode.TWO_D

    vertices = tuple(
        PathVertex(
            u=float(pts[i, 0]),
            v=float(pts[i, 1]),
            time_norm=normalize_time(i, resample_m),
            height_norm=height_norms[i],
            step=i,
        )
        for i in range(resample_m)
    )
    events = tuple(
        InteractionEvent(step=nearest_vertex(pts, pixel), kind=kind)
        for pixel, kind in stroke.marker_clicks
    )
    return SketchSpec(path=PixelPath(vertices=vertices), events=events, mode=mode)


# --------------------------------------------------------------------------
# hand-landmark demos


@dataclass(frozen=True)
class HandFrame:
    """One video frame's hand landmarks.

    landmarks is (21, 2) pixel coordinates with a (21,) depth array in
    meters, or (21, 3) precomputed base-frame positions (depth unused).
    """

    landmarks: np.ndarray
    depth: np.ndarray | None = None

    def __post_init__(self):
        lm = np.ascontiguousarray(np.asarray(self.landmarks, dtype=np.float64))
        if lm.ndim != 2 or lm.shape[0] != HAND_LANDMARK_COUNT or lm.shape[1] not in (2, 3):
            raise InvalidRange(
                f"landmarks must be ({HAND_LANDMARK_COUNT}, 2) or ({HAND_LANDMARK_COUNT}, 3)"
            )
        object.__setattr__(self, "landmarks", lm)
        if self.depth is not None:
            depth = np.ascontiguousarray(np.asarray(self.depth, dtype=np.float64))
            if depth.shape != (HAND_LANDMARK_COUNT,):
                raise InvalidRange(f"depth must have shape ({HAND_LANDMARK_COUNT},)")
            object.__setattr__(self, "depth", depth)


@dataclass(frozen=True)
class HandDemoInput:
    """A hand-demo video reduced to landmarks plus annotated keyframes."""

    frames: tuple[HandFrame, ...]
    grasp_keyframes: tuple[int, ...] = ()
    release_keyframes: tuple[int, ...] = ()

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if not frames:
            raise InvalidRange("hand demo has no frames")
        grasp = tuple(int(k) for k in self.grasp_keyframes)
        release = tuple(int(k) for k in self.release_keyframes)
        object.__setattr__(self, "grasp_keyframes", grasp)
        object.__setattr__(self, "release_keyframes", release)
        # A keyframe marks the step where the transition begins; the state
        # change lands on the next frame, so the last frame cannot host one.
        for kf in grasp + release:
            if not (0 <= kf < len(frames) - 1):
                raise InvalidIndex(f"keyframe {kf} outside [0, {len(frames) - 1})")
        if set(grasp) & set(release):
            raise InvalidRange("a frame cannot be both grasp and release keyframe")
        merged = sorted([(k, EventKind.CLOSE) for k in grasp] + [(k, EventKind.OPEN) for k in release])
        expected = EventKind.CLOSE
        for _, kind in merged:
            if kind is not expected:
                raise InvalidRange("keyframes must alternate grasp/release starting with grasp")
            expected = EventKind.OPEN if expected is EventKind.CLOSE else EventKind.CLOSE


def _lift_landmark(camera: CameraModel, uv: np.ndarray, depth: float) -> np.ndarray:
    """Back-project a pixel with known depth into the robot base frame."""
    z = float(depth)
    x = (float(uv[0]) - camera.cx) * z / camera.fx
    y = (float(uv[1]) - camera.cy) * z / camera.fy
    cam = np.array([x, y, z], dtype=np.float64)
    return camera.rotation_matrix().T @ (cam - camera.translation.as_array())


def hand_demo_to_episode(
    demo: HandDemoInput,
    camera: CameraModel,
    ee_landmarks: tuple[int, int, int, int] = DEFAULT_EE_LANDMARKS,
    episode_id: str = "hand-demo",
    skill: str = "hand_demo",
    instruction: str = "",
) -> tuple[EpisodeTrajectory, list[InteractionEvent]]:
    """Turn a hand demo into an episode plus its interaction events.

    The EE center per frame is the centroid of the four configured landmark
    points (two on the thumb, two on the index finger); 2D landmarks are
    lifted to 3D with their depth values. Gripper signal channels are
    synthesized step functions that reproduce exactly the annotated events
    when run back through detect_key_steps.
    """
    for idx in ee_landmarks:
        if not (0 <= idx < HAND_LANDMARK_COUNT):
            raise BadLandmarkIndex(f"landmark index {idx} outside [0, {HAND_LANDMARK_COUNT})")

    centers = []
    for fi, frame in enumerate(demo.frames):
        points = []
        for idx in ee_landmarks:
            lm = frame.landmarks[idx]
            if frame.landmarks.shape[1] == 3:
                points.append(lm)
            else:
                if frame.depth is None:
                    raise MissingDepth(f"frame {fi} has 2D landmarks but no depth")
                d = frame.depth[idx]
                if not math.isfinite(d) or d <= 0:
                    raise MissingDepth(f"frame {fi} landmark {idx} has no valid depth")
                points.append(_lift_landmark(camera, lm, d))
        centers.append(np.mean(points, axis=0))

    flips = {kf: EventKind.CLOSE for kf in demo.grasp_keyframes}
    flips.update({kf: EventKind.OPEN for kf in demo.release_keyframes})
    steps = []
    grasping = False
    for i, center in enumerate(centers):
        if i - 1 in flips:
            grasping = flips[i - 1] is EventKind.CLOSE
        sensed, target = CLOSED_SIGNAL if grasping else OPEN_SIGNAL
        steps.append(
            EEState(step=i, position=Vec3.from_array(center), gripper_sensed=sensed, gripper_target=target)
        )
    events = [InteractionEvent(step=kf, kind=kind) for kf, kind in sorted(flips.items())]
    episode = EpisodeTrajectory(
        episode_id=episode_id, skill=skill, instruction=instruction, steps=tuple(steps)
    )
    return episode, events


# --------------------------------------------------------------------------
# waypoint plans


@dataclass(frozen=True)
class Waypoint:
    position: Vec3
    gripper: EventKind | None = None


@dataclass(frozen=True)
class WaypointPlan:
    waypoints: tuple[Waypoint, ...]

    def __post_init__(self):
        wps = tuple(self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if not wps:
            raise InvalidRange("plan needs at least 1 waypoint")

    def positions(self) -> np.ndarray:
        return np.array(
            [[w.position.x, w.position.y, w.position.z] for w in self.waypoints],
            dtype=np.float64,
        )


def parse_waypoint_plan(source) -> WaypointPlan:
    """Parse a plan from JSON: a list of {x, y, z, gripper?: "close"|"open"}."""
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, str) and "\n" not in source and Path(source).is_file():
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(1, f"invalid plan JSON: {exc.msg}") from exc
    if not isinstance(data, list):
        raise SchemaError(1, "plan must be a JSON array of waypoints")
    waypoints = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise SchemaError(i + 1, "waypoint must be an object")
        try:
            pos = Vec3(float(item["x"]), float(item["y"]), float(item["z"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(i + 1, "waypoint needs numeric x, y, z") from exc
        gripper = item.get("gripper")
        kind = None
        if gripper is not None:
            try:
                kind = EventKind(gripper)
            except ValueError as exc:
                raise SchemaError(i + 1, f"unknown gripper command {gripper!r}") from exc
        waypoints.append(Waypoint(position=pos, gripper=kind))
    return WaypointPlan(waypoints=tuple(waypoints))


def serialize_waypoint_plan(plan: WaypointPlan) -> str:
    items = []
    for w in plan.waypoints:
        item = {"x": w.position.x, "y": w.position.y, "z": w.position.z}
        if w.gripper is not None:
            item["gripper"] = w.gripper.value
        items.append(item)
    return json.dumps(items, indent=2, sort_keys=True) + "\n"


def plan_to_spec(
    plan: WaypointPlan,
    camera: CameraModel,
    samples_per_segment: int = DEFAULT_SAMPLES_PER_SEGMENT,
    h_min: float = DEFAULT_H_MIN,
    h_max: float = DEFAULT_H_MAX,
    mode: SketchMode = SketchMode.TWO_POINT_FIVE_D,
) -> SketchSpec:
    """Densify a waypoint plan into a sketch spec.

    Straight-line interpolation inserts samples_per_segment points per
    segment, giving 1 + segments*spp vertices; time runs (i+1)/M over the
    global sample index. Gripper commands become marker events at their
    waypoint's vertex. Every waypoint must project; a behind-camera
    waypoint raises BehindCamera with its index. Interior samples cannot
    be behind the camera when both endpoints are in front (depth is affine
    along the segment).
    """
    if samples_per_segment < 1:
        raise InvalidRange("samples_per_segment must be at least 1")
    for i, w in enumerate(plan.waypoints):
        project_point(camera, w.position, index=i)

    positions = plan.positions()
    dense = [positions[0]]
    for j in range(len(positions) - 1):
        a, b = positions[j], positions[j + 1]
        for k in range(1, samples_per_segment + 1):
            frac = k / samples_per_segment
            dense.append(b if k == samples_per_segment else a + (b - a) * frac)
    total = len(dense)

    vertices = []
    for i, point in enumerate(dense):
        u, v = project_point(camera, Vec3.from_array(point), index=i)
        vertices.append(
            PathVertex(
                u=u,
                v=v,
                time_norm=normalize_time(i, total),
                height_norm=normalize_height(float(point[2]), h_min, h_max),
                step=i,
            )
        )
    events = tuple(
        InteractionEvent(step=j * samples_per_segment, kind=w.gripper)
        for j, w in enumerate(plan.waypoints)
        if w.gripper is not None
    )
    return SketchSpec(path=PixelPath(vertices=tuple(vertices)), events=events, mode=mode)
