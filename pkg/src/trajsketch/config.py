"""Workspace configuration and camera calibration files.

Both are JSON documents. A camera file carries fx, fy, cx, cy, quaternion
(w, x, y, z), translation (x, y, z), width, height. The workspace config
bundles the dataset-wide knobs: height bounds, gripper epsilon, render
settings, and the dataset/camera paths.

Environment overrides: TRAJSKETCH_DATASET replaces the configured dataset
path; TRAJSKETCH_PORT replaces the serve port. Explicit CLI flags beat both.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidRange, SchemaError
from .geometry import DEFAULT_H_MAX, DEFAULT_H_MIN, CameraModel, Vec3
from .interaction import DEFAULT_EPSILON
from .sketch import RenderConfig

DATASET_ENV = "TRAJSKETCH_DATASET"
PORT_ENV = "TRAJSKETCH_PORT"
DEFAULT_PORT = 8000


def load_camera(source) -> CameraModel:
    """Read a camera calibration JSON file (or raw JSON text)."""
    text = _read_text(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(1, f"invalid camera JSON: {exc.msg}") from exc
    try:
        quaternion = tuple(float(c) for c in data["quaternion"])
        translation = Vec3(*(float(c) for c in data["translation"]))
        return CameraModel(
            fx=float(data["fx"]),
            fy=float(data["fy"]),
            cx=float(data["cx"]),
            cy=float(data["cy"]),
            rotation=quaternion,
            translation=translation,
            width=int(data["width"]),
            height=int(data["height"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(1, f"camera file missing or malformed field: {exc}") from exc


def camera_to_dict(camera: CameraModel) -> dict:
    return {
        "fx": camera.fx,
        "fy": camera.fy,
        "cx": camera.cx,
        "cy": camera.cy,
        "quaternion": list(camera.rotation),
        "translation": [camera.translation.x, camera.translation.y, camera.translation.z],
        "width": camera.width,
        "height": camera.height,
    }


def save_camera(camera: CameraModel, path) -> None:
    payload = camera_to_dict(camera)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class WorkspaceConfig:
    h_min: float = DEFAULT_H_MIN
    h_max: float = DEFAULT_H_MAX
    epsilon: float = DEFAULT_EPSILON
    render: RenderConfig = field(default_factory=RenderConfig)
    dataset_path: Path | None = None
    camera_path: Path | None = None

    def __post_init__(self):
        if self.h_max <= self.h_min:
            raise InvalidRange("h_max must exceed h_min")
        if not (0.0 < self.epsilon < 1.0):
            raise InvalidRange("epsilon must lie strictly inside (0, 1)")
        if self.dataset_path is not None:
            object.__setattr__(self, "dataset_path", Path(self.dataset_path))
        if self.camera_path is not None:
            object.__setattr__(self, "camera_path", Path(self.camera_path))


def load_workspace_config(path=None) -> WorkspaceConfig:
    """Load a workspace config file, or defaults when path is None.

    TRAJSKETCH_DATASET, when set, overrides the dataset path either way.
    """
    if path is None:
        cfg = WorkspaceConfig()
    else:
        try:
            data = json.loads(_read_text(path))
        except json.JSONDecodeError as exc:
            raise SchemaError(1, f"invalid config JSON: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise SchemaError(1, "config must be a JSON object")
        render_data = data.get("render", {})
        if not isinstance(render_data, dict):
            raise SchemaError(1, "config field 'render' must be an object")
        try:
            render = RenderConfig(**render_data)
            cfg = WorkspaceConfig(
                h_min=float(data.get("h_min", DEFAULT_H_MIN)),
                h_max=float(data.get("h_max", DEFAULT_H_MAX)),
                epsilon=float(data.get("epsilon", DEFAULT_EPSILON)),
                render=render,
                dataset_path=data.get("dataset_path"),
                camera_path=data.get("camera_path"),
            )
        except TypeError as exc:
            raise SchemaError(1, f"bad config field: {exc}") from exc

    env_dataset = os.environ.get(DATASET_ENV)
    if env_dataset:
        object.__setattr__(cfg, "dataset_path", Path(env_dataset))
    return cfg


def save_workspace_config(cfg: WorkspaceConfig, path) -> None:
    payload = {
        "h_min": cfg.h_min,
        "h_max": cfg.h_max,
        "epsilon": cfg.epsilon,
        "render": {
            "width": cfg.render.width,
            "height": cfg.render.height,
            "line_thickness": cfg.render.line_thickness,
            "marker_radius": cfg.render.marker_radius,
        },
        "dataset_path": str(cfg.dataset_path) if cfg.dataset_path else None,
        "camera_path": str(cfg.camera_path) if cfg.camera_path else None,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def resolve_port(cli_port: int | None = None) -> int:
    """Serve port precedence: explicit CLI flag, then TRAJSKETCH_PORT, then 8000."""
    if cli_port is not None:
        return cli_port
    env_port = os.environ.get(PORT_ENV)
    if env_port:
        try:
            return int(env_port)
        except ValueError as exc:
            raise InvalidRange(f"{PORT_ENV} must be an integer, got {env_port!r}") from exc
    return DEFAULT_PORT


def _read_text(source) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        path = Path(source)
        if "\n" not in source and path.is_file():
            return path.read_text(encoding="utf-8")
        return source
    return source.read()
