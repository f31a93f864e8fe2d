"""Shared builders for the test suite.

Kept as plain functions rather than fixtures so tests can call them with
explicit arguments and stay readable as standalone scenarios.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from trajsketch.config import save_camera
from trajsketch.geometry import CameraModel, EEState, EpisodeTrajectory, Vec3
from trajsketch.ingest import serialize_episode_log
from trajsketch.interaction import CLOSED_SIGNAL, OPEN_SIGNAL


def make_camera(**overrides) -> CameraModel:
    """Identity-pose pinhole camera; (0, 0, 1) lands on the principal point."""
    kwargs: dict = dict(
        fx=128.0,
        fy=128.0,
        cx=64.0,
        cy=64.0,
        rotation=(1.0, 0.0, 0.0, 0.0),
        translation=Vec3(0.0, 0.0, 0.0),
        width=128,
        height=128,
    )
    kwargs.update(overrides)
    return CameraModel(**kwargs)


def side_camera(**overrides) -> CameraModel:
    """Camera rotated 90 degrees about x: base +y becomes viewing depth."""
    half = math.sqrt(0.5)
    kwargs: dict = dict(
        rotation=(half, half, 0.0, 0.0),
        translation=Vec3(0.05, -0.1, 0.8),
    )
    kwargs.update(overrides)
    return make_camera(**kwargs)


def grasp_signals(grasping: list[bool]) -> list[tuple[float, float]]:
    """Per-step (sensed, target) pairs realizing the given grasp states."""
    return [CLOSED_SIGNAL if g else OPEN_SIGNAL for g in grasping]


def make_episode(
    positions,
    *,
    signal_pairs=None,
    episode_id: str = "ep-000",
    skill: str = "pick",
    instruction: str = "pick up the block",
) -> EpisodeTrajectory:
    steps = []
    for i, pos in enumerate(positions):
        sensed, target = signal_pairs[i] if signal_pairs is not None else OPEN_SIGNAL
        steps.append(
            EEState(
                step=i,
                position=Vec3(float(pos[0]), float(pos[1]), float(pos[2])),
                gripper_sensed=sensed,
                gripper_target=target,
            )
        )
    return EpisodeTrajectory(
        episode_id=episode_id,
        skill=skill,
        instruction=instruction,
        steps=tuple(steps),
    )


def random_walk_positions(rng: np.random.Generator, n: int, *, center=(0.0, 0.0, 0.5), spread: float = 0.3):
    """Smooth random polyline of n points around a center, for bulk datasets."""
    steps = rng.normal(scale=spread / max(n, 2), size=(n, 3))
    walk = np.cumsum(steps, axis=0)
    return walk + np.asarray(center, dtype=float)


def write_dataset(
    root: Path,
    episodes,
    *,
    camera: CameraModel | None = None,
    camera_ref: str | None = "cam-main",
    scene: bool = True,
) -> Path:
    """Lay out an on-disk dataset: episodes/, cameras/, and one scene."""
    cam = camera if camera is not None else make_camera()
    (root / "episodes").mkdir(parents=True, exist_ok=True)
    (root / "cameras").mkdir(exist_ok=True)
    save_camera(cam, root / "cameras" / f"{camera_ref}.json")
    for ep in episodes:
        text = serialize_episode_log(ep, camera_ref=camera_ref)
        (root / "episodes" / f"{ep.episode_id}.jsonl").write_text(text)
    if scene:
        (root / "scenes").mkdir(exist_ok=True)
        Image.new("RGB", (cam.width, cam.height), (40, 40, 40)).save(
            root / "scenes" / "scene-main.png"
        )
        (root / "scenes" / "scene-main.json").write_text(
            json.dumps(
                {
                    "scene_id": "scene-main",
                    "camera_ref": camera_ref,
                    "image": "scene-main.png",
                }
            )
        )
    return root
