"""Read-only dataset snapshots.

Layout on disk:

    root/
      episodes/*.jsonl     episode logs (header + one step per line)
      cameras/*.json       camera calibration files, referenced by stem
      scenes/*.json        {"scene_id", "camera_ref", "image": "name.png"}
      scenes/*.png         scene observation images

A snapshot is loaded once and never mutated; concurrent queries share it
freely. Episode camera_ref fields and scene camera_ref fields both name a
camera file by stem.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from .config import load_camera
from .errors import InvalidRange, SchemaError
from .geometry import CameraModel, EpisodeTrajectory
from .ingest import parse_episode_log, read_episode_header
from .interaction import DEFAULT_EPSILON
from .similarity import TrajectoryEntry, entry_from_episode


@dataclass(frozen=True)
class Scene:
    """An initial task state: a camera plus its observation image."""

    scene_id: str
    camera: CameraModel
    image_path: Path


@dataclass(frozen=True)
class DatasetSnapshot:
    root: Path
    episodes: dict[str, EpisodeTrajectory]
    camera_refs: dict[str, str | None]
    cameras: dict[str, CameraModel]
    scenes: dict[str, Scene]
    entries: tuple[TrajectoryEntry, ...]

    def camera_for(self, episode_id: str) -> CameraModel | None:
        ref = self.camera_refs.get(episode_id)
        if ref is None:
            return None
        return self.cameras.get(ref)

    def stats(self) -> dict:
        skills: dict[str, int] = {}
        total_steps = 0
        for ep in self.episodes.values():
            skills[ep.skill] = skills.get(ep.skill, 0) + 1
            total_steps += len(ep.steps)
        return {
            "episode_count": len(self.episodes),
            "total_steps": total_steps,
            "skills": dict(sorted(skills.items())),
            "camera_count": len(self.cameras),
            "scene_count": len(self.scenes),
        }


def load_dataset(root, epsilon: float = DEFAULT_EPSILON) -> DatasetSnapshot:
    """Load a dataset directory into an immutable snapshot.

    epsilon feeds interaction detection for the retrieval entries'
    first_interaction_z values. Episode ids must be unique across files.
    """
    root = Path(root)
    if not root.is_dir():
        raise InvalidRange(f"dataset root {root} is not a directory")

    cameras: dict[str, CameraModel] = {}
    cam_dir = root / "cameras"
    if cam_dir.is_dir():
        for path in sorted(cam_dir.glob("*.json")):
            cameras[path.stem] = load_camera(path)

    episodes: dict[str, EpisodeTrajectory] = {}
    camera_refs: dict[str, str | None] = {}
    ep_dir = root / "episodes"
    if ep_dir.is_dir():
        for path in sorted(ep_dir.glob("*.jsonl")):
            ep = parse_episode_log(path)
            if ep.episode_id in episodes:
                raise SchemaError(1, f"duplicate episode_id {ep.episode_id!r} in {path.name}")
            episodes[ep.episode_id] = ep
            camera_refs[ep.episode_id] = read_episode_header(path).get("camera_ref")

    scenes: dict[str, Scene] = {}
    scene_dir = root / "scenes"
    if scene_dir.is_dir():
        for path in sorted(scene_dir.glob("*.json")):
            scenes[path.stem] = _load_scene(path, cameras)

    entries = tuple(
        entry_from_episode(episodes[eid], epsilon=epsilon) for eid in sorted(episodes)
    )
    return DatasetSnapshot(
        root=root,
        episodes=episodes,
        camera_refs=camera_refs,
        cameras=cameras,
        scenes=scenes,
        entries=entries,
    )


def _load_scene(path: Path, cameras: dict[str, CameraModel]) -> Scene:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(1, f"invalid scene JSON in {path.name}: {exc.msg}") from exc
    for key in ("scene_id", "camera_ref", "image"):
        if not isinstance(data.get(key), str):
            raise SchemaError(1, f"scene {path.name} field {key!r} missing or not a string")
    camera = cameras.get(data["camera_ref"])
    if camera is None:
        raise SchemaError(1, f"scene {path.name} references unknown camera {data['camera_ref']!r}")
    image_path = path.parent / data["image"]
    if not image_path.is_file():
        raise SchemaError(1, f"scene {path.name} image {data['image']!r} not found")
    with Image.open(image_path) as img:
        if img.size != (camera.width, camera.height):
            raise InvalidRange(
                f"scene {data['scene_id']} image is {img.size}, camera expects "
                f"({camera.width}, {camera.height})"
            )
    return Scene(scene_id=data["scene_id"], camera=camera, image_path=image_path)
