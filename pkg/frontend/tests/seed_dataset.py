"""Write a small synthetic dataset for the studio end-to-end tests.

Twelve short episodes around one tabletop cluster, one camera, one scene.
Usage: python3 seed_dataset.py <target-dir>
"""

import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from trajsketch.config import save_camera
from trajsketch.geometry import CameraModel, EEState, EpisodeTrajectory, Vec3
from trajsketch.ingest import serialize_episode_log
from trajsketch.interaction import CLOSED_SIGNAL, OPEN_SIGNAL


def main(root: Path) -> None:
    camera = CameraModel(
        fx=220.0,
        fy=220.0,
        cx=160.0,
        cy=128.0,
        rotation=(1.0, 0.0, 0.0, 0.0),
        translation=Vec3(0.0, 0.0, 0.0),
        width=320,
        height=256,
    )
    (root / "episodes").mkdir(parents=True)
    (root / "cameras").mkdir()
    (root / "scenes").mkdir()
    save_camera(camera, root / "cameras" / "cam-main.json")

    rng = np.random.default_rng(2026)
    for i in range(12):
        n = int(rng.integers(6, 12))
        walk = np.cumsum(rng.normal(scale=0.04, size=(n, 3)), axis=0)
        walk += np.asarray([0.0, 0.0, 0.9])
        steps = []
        for t, pos in enumerate(walk):
            sensed, target = CLOSED_SIGNAL if 0 < t < n - 1 else OPEN_SIGNAL
            steps.append(
                EEState(
                    step=t,
                    position=Vec3(float(pos[0]), float(pos[1]), float(pos[2])),
                    gripper_sensed=sensed,
                    gripper_target=target,
                )
            )
        episode = EpisodeTrajectory(
            episode_id=f"ep-{i:03d}",
            skill="pick" if i % 2 == 0 else "place",
            instruction="move the block",
            steps=tuple(steps),
        )
        (root / "episodes" / f"ep-{i:03d}.jsonl").write_text(
            serialize_episode_log(episode, camera_ref="cam-main")
        )

    Image.new("RGB", (camera.width, camera.height), (35, 40, 50)).save(
        root / "scenes" / "scene-main.png"
    )
    (root / "scenes" / "scene-main.json").write_text(
        json.dumps(
            {"scene_id": "scene-main", "camera_ref": "cam-main", "image": "scene-main.png"}
        )
    )


if __name__ == "__main__":
    main(Path(sys.argv[1]))
