"""
Hindsight sketch labels from a recorded episode
===============================================

Synthesize one pick-and-place episode, then produce its trajectory-sketch
conditioning images after the fact: project the end-effector path through
the camera, detect the gripper key steps, and rasterize both the flat (2D)
and height-colored (2.5D) variants.
"""

import math
from pathlib import Path

from trajsketch import (
    CameraModel,
    EEState,
    EpisodeTrajectory,
    Vec3,
    label_episode,
)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# A camera looking down the base +y axis from slightly above the table.
half = math.sqrt(0.5)
camera = CameraModel(
    fx=160.0,
    fy=160.0,
    cx=160.0,
    cy=128.0,
    rotation=(half, half, 0.0, 0.0),
    translation=Vec3(0.0, -0.2, 1.2),
    width=320,
    height=256,
)

# Scripted arc: approach, descend, grasp, carry, release. The gripper
# signals encode the grasp as target > sensed with the target above the
# closure threshold.
OPEN, HOLDING = (0.0, 0.0), (0.7, 1.0)
script = [
    ((-0.35, 0.85, 0.40), OPEN),
    ((-0.25, 0.85, 0.25), OPEN),
    ((-0.20, 0.85, 0.12), OPEN),     # lowest point: about to grasp
    ((-0.20, 0.85, 0.12), HOLDING),
    ((-0.05, 0.85, 0.35), HOLDING),  # carry over the obstacle
    ((0.12, 0.85, 0.38), HOLDING),
    ((0.22, 0.85, 0.18), HOLDING),
    ((0.22, 0.85, 0.15), OPEN),      # set down and release
    ((0.30, 0.85, 0.35), OPEN),
]
steps = tuple(
    EEState(step=i, position=Vec3(*p), gripper_sensed=s, gripper_target=t)
    for i, (p, (s, t)) in enumerate(script)
)
episode = EpisodeTrajectory(
    episode_id="demo-pick",
    skill="pick",
    instruction="move the block over the divider",
    steps=steps,
)

# One call does projection, event detection, and both rasterizations.
result = label_episode(episode, camera, h_min=0.0, h_max=0.5)

print(f"episode {result.episode_id}: {result.vertex_count} projected vertices, "
      f"{result.dropped_count} dropped")
for event in result.events:
    print(f"  gripper {event.kind.value} at sample {event.step}")

(OUT / "hindsight_2d.png").write_bytes(result.image_2d.to_png())
(OUT / "hindsight_25d.png").write_bytes(result.image_25d.to_png())
print(f"wrote {OUT / 'hindsight_2d.png'}")
print(f"wrote {OUT / 'hindsight_25d.png'}")

# In the 2.5D image the red channel still encodes time, but green now
# carries normalized height, so the dip to the table and the carry arc are
# visible as brightness changes along the curve.
