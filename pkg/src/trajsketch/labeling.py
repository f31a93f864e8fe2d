"""Hindsight labeling: turn a recorded episode into its sketch images.

No manual annotation is involved: the curve comes from projecting the
episode's EE positions, the channel values from the time/height
normalizations, and the markers from the gripper signals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import (
    DEFAULT_H_MAX,
    DEFAULT_H_MIN,
    CameraModel,
    EpisodeTrajectory,
    project_trajectory,
)
from .interaction import InteractionConfig, InteractionEvent, detect_key_steps
from .sketch import RenderConfig, SketchImage, SketchMode, SketchSpec, rasterize


@dataclass(frozen=True)
class LabelResult:
    """Both sketch renders of one episode plus bookkeeping counters.

    events_dropped counts detected events whose step's vertex fell behind
    the camera and could not be drawn.
    """

    episode_id: str
    image_2d: SketchImage
    image_25d: SketchImage
    events: tuple[InteractionEvent, ...]
    vertex_count: int
    dropped_count: int
    events_dropped: int


def label_episode(
    ep: EpisodeTrajectory,
    camera: CameraModel,
    h_min: float = DEFAULT_H_MIN,
    h_max: float = DEFAULT_H_MAX,
    interaction: InteractionConfig = InteractionConfig(),
    render: RenderConfig = RenderConfig(),
) -> LabelResult:
    """Project, detect events, and rasterize one episode in both modes."""
    path = project_trajectory(camera, ep, h_min=h_min, h_max=h_max)
    events = detect_key_steps(ep, interaction) if len(ep.steps) >= 2 else []
    surviving = {v.step for v in path.vertices}
    drawable = tuple(e for e in events if e.step in surviving)

    image_2d = rasterize(
        SketchSpec(path=path, events=drawable, mode=SketchMode.TWO_D), render
    )
    image_25d = rasterize(
        SketchSpec(path=path, events=drawable, mode=SketchMode.TWO_POINT_FIVE_D), render
    )
    return LabelResult(
        episode_id=ep.episode_id,
        image_2d=image_2d,
        image_25d=image_25d,
        events=drawable,
        vertex_count=len(path.vertices),
        dropped_count=path.dropped_count,
        events_dropped=len(events) - len(drawable),
    )
