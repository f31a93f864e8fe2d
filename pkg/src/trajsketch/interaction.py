"""Gripper interaction key-step detection.

The grasp predicate compares the sensed gripper joint position p against the
commanded target p_hat: the gripper is "closing and grasping" exactly when
the target exceeds the sensed value (still closing) and the target is above a
small threshold epsilon (commanded shut enough to mean a grasp). A key step
is any step where this boolean flips between consecutive samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import EpisodeTooShort, InvalidRange
from .geometry import EpisodeTrajectory

DEFAULT_EPSILON = 0.05

# Synthesized (sensed, target) gripper signal levels for the two grasp
# states; chosen so grasp_state holds for any epsilon in (0, 1).
CLOSED_SIGNAL = (0.7, 1.0)
OPEN_SIGNAL = (0.0, 0.0)


class EventKind(str, Enum):
    CLOSE = "close"
    OPEN = "open"


@dataclass(frozen=True)
class InteractionEvent:
    """A grasp-state transition at step index `step` (the sample before the flip)."""

    step: int
    kind: EventKind


@dataclass(frozen=True)
class InteractionConfig:
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise InvalidRange("epsilon must lie strictly inside (0, 1)")


def grasp_state(sensed: float, target: float, epsilon: float = DEFAULT_EPSILON) -> bool:
    """True when the gripper is closing on something: target > sensed and target > epsilon."""
    return (target - sensed > 0.0) and (target > epsilon)


def key_steps_from_signals(
    sensed: Sequence[float],
    target: Sequence[float],
    epsilon: float = DEFAULT_EPSILON,
) -> list[InteractionEvent]:
    """Detect grasp-state transitions over raw signal sequences.

    Emits Close at each index t where the grasp state turns on between t and
    t+1, and Open where it turns off. Indices are 0-based positions in the
    sequences. Sequences must have equal length >= 2.
    """
    if len(sensed) != len(target):
        raise InvalidRange("sensed and target must have equal length")
    if len(sensed) < 2:
        raise EpisodeTooShort("need at least 2 samples to detect transitions")
    events = []
    prev = grasp_state(sensed[0], target[0], epsilon)
    for t in range(len(sensed) - 1):
        cur = grasp_state(sensed[t + 1], target[t + 1], epsilon)
        if cur and not prev:
            events.append(InteractionEvent(step=t, kind=EventKind.CLOSE))
        elif prev and not cur:
            events.append(InteractionEvent(step=t, kind=EventKind.OPEN))
        prev = cur
    return events


def detect_key_steps(
    ep: EpisodeTrajectory, cfg: InteractionConfig = InteractionConfig()
) -> list[InteractionEvent]:
    """Detect gripper close/open key steps for an episode.

    Event steps are 0-based positions within ep.steps (not the raw recorded
    step numbers), matching the convention of PixelPath vertices.
    """
    if len(ep.steps) < 2:
        raise EpisodeTooShort(f"episode {ep.episode_id} has {len(ep.steps)} step(s)")
    sensed = [s.gripper_sensed for s in ep.steps]
    target = [s.gripper_target for s in ep.steps]
    return key_steps_from_signals(sensed, target, cfg.epsilon)
