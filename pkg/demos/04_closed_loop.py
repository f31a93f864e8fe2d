"""
Executing a waypoint plan
=========================

Run a sketch-derived waypoint plan through the kinematic executor in both
modes, verify the rollout stays faithful to the plan, and confirm the
gripper commands come back out of the executed episode as key steps.
"""

from trajsketch import (
    EventKind,
    SimConfig,
    SimMode,
    Vec3,
    Waypoint,
    WaypointPlan,
    detect_key_steps,
    execute,
    roundtrip_error,
)

# Grab at the second waypoint, release at the fourth.
plan = WaypointPlan(
    waypoints=(
        Waypoint(position=Vec3(0.45, 0.10, 0.60)),
        Waypoint(position=Vec3(0.50, 0.15, 0.30), gripper=EventKind.CLOSE),
        Waypoint(position=Vec3(0.40, 0.35, 0.55)),
        Waypoint(position=Vec3(0.30, 0.45, 0.35), gripper=EventKind.OPEN),
        Waypoint(position=Vec3(0.35, 0.40, 0.60)),
    )
)

config = SimConfig(max_speed=0.4, dt=0.05)

# Task-space mode moves the EE point directly along each segment.
episode = execute(plan, config, episode_id="demo-rollout")
error = roundtrip_error(plan, episode)
bound = config.max_speed * config.dt
print(f"task-space rollout: {len(episode.steps)} samples, "
      f"roundtrip error {error:.2e} (bound {bound:.2e})")

# The executed gripper signals reproduce the commanded events.
for event in detect_key_steps(episode):
    pos = episode.steps[event.step].position
    print(f"  {event.kind.value} at sample {event.step}, "
          f"EE ({pos.x:.2f}, {pos.y:.2f}, {pos.z:.2f})")

# Joint-space mode solves IK per sample on the default 4-dof chain and
# records forward-kinematics positions; it should track the same path.
joint_episode = execute(plan, SimConfig(max_speed=0.4, dt=0.05, mode=SimMode.JOINT_SPACE))
worst = max(
    ((a.position.x - b.position.x) ** 2
     + (a.position.y - b.position.y) ** 2
     + (a.position.z - b.position.z) ** 2) ** 0.5
    for a, b in zip(joint_episode.steps, episode.steps)
)
print(f"joint-space rollout: {len(joint_episode.steps)} samples, "
      f"max deviation from task-space {worst:.2e}")
