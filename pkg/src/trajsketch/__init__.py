"""Trajectory-sketch toolkit.

Turns robot manipulation episode logs into trajectory-sketch conditioning
images (2D and 2.5D), builds sketches from drawn strokes, hand-landmark
demos, and planner waypoint lists, ranks trajectories by discrete Fréchet
distance, and executes plans through a kinematic IK baseline. A FastAPI
service and a CLI expose the same operations.
"""

from .errors import (
    BadLandmarkIndex,
    BehindCamera,
    EmptyResult,
    EmptySequence,
    EmptySpec,
    EpisodeTooShort,
    InvalidIndex,
    InvalidRange,
    LimitViolation,
    MissingDepth,
    NonMonotonicSteps,
    SchemaError,
    TooFewSamples,
    TooLarge,
    TrajSketchError,
    Unreachable,
)
from .geometry import (
    CameraModel,
    EEState,
    EpisodeTrajectory,
    PathVertex,
    PixelPath,
    Vec3,
    normalize_height,
    normalize_time,
    project_point,
    project_trajectory,
)
from .interaction import (
    EventKind,
    InteractionConfig,
    InteractionEvent,
    detect_key_steps,
    grasp_state,
)
from .sketch import (
    DecodedMarker,
    RenderConfig,
    SketchImage,
    SketchMode,
    SketchSpec,
    decode_markers,
    rasterize,
    read_curve_time,
)
from .similarity import (
    AnalyticsReport,
    SimilarityResult,
    TrajectoryEntry,
    as_waypoints,
    compute_analytics,
    distance_distribution,
    entry_from_episode,
    first_interaction_height_alignment,
    frechet_dp,
    frechet_oracle,
    resample_arclength,
    semantic_relevance,
    top_k_similar,
)
from .ingest import (
    HandDemoInput,
    HandFrame,
    StrokeInput,
    Waypoint,
    WaypointPlan,
    hand_demo_to_episode,
    parse_episode_log,
    parse_waypoint_plan,
    plan_to_spec,
    serialize_episode_log,
    serialize_waypoint_plan,
    stroke_to_spec,
)
from .simulator import (
    IKParams,
    KinematicChain,
    SimConfig,
    SimMode,
    execute,
    roundtrip_error,
    solve_ik_dls,
)
from .labeling import LabelResult, label_episode
from .config import WorkspaceConfig, load_camera, load_workspace_config, save_camera
from .dataset import DatasetSnapshot, Scene, load_dataset

__version__ = "0.1.0"
