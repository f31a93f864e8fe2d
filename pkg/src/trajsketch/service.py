"""HTTP service over the library: sketching, retrieval, rollout, scenes.

Every endpoint is a thin adapter around a direct library call over an
immutable dataset snapshot; the service adds no computation of its own.
Errors come back as {"error": {"code", "message"}} with codes bad_request,
behind_camera, or schema_error.
"""

from __future__ import annotations

import base64
import json
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from .config import WorkspaceConfig, camera_to_dict
from .dataset import DatasetSnapshot, load_dataset
from .errors import BehindCamera, SchemaError, TrajSketchError
from .ingest import (
    DEFAULT_RESAMPLE_M,
    StrokeInput,
    Waypoint,
    WaypointPlan,
    stroke_to_spec,
)
from .interaction import EventKind
from .sketch import rasterize, round_half_away
from .similarity import DEFAULT_K, SimilarityResult, as_waypoints, top_k_similar
from .simulator import SimConfig, SimMode, execute, roundtrip_error
from .geometry import Vec3, project_trajectory

# Candidate-partition size for streamed similarity queries.
STREAM_CHUNK = 256


class MarkerClickPayload(BaseModel):
    pixel: tuple[float, float]
    kind: Literal["close", "open"]


class HeightAnnotationPayload(BaseModel):
    pixel: tuple[float, float]
    height: float


class RasterizePayload(BaseModel):
    samples: list[tuple[float, float]]
    marker_clicks: list[MarkerClickPayload] = []
    height_annotations: list[HeightAnnotationPayload] = []
    resample_m: int = DEFAULT_RESAMPLE_M


class QueryPayload(BaseModel):
    waypoints: list[tuple[float, float, float]] | None = None
    episode_id: str | None = None
    k: int = DEFAULT_K
    resample_n: int | None = None
    stream: bool = False


class PlanPointPayload(BaseModel):
    x: float
    y: float
    z: float
    gripper: Literal["close", "open"] | None = None


class SimConfigPayload(BaseModel):
    max_speed: float = 0.5
    dt: float = 0.05
    mode: Literal["task", "joint"] = "task"


class RolloutPayload(BaseModel):
    plan: list[PlanPointPayload]
    config: SimConfigPayload = SimConfigPayload()
    episode_id: str = "rollout"
    scene_id: str | None = None


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def _result_rows(results: list[SimilarityResult]) -> list[dict]:
    return [
        {"episode_id": r.episode_id, "skill": r.skill, "distance": r.distance}
        for r in results
    ]


def _episode_dict(episode) -> dict:
    return {
        "episode_id": episode.episode_id,
        "skill": episode.skill,
        "instruction": episode.instruction,
        "steps": [
            {
                "step": s.step,
                "px": s.position.x,
                "py": s.position.y,
                "pz": s.position.z,
                "gripper_sensed": s.gripper_sensed,
                "gripper_target": s.gripper_target,
            }
            for s in episode.steps
        ],
    }


def create_app(
    config: WorkspaceConfig | None = None,
    dataset: DatasetSnapshot | None = None,
) -> FastAPI:
    """Build the service over a workspace config and dataset snapshot.

    When dataset is None and the config names a dataset_path, the snapshot
    is loaded from disk once at startup.
    """
    cfg = config if config is not None else WorkspaceConfig()
    if dataset is None and cfg.dataset_path is not None:
        dataset = load_dataset(cfg.dataset_path, epsilon=cfg.epsilon)

    app = FastAPI(title="trajsketch", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(TrajSketchError)
    async def _domain_error(request: Request, exc: TrajSketchError):
        if isinstance(exc, BehindCamera):
            return JSONResponse(status_code=422, content=_error_body("behind_camera", str(exc)))
        if isinstance(exc, SchemaError):
            return JSONResponse(status_code=422, content=_error_body("schema_error", str(exc)))
        return JSONResponse(status_code=400, content=_error_body("bad_request", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content=_error_body("bad_request", str(exc.errors())))

    @app.get("/scene/{scene_id}")
    def get_scene(scene_id: str):
        scene = dataset.scenes.get(scene_id) if dataset else None
        if scene is None:
            return JSONResponse(
                status_code=404,
                content=_error_body("bad_request", f"unknown scene {scene_id!r}"),
            )
        image_b64 = base64.b64encode(scene.image_path.read_bytes()).decode("ascii")
        return {
            "scene_id": scene.scene_id,
            "camera": camera_to_dict(scene.camera),
            "image_b64": image_b64,
        }

    @app.post("/sketch/rasterize")
    def post_rasterize(payload: RasterizePayload):
        stroke = StrokeInput(
            samples=tuple(payload.samples),
            marker_clicks=tuple(
                (m.pixel, EventKind(m.kind)) for m in payload.marker_clicks
            ),
            height_annotations=tuple(
                (h.pixel, h.height) for h in payload.height_annotations
            ),
        )
        spec = stroke_to_spec(
            stroke, resample_m=payload.resample_m, h_min=cfg.h_min, h_max=cfg.h_max
        )
        image = rasterize(spec, cfg.render)
        by_step = {v.step: v for v in spec.path.vertices}
        events = [
            {
                "step": ev.step,
                "kind": ev.kind.value,
                "pixel": [
                    round_half_away(by_step[ev.step].u),
                    round_half_away(by_step[ev.step].v),
                ],
            }
            for ev in spec.events
        ]
        return {
            "png_b64": base64.b64encode(image.to_png()).decode("ascii"),
            "events": events,
            "spec": {
                "mode": spec.mode.value,
                "vertices": [[v.u, v.v] for v in spec.path.vertices],
                "time_norm": [v.time_norm for v in spec.path.vertices],
                "height_norm": [v.height_norm for v in spec.path.vertices],
            },
        }

    @app.post("/similarity/query")
    def post_query(payload: QueryPayload):
        if dataset is None or not dataset.entries:
            return JSONResponse(
                status_code=400, content=_error_body("bad_request", "no dataset loaded")
            )
        if payload.waypoints is not None:
            query = as_waypoints(payload.waypoints)
        elif payload.episode_id is not None:
            ep = dataset.episodes.get(payload.episode_id)
            if ep is None:
                return JSONResponse(
                    status_code=404,
                    content=_error_body(
                        "bad_request", f"unknown episode {payload.episode_id!r}"
                    ),
                )
            query = ep.positions()
        else:
            return JSONResponse(
                status_code=400,
                content=_error_body("bad_request", "need waypoints or episode_id"),
            )

        entries = dataset.entries
        if not payload.stream:
            results = top_k_similar(query, entries, k=payload.k, resample_n=payload.resample_n)
            return {"results": _result_rows(results)}

        def generate():
            # Per-chunk top-k merge: the global top-k is a subset of the
            # union of per-chunk top-ks, so re-sorting the merge by
            # (distance, episode_id) reproduces the direct call exactly.
            merged: list[SimilarityResult] = []
            total = len(entries)
            for lo in range(0, total, STREAM_CHUNK):
                chunk = entries[lo : lo + STREAM_CHUNK]
                merged.extend(
                    top_k_similar(query, chunk, k=payload.k, resample_n=payload.resample_n)
                )
                done = min(lo + STREAM_CHUNK, total)
                yield json.dumps({"progress": done, "total": total}) + "\n"
            merged.sort(key=lambda r: (r.distance, r.episode_id))
            yield json.dumps({"results": _result_rows(merged[: payload.k])}) + "\n"

        return StreamingResponse(generate(), media_type="application/jsonl")

    def _scene_or_404(scene_id: str):
        scene = dataset.scenes.get(scene_id) if dataset else None
        if scene is None:
            return None, JSONResponse(
                status_code=404,
                content=_error_body("bad_request", f"unknown scene {scene_id!r}"),
            )
        return scene, None

    def _pixel_overlay(scene, episode) -> dict:
        path = project_trajectory(scene.camera, episode, h_min=cfg.h_min, h_max=cfg.h_max)
        return {
            "pixels": [[v.u, v.v] for v in path.vertices],
            "dropped_count": path.dropped_count,
        }

    @app.get("/episode/{episode_id}")
    def get_episode(episode_id: str, scene_id: str | None = None):
        episode = dataset.episodes.get(episode_id) if dataset else None
        if episode is None:
            return JSONResponse(
                status_code=404,
                content=_error_body("bad_request", f"unknown episode {episode_id!r}"),
            )
        body = {"episode": _episode_dict(episode)}
        if scene_id is not None:
            scene, err = _scene_or_404(scene_id)
            if err is not None:
                return err
            body.update(_pixel_overlay(scene, episode))
        return body

    @app.post("/rollout")
    def post_rollout(payload: RolloutPayload):
        waypoints = []
        for p in payload.plan:
            kind = EventKind(p.gripper) if p.gripper is not None else None
            waypoints.append(Waypoint(position=Vec3(p.x, p.y, p.z), gripper=kind))
        plan = WaypointPlan(waypoints=tuple(waypoints))
        sim_cfg = SimConfig(
            max_speed=payload.config.max_speed,
            dt=payload.config.dt,
            mode=SimMode(payload.config.mode),
        )
        scene = None
        if payload.scene_id is not None:
            # Resolve before executing so a bad scene id costs nothing.
            scene, err = _scene_or_404(payload.scene_id)
            if err is not None:
                return err
        episode = execute(plan, sim_cfg, episode_id=payload.episode_id)
        error = roundtrip_error(plan, episode)
        body = {"episode": _episode_dict(episode), "roundtrip_error": error}
        if scene is not None:
            body.update(_pixel_overlay(scene, episode))
        return body

    @app.get("/dataset/stats")
    def get_stats():
        if dataset is None:
            return {
                "episode_count": 0,
                "total_steps": 0,
                "skills": {},
                "camera_count": 0,
                "scene_count": 0,
            }
        return dataset.stats()

    return app
