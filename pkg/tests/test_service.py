from __future__ import annotations

import asyncio
import base64
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from support import grasp_signals, make_episode, write_dataset
from trajsketch.config import WorkspaceConfig, camera_to_dict
from trajsketch.dataset import load_dataset
from trajsketch.errors import BehindCamera, EmptySequence, SchemaError, TrajSketchError
from trajsketch.ingest import StrokeInput, Waypoint, WaypointPlan, stroke_to_spec
from trajsketch.interaction import EventKind
from trajsketch.service import create_app
from trajsketch.sketch import rasterize, round_half_away
from trajsketch.similarity import top_k_similar
from trajsketch.simulator import SimConfig, execute, roundtrip_error
from trajsketch.geometry import Vec3, project_trajectory


@pytest.fixture(scope="module")
def service(tmp_path_factory):
    rng = np.random.default_rng(41)
    episodes = []
    for i in range(6):
        n = int(rng.integers(3, 7))
        pts = (rng.uniform(-0.3, 0.3, size=(n, 3)) + [0, 0, 0.9]).tolist()
        grasping = [False] * n
        if n >= 3:
            grasping[1:-1] = [True] * (n - 2)
        episodes.append(
            make_episode(
                pts,
                episode_id=f"ep-{i:03d}",
                skill="pick" if i % 2 == 0 else "place",
                signal_pairs=grasp_signals(grasping),
            )
        )
    root = tmp_path_factory.mktemp("service-ds")
    write_dataset(root, episodes)
    snap = load_dataset(root)
    client = TestClient(create_app(config=WorkspaceConfig(), dataset=snap))
    return client, snap


def test_scene_returns_camera_and_image(service) -> None:
    client, snap = service
    r = client.get("/scene/scene-main")
    assert r.status_code == 200
    body = r.json()
    assert body["scene_id"] == "scene-main"
    assert body["camera"] == camera_to_dict(snap.scenes["scene-main"].camera)
    raw = base64.b64decode(body["image_b64"])
    assert raw == snap.scenes["scene-main"].image_path.read_bytes()


def test_unknown_scene_is_a_404_envelope(service) -> None:
    client, _ = service
    r = client.get("/scene/ghost")
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "bad_request"


def test_rasterize_equals_the_direct_pipeline(service) -> None:
    client, _ = service
    payload = {
        "samples": [[10.0, 200.0], [150.0, 120.0], [300.0, 40.0]],
        "marker_clicks": [
            {"pixel": [12.0, 198.0], "kind": "close"},
            {"pixel": [295.0, 44.0], "kind": "open"},
        ],
        "height_annotations": [
            {"pixel": [10.0, 200.0], "height": 0.1},
            {"pixel": [300.0, 40.0], "height": 0.8},
        ],
        "resample_m": 32,
    }
    r = client.post("/sketch/rasterize", json=payload)
    assert r.status_code == 200
    body = r.json()

    cfg = WorkspaceConfig()
    stroke = StrokeInput(
        samples=tuple((u, v) for u, v in payload["samples"]),
        marker_clicks=tuple(
            (tuple(m["pixel"]), EventKind(m["kind"])) for m in payload["marker_clicks"]
        ),
        height_annotations=tuple(
            (tuple(h["pixel"]), h["height"]) for h in payload["height_annotations"]
        ),
    )
    spec = stroke_to_spec(stroke, resample_m=32, h_min=cfg.h_min, h_max=cfg.h_max)
    image = rasterize(spec, cfg.render)
    assert base64.b64decode(body["png_b64"]) == image.to_png()
    by_step = {v.step: v for v in spec.path.vertices}
    assert body["events"] == [
        {
            "step": ev.step,
            "kind": ev.kind.value,
            "pixel": [round_half_away(by_step[ev.step].u), round_half_away(by_step[ev.step].v)],
        }
        for ev in spec.events
    ]
    assert body["spec"]["mode"] == "2.5d"
    assert body["spec"]["vertices"] == [[v.u, v.v] for v in spec.path.vertices]
    assert body["spec"]["time_norm"] == [v.time_norm for v in spec.path.vertices]
    assert body["spec"]["height_norm"] == [v.height_norm for v in spec.path.vertices]


def test_rasterize_input_errors_map_to_400(service) -> None:
    client, _ = service
    r = client.post("/sketch/rasterize", json={"samples": [[1.0, 1.0]]})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_request"
    r = client.post(
        "/sketch/rasterize",
        json={"samples": [[0, 0], [5, 5]], "marker_clicks": [{"pixel": [0, 0], "kind": "grab"}]},
    )
    assert r.status_code == 400
    r = client.post("/sketch/rasterize", json={"samples": [[0, 0], [5, 5]], "resample_m": 1})
    assert r.status_code == 400


def test_query_by_waypoints_equals_direct_call(service) -> None:
    client, snap = service
    waypoints = [[0.0, 0.0, 0.9], [0.1, 0.05, 0.95]]
    r = client.post("/similarity/query", json={"waypoints": waypoints, "k": 3})
    assert r.status_code == 200
    direct = top_k_similar(waypoints, snap.entries, k=3)
    assert r.json()["results"] == [
        {"episode_id": d.episode_id, "skill": d.skill, "distance": d.distance}
        for d in direct
    ]


def test_query_by_episode_id_uses_stored_positions(service) -> None:
    client, snap = service
    r = client.post("/similarity/query", json={"episode_id": "ep-002", "k": 2})
    assert r.status_code == 200
    rows = r.json()["results"]
    assert rows[0]["episode_id"] == "ep-002"
    assert rows[0]["distance"] == 0.0
    direct = top_k_similar(snap.episodes["ep-002"].positions(), snap.entries, k=2)
    assert rows == [
        {"episode_id": d.episode_id, "skill": d.skill, "distance": d.distance}
        for d in direct
    ]


def test_query_requires_some_query_shape(service) -> None:
    client, _ = service
    r = client.post("/similarity/query", json={"k": 3})
    assert r.status_code == 400
    r = client.post("/similarity/query", json={"episode_id": "nope"})
    assert r.status_code == 404


def test_streamed_query_matches_the_blocking_result(service) -> None:
    client, _ = service
    payload = {"waypoints": [[0.0, 0.0, 0.9], [0.2, 0.0, 0.9]], "k": 4}
    blocking = client.post("/similarity/query", json=payload).json()["results"]
    r = client.post("/similarity/query", json={**payload, "stream": True})
    assert r.status_code == 200
    lines = [json.loads(line) for line in r.text.splitlines()]
    progress = [l["progress"] for l in lines if "progress" in l]
    assert progress == sorted(progress)
    assert progress[-1] == 6
    assert lines[-1]["results"] == blocking


def test_rollout_equals_direct_execution(service) -> None:
    client, _ = service
    payload = {
        "plan": [
            {"x": 0.0, "y": 0.0, "z": 0.5},
            {"x": 0.3, "y": 0.1, "z": 0.6, "gripper": "close"},
            {"x": 0.1, "y": 0.4, "z": 0.7, "gripper": "open"},
        ],
        "config": {"max_speed": 0.4, "dt": 0.05, "mode": "task"},
        "episode_id": "web-rollout",
    }
    r = client.post("/rollout", json=payload)
    assert r.status_code == 200
    body = r.json()

    plan = WaypointPlan(
        waypoints=tuple(
            Waypoint(
                position=Vec3(p["x"], p["y"], p["z"]),
                gripper=EventKind(p["gripper"]) if p.get("gripper") else None,
            )
            for p in payload["plan"]
        )
    )
    cfg = SimConfig(max_speed=0.4, dt=0.05)
    ep = execute(plan, cfg, episode_id="web-rollout")
    assert body["roundtrip_error"] == roundtrip_error(plan, ep)
    assert body["episode"]["episode_id"] == "web-rollout"
    assert len(body["episode"]["steps"]) == len(ep)
    for row, step in zip(body["episode"]["steps"], ep.steps):
        assert row == {
            "step": step.step,
            "px": step.position.x,
            "py": step.position.y,
            "pz": step.position.z,
            "gripper_sensed": step.gripper_sensed,
            "gripper_target": step.gripper_target,
        }


def test_rollout_validates_its_payload(service) -> None:
    client, _ = service
    bad_mode = {"plan": [{"x": 0, "y": 0, "z": 0}], "config": {"mode": "teleport"}}
    assert client.post("/rollout", json=bad_mode).status_code == 400
    bad_dt = {"plan": [{"x": 0, "y": 0, "z": 0}], "config": {"dt": -1.0}}
    r = client.post("/rollout", json=bad_dt)
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_request"


def _episode_rows(ep) -> list[dict]:
    return [
        {
            "step": s.step,
            "px": s.position.x,
            "py": s.position.y,
            "pz": s.position.z,
            "gripper_sensed": s.gripper_sensed,
            "gripper_target": s.gripper_target,
        }
        for s in ep.steps
    ]


def test_episode_endpoint_returns_the_stored_log(service) -> None:
    client, snap = service
    for eid, ep in snap.episodes.items():
        body = client.get(f"/episode/{eid}").json()
        assert body == {
            "episode": {
                "episode_id": ep.episode_id,
                "skill": ep.skill,
                "instruction": ep.instruction,
                "steps": _episode_rows(ep),
            }
        }


def test_episode_endpoint_projects_through_a_scene(service) -> None:
    client, snap = service
    wcfg = WorkspaceConfig()
    for eid, ep in snap.episodes.items():
        body = client.get(f"/episode/{eid}", params={"scene_id": "scene-main"}).json()
        path = project_trajectory(
            snap.scenes["scene-main"].camera, ep, h_min=wcfg.h_min, h_max=wcfg.h_max
        )
        assert body["pixels"] == [[v.u, v.v] for v in path.vertices]
        assert body["dropped_count"] == path.dropped_count
        assert body["episode"]["steps"] == _episode_rows(ep)


def test_episode_endpoint_404s_on_unknown_ids(service) -> None:
    client, _ = service
    r = client.get("/episode/ghost")
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "bad_request"
    r = client.get("/episode/ep-000", params={"scene_id": "ghost"})
    assert r.status_code == 404
    assert "unknown scene" in r.json()["error"]["message"]


def test_rollout_with_scene_id_adds_a_pixel_overlay(service) -> None:
    client, snap = service
    payload = {
        "plan": [
            {"x": 0.0, "y": 0.0, "z": 0.5},
            {"x": 0.2, "y": -0.1, "z": 0.8, "gripper": "close"},
        ],
        "config": {"max_speed": 0.4, "dt": 0.05, "mode": "task"},
        "episode_id": "overlay-run",
    }
    bare = client.post("/rollout", json=payload).json()
    assert "pixels" not in bare

    body = client.post("/rollout", json={**payload, "scene_id": "scene-main"}).json()
    plan = WaypointPlan(
        waypoints=tuple(
            Waypoint(
                position=Vec3(p["x"], p["y"], p["z"]),
                gripper=EventKind(p["gripper"]) if p.get("gripper") else None,
            )
            for p in payload["plan"]
        )
    )
    ep = execute(plan, SimConfig(max_speed=0.4, dt=0.05), episode_id="overlay-run")
    wcfg = WorkspaceConfig()
    path = project_trajectory(
        snap.scenes["scene-main"].camera, ep, h_min=wcfg.h_min, h_max=wcfg.h_max
    )
    assert body["pixels"] == [[v.u, v.v] for v in path.vertices]
    assert body["dropped_count"] == path.dropped_count
    assert body["episode"] == bare["episode"]
    assert body["roundtrip_error"] == bare["roundtrip_error"]

    r = client.post("/rollout", json={**payload, "scene_id": "ghost"})
    assert r.status_code == 404


def test_stats_reports_the_snapshot(service) -> None:
    client, snap = service
    assert client.get("/dataset/stats").json() == snap.stats()


def test_endpoints_without_a_dataset(tmp_path) -> None:
    client = TestClient(create_app())
    assert client.get("/scene/any").status_code == 404
    assert client.get("/episode/any").status_code == 404
    r = client.post("/similarity/query", json={"waypoints": [[0, 0, 0]]})
    assert r.status_code == 400
    assert r.json()["error"]["message"] == "no dataset loaded"
    stats = client.get("/dataset/stats").json()
    assert stats["episode_count"] == 0


def test_cors_allows_browser_clients(service) -> None:
    client, _ = service
    r = client.get("/dataset/stats", headers={"Origin": "http://localhost:5173"})
    assert r.headers.get("access-control-allow-origin") == "*"


def test_domain_error_handler_maps_exception_types() -> None:
    app = create_app()
    handler = app.exception_handlers[TrajSketchError]

    def run(exc):
        resp = asyncio.run(handler(None, exc))
        return resp.status_code, json.loads(resp.body)["error"]["code"]

    assert run(BehindCamera(2)) == (422, "behind_camera")
    assert run(SchemaError(3, "bad line")) == (422, "schema_error")
    assert run(EmptySequence("nothing")) == (400, "bad_request")
