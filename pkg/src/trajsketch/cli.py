"""Command-line interface: label | analyze | query | simulate | serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import (
    WorkspaceConfig,
    load_camera,
    load_workspace_config,
    resolve_port,
)
from .dataset import DatasetSnapshot, load_dataset
from .errors import TrajSketchError
from .ingest import parse_episode_log, parse_waypoint_plan, serialize_episode_log
from .interaction import InteractionConfig
from .labeling import label_episode
from .similarity import compute_analytics, entry_from_episode, top_k_similar
from .simulator import SimConfig, SimMode, execute, roundtrip_error


def _resolve_dataset(cli_value, cfg: WorkspaceConfig) -> Path:
    path = Path(cli_value) if cli_value else cfg.dataset_path
    if path is None:
        raise TrajSketchError("no dataset path: pass --dataset or set it in the config")
    return path


def _cmd_label(args) -> int:
    cfg = load_workspace_config(args.config)
    snapshot = load_dataset(_resolve_dataset(args.dataset, cfg), epsilon=cfg.epsilon)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    fallback_camera = load_camera(cfg.camera_path) if cfg.camera_path else None

    manifest: dict[str, dict] = {}
    failures: dict[str, str] = {}
    for episode_id in sorted(snapshot.episodes):
        ep = snapshot.episodes[episode_id]
        camera = snapshot.camera_for(episode_id) or fallback_camera
        if camera is None:
            failures[episode_id] = "no camera: episode has no camera_ref and no fallback configured"
            print(f"label: {episode_id}: no camera available", file=sys.stderr)
            continue
        try:
            result = label_episode(
                ep,
                camera,
                h_min=cfg.h_min,
                h_max=cfg.h_max,
                interaction=InteractionConfig(epsilon=cfg.epsilon),
                render=cfg.render,
            )
        except TrajSketchError as exc:
            failures[episode_id] = str(exc)
            print(f"label: {episode_id}: {exc}", file=sys.stderr)
            continue
        name_2d = f"{episode_id}_2d.png"
        name_25d = f"{episode_id}_25d.png"
        (out_dir / name_2d).write_bytes(result.image_2d.to_png())
        (out_dir / name_25d).write_bytes(result.image_25d.to_png())
        manifest[episode_id] = {
            "files": {"2d": name_2d, "25d": name_25d},
            "events": [{"step": e.step, "kind": e.kind.value} for e in result.events],
            "vertex_count": result.vertex_count,
            "dropped_count": result.dropped_count,
            "events_dropped": result.events_dropped,
        }

    index = {"episodes": manifest, "failures": failures}
    (out_dir / "index.json").write_text(
        json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"labeled {len(manifest)} episode(s), {len(failures)} failure(s)")
    return 1 if failures else 0


def _load_query_entries(queries_dir: Path, epsilon: float):
    entries = []
    for path in sorted(Path(queries_dir).glob("*.jsonl")):
        entries.append(entry_from_episode(parse_episode_log(path), epsilon=epsilon))
    if not entries:
        raise TrajSketchError(f"no query episodes (*.jsonl) found in {queries_dir}")
    return entries


def _write_plots(report, out_dir: Path, bin_width: float | None) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    skills = sorted(report.skill_histogram)
    match_skills = sorted({m for v in report.skill_histogram.values() for m in v})
    bottoms = [0.0] * len(skills)
    for match in match_skills:
        heights = [report.skill_histogram[s].get(match, 0) for s in skills]
        ax.bar(skills, heights, bottom=bottoms, label=match)
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    ax.set_xlabel("query skill")
    ax.set_ylabel("top-k match count")
    ax.set_title("Semantic relevance of retrieved trajectories")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_dir / "semantic_relevance.png", dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    if report.first_interaction_dz:
        ax.hist(report.first_interaction_dz, bins=_bins(report.first_interaction_dz, bin_width))
    ax.axvline(0.0, color="red", linestyle="--", label="exact alignment")
    ax.set_xlabel("first-interaction height difference (m)")
    ax.set_ylabel("pairs")
    ax.set_title("First-interaction height alignment")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_dir / "height_alignment.png", dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist(report.distance_values, bins=_bins(report.distance_values, bin_width))
    ax.axvline(
        report.distance_median,
        color="red",
        label=f"median {report.distance_median:.4f}",
    )
    ax.set_xlabel("mean top-k distance (m)")
    ax.set_ylabel("queries")
    ax.set_title("Distance distribution over queries")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_dir / "distance_distribution.png", dpi=120)
    plt.close(fig)


def _bins(values, bin_width: float | None):
    if bin_width is None:
        return 20
    lo, hi = min(values), max(values)
    if hi <= lo:
        return 1
    count = max(1, int((hi - lo) / bin_width) + 1)
    return [lo + i * bin_width for i in range(count + 1)]


def _cmd_analyze(args) -> int:
    cfg = load_workspace_config(args.config)
    snapshot = load_dataset(_resolve_dataset(args.dataset, cfg), epsilon=cfg.epsilon)
    queries = _load_query_entries(Path(args.queries), cfg.epsilon)
    k = args.k
    if k > len(snapshot.entries):
        print(
            f"analyze: k={k} exceeds dataset size {len(snapshot.entries)}; using full dataset",
            file=sys.stderr,
        )
        k = len(snapshot.entries)

    report = compute_analytics(queries, snapshot.entries, k=k)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    (out_dir / "report.json").write_text(
        json.dumps(
            {
                "k": k,
                "query_count": len(queries),
                "skill_histogram": report.skill_histogram,
                "first_interaction_dz": list(report.first_interaction_dz),
                "alignment_skipped": report.alignment_skipped,
                "distance_values": list(report.distance_values),
                "distance_median": report.distance_median,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )

    with (out_dir / "semantic_relevance.csv").open("w", encoding="utf-8") as fh:
        fh.write("query_skill,match_skill,count\n")
        for skill in sorted(report.skill_histogram):
            for match in sorted(report.skill_histogram[skill]):
                fh.write(f"{skill},{match},{report.skill_histogram[skill][match]}\n")
    with (out_dir / "height_alignment.csv").open("w", encoding="utf-8") as fh:
        fh.write("dz_meters\n")
        for dz in report.first_interaction_dz:
            fh.write(f"{dz!r}\n")
    with (out_dir / "distances.csv").open("w", encoding="utf-8") as fh:
        fh.write("episode_id,mean_topk_distance\n")
        for entry, value in zip(queries, report.distance_values):
            fh.write(f"{entry.episode_id},{value!r}\n")

    _write_plots(report, out_dir, args.bin_width)
    print(
        f"analyzed {len(queries)} queries against {len(snapshot.entries)} episodes; "
        f"median distance {report.distance_median:.6g}"
    )
    return 0


def _cmd_query(args) -> int:
    cfg = load_workspace_config(args.config)
    snapshot = load_dataset(_resolve_dataset(args.dataset, cfg), epsilon=cfg.epsilon)
    if args.episode:
        ep = snapshot.episodes.get(args.episode)
        if ep is None:
            raise TrajSketchError(f"unknown episode {args.episode!r}")
        query = ep.positions()
    else:
        query = parse_waypoint_plan(Path(args.plan)).positions()
    results = top_k_similar(query, snapshot.entries, k=args.k, resample_n=args.resample)
    print(
        json.dumps(
            {
                "results": [
                    {"episode_id": r.episode_id, "skill": r.skill, "distance": r.distance}
                    for r in results
                ]
            },
            indent=2,
        )
    )
    return 0


def _cmd_simulate(args) -> int:
    plan = parse_waypoint_plan(Path(args.plan))
    sim_cfg = SimConfig(max_speed=args.speed, dt=args.dt, mode=SimMode(args.mode))
    episode = execute(plan, sim_cfg, episode_id=args.episode_id)
    error = roundtrip_error(plan, episode)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(serialize_episode_log(episode), encoding="utf-8")
    print(json.dumps({"samples": len(episode.steps), "roundtrip_error": error}))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = load_workspace_config(args.config)
    dataset_path = Path(args.dataset) if args.dataset else cfg.dataset_path
    snapshot = load_dataset(dataset_path, epsilon=cfg.epsilon) if dataset_path else None
    app = create_app(cfg, snapshot)
    uvicorn.run(app, host=args.host, port=resolve_port(args.port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trajsketch",
        description="Trajectory-sketch labeling, retrieval, and rollout tooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("label", help="render hindsight sketches for a dataset")
    p.add_argument("--dataset", help="dataset directory")
    p.add_argument("--out", required=True, help="output directory for PNGs and index.json")
    p.add_argument("--config", help="workspace config file")
    p.set_defaults(func=_cmd_label)

    p = sub.add_parser("analyze", help="retrieval analytics over a query set")
    p.add_argument("--queries", required=True, help="directory of query episode logs")
    p.add_argument("--dataset", help="dataset directory")
    p.add_argument("--out", required=True, help="output directory for report, CSVs, plots")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--bin-width", type=float, default=None, help="histogram bin width")
    p.add_argument("--config", help="workspace config file")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("query", help="top-k most similar dataset trajectories")
    p.add_argument("--dataset", help="dataset directory")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--episode", help="query by dataset episode id")
    group.add_argument("--plan", help="query by waypoint plan file")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--resample", type=int, default=None, help="arc-length resample length")
    p.add_argument("--config", help="workspace config file")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("simulate", help="execute a waypoint plan kinematically")
    p.add_argument("--plan", required=True, help="waypoint plan file")
    p.add_argument("--out", required=True, help="output episode log path")
    p.add_argument("--mode", choices=[m.value for m in SimMode], default="task")
    p.add_argument("--speed", type=float, default=0.5)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--episode-id", default="rollout")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--dataset", help="dataset directory")
    p.add_argument("--config", help="workspace config file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrajSketchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
