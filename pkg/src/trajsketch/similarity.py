"""Discrete Fréchet distance, nearest-trajectory retrieval, and analytics.

A waypoint sequence is any non-empty (n, 3) array-like of base-frame EE
positions (lists of Vec3 work too); `as_waypoints` is the single validator.
Distances depend on positions only: orientation and gripper state never
enter the ground metric.

The DP kernel is the O(m*n) rolling-row formulation; `frechet_oracle` is an
independent memoized transcription of the recursive definition
F(a, b) = max(d(a0, b0), min(F(a[1:], b[1:]), F(a, b[1:]), F(a[1:], b)))
kept deliberately naive (and size-guarded) so the two routes stay separate.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np
from numba import njit, prange

from .errors import EmptySequence, InvalidRange, TooLarge
from .geometry import EpisodeTrajectory
from .interaction import DEFAULT_EPSILON, InteractionConfig, detect_key_steps

DEFAULT_K = 10
DEFAULT_RESAMPLE_N = 64

# m*n above this refuses the recursive oracle (test-scale guard).
ORACLE_CAP = 400


def as_waypoints(points) -> np.ndarray:
    """Validate a waypoint sequence into a contiguous (n, 3) float64 array."""
    if isinstance(points, np.ndarray):
        arr = points
    else:
        rows = [p.as_array() if hasattr(p, "as_array") else p for p in points]
        arr = np.array(rows, dtype=np.float64) if rows else np.empty((0, 3))
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidRange(f"waypoints must be (n, 3), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise EmptySequence("waypoint sequence is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidRange("waypoints must be finite")
    return arr


@njit(cache=True)
def _dp_kernel(a, b):  # pragma: no cover - exercised via frechet_dp
    m = a.shape[0]
    n = b.shape[0]
    prev = np.empty(n, dtype=np.float64)
    cur = np.empty(n, dtype=np.float64)
    for j in range(n):
        dx = a[0, 0] - b[j, 0]
        dy = a[0, 1] - b[j, 1]
        dz = a[0, 2] - b[j, 2]
        d = np.sqrt(dx * dx + dy * dy + dz * dz)
        prev[j] = d if j == 0 else max(prev[j - 1], d)
    for i in range(1, m):
        for j in range(n):
            dx = a[i, 0] - b[j, 0]
            dy = a[i, 1] - b[j, 1]
            dz = a[i, 2] - b[j, 2]
            d = np.sqrt(dx * dx + dy * dy + dz * dz)
            if j == 0:
                cur[0] = max(prev[0], d)
            else:
                best = prev[j]
                if prev[j - 1] < best:
                    best = prev[j - 1]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                cur[j] = max(best, d)
        prev, cur = cur, prev
    return prev[n - 1]


@njit(cache=True, parallel=True)
def _batch_kernel(query, flat, offsets, out):  # pragma: no cover
    for c in prange(offsets.shape[0] - 1):
        out[c] = _dp_kernel(query, flat[offsets[c] : offsets[c + 1]])


def frechet_dp(a, b) -> float:
    """Exact discrete Fréchet distance between two waypoint sequences."""
    return float(_dp_kernel(as_waypoints(a), as_waypoints(b)))


def frechet_oracle(a, b) -> float:
    """Reference value straight from the recursive definition (test oracle).

    Raises TooLarge when m*n exceeds ORACLE_CAP.
    """
    pa = as_waypoints(a)
    pb = as_waypoints(b)
    m, n = pa.shape[0], pb.shape[0]
    if m * n > ORACLE_CAP:
        raise TooLarge(f"oracle guard: {m}x{n} > {ORACLE_CAP}")

    memo: dict[tuple[int, int], float] = {}

    def rec(i: int, j: int) -> float:
        key = (i, j)
        if key in memo:
            return memo[key]
        # Same scalar radicand ordering as the DP kernel; IEEE sqrt is
        # correctly rounded, so the two routes agree bit for bit.
        dx = pa[i, 0] - pb[j, 0]
        dy = pa[i, 1] - pb[j, 1]
        dz = pa[i, 2] - pb[j, 2]
        d = math.sqrt(dx * dx + dy * dy + dz * dz)
        if i == m - 1 and j == n - 1:
            val = d
        elif i == m - 1:
            val = max(d, rec(i, j + 1))
        elif j == n - 1:
            val = max(d, rec(i + 1, j))
        else:
            val = max(d, min(rec(i + 1, j + 1), rec(i, j + 1), rec(i + 1, j)))
        memo[key] = val
        return val

    return rec(0, 0)


def resample_arclength(points, n: int) -> np.ndarray:
    """Resample a polyline to n points spaced uniformly in arc length."""
    arr = as_waypoints(points)
    if n < 1:
        raise InvalidRange("resample target must be at least 1")
    if arr.shape[0] == 1:
        return np.repeat(arr, n, axis=0)
    seg = np.linalg.norm(np.diff(arr, axis=0), axis=1)
    s = np.concatenate(([0.0], np.cumsum(seg)))
    if s[-1] == 0.0:
        return np.repeat(arr[:1], n, axis=0)
    targets = np.linspace(0.0, s[-1], n)
    out = np.empty((n, 3), dtype=np.float64)
    for c in range(3):
        out[:, c] = np.interp(targets, s, arr[:, c])
    return out


@dataclass(eq=False)
class TrajectoryEntry:
    """One dataset trajectory prepared for retrieval.

    first_interaction_z is the base-frame EE height at the first gripper
    key step, or None when the episode has no interaction events.
    """

    episode_id: str
    skill: str
    waypoints: np.ndarray
    first_interaction_z: float | None = None

    def __post_init__(self):
        self.waypoints = as_waypoints(self.waypoints)


@dataclass(frozen=True)
class SimilarityResult:
    episode_id: str
    skill: str
    distance: float

    def __post_init__(self):
        if self.distance < 0:
            raise InvalidRange("distance must be non-negative")


@dataclass(frozen=True)
class AnalyticsReport:
    """Aggregate retrieval analytics over a query set."""

    skill_histogram: dict[str, dict[str, int]]
    first_interaction_dz: tuple[float, ...]
    distance_values: tuple[float, ...]
    distance_median: float
    alignment_skipped: int = 0


def entry_from_episode(ep: EpisodeTrajectory, epsilon: float = DEFAULT_EPSILON) -> TrajectoryEntry:
    """Build a retrieval entry from an episode, detecting its first interaction."""
    first_z = None
    if len(ep.steps) >= 2:
        events = detect_key_steps(ep, InteractionConfig(epsilon=epsilon))
        if events:
            first_z = ep.steps[events[0].step].position.z
    return TrajectoryEntry(
        episode_id=ep.episode_id,
        skill=ep.skill,
        waypoints=ep.positions(),
        first_interaction_z=first_z,
    )


def _as_entry(item) -> TrajectoryEntry:
    if isinstance(item, TrajectoryEntry):
        return item
    if isinstance(item, EpisodeTrajectory):
        return entry_from_episode(item)
    if isinstance(item, (tuple, list)):
        episode_id, skill, points = item[0], item[1], item[2]
        first_z = item[3] if len(item) > 3 else None
        return TrajectoryEntry(str(episode_id), str(skill), as_waypoints(points), first_z)
    raise TypeError(f"cannot interpret {type(item).__name__} as a trajectory entry")


def top_k_similar(query, dataset, k: int = DEFAULT_K, resample_n: int | None = None) -> list[SimilarityResult]:
    """Rank dataset trajectories by Fréchet distance to the query.

    Results are sorted ascending by distance with ties broken by episode_id,
    so the ranking is independent of dataset order. k larger than the
    dataset returns everything. When resample_n is set, the query and every
    candidate are arc-length-resampled to that many points first; the
    default leaves sequences untouched.
    """
    if k < 1:
        raise InvalidRange("k must be at least 1")
    entries = [_as_entry(e) for e in dataset]
    if not entries:
        raise EmptySequence("dataset is empty")
    q = as_waypoints(query)
    if resample_n is not None:
        q = resample_arclength(q, resample_n)
        cands = [resample_arclength(e.waypoints, resample_n) for e in entries]
    else:
        cands = [e.waypoints for e in entries]

    counts = np.array([c.shape[0] for c in cands], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    flat = np.concatenate(cands, axis=0)
    out = np.empty(len(cands), dtype=np.float64)
    _batch_kernel(q, flat, offsets, out)

    order = sorted(range(len(entries)), key=lambda i: (out[i], entries[i].episode_id))
    return [
        SimilarityResult(entries[i].episode_id, entries[i].skill, float(out[i]))
        for i in order[:k]
    ]


def semantic_relevance(queries, dataset, k: int = DEFAULT_K) -> dict[str, dict[str, int]]:
    """Tally the skill labels of each query's top-k matches, per query skill."""
    hist: dict[str, dict[str, int]] = {}
    for item in queries:
        qe = _as_entry(item)
        bucket = hist.setdefault(qe.skill, {})
        for res in top_k_similar(qe.waypoints, dataset, k=k):
            bucket[res.skill] = bucket.get(res.skill, 0) + 1
    return hist


def first_interaction_height_alignment(queries, dataset, k: int = DEFAULT_K) -> tuple[list[float], int]:
    """Signed dz between each match's and its query's first interaction height.

    dz = z(first event of match) - z(first event of query), over every
    (query, match) pair in the top-k. Queries and matches without any
    interaction event are skipped; the second return value counts the skips.
    A query matched against itself contributes exactly 0.0.
    """
    entries = [_as_entry(e) for e in dataset]
    by_id = {e.episode_id: e for e in entries}
    dzs: list[float] = []
    skipped = 0
    for item in queries:
        qe = _as_entry(item)
        if qe.first_interaction_z is None:
            skipped += 1
            continue
        for res in top_k_similar(qe.waypoints, entries, k=k):
            match = by_id[res.episode_id]
            if match.first_interaction_z is None:
                skipped += 1
                continue
            dzs.append(match.first_interaction_z - qe.first_interaction_z)
    return dzs, skipped


def distance_distribution(queries, dataset, k: int = DEFAULT_K) -> tuple[list[float], float]:
    """Per-query mean top-k distance plus the median over all queries."""
    values: list[float] = []
    for item in queries:
        qe = _as_entry(item)
        res = top_k_similar(qe.waypoints, dataset, k=k)
        values.append(float(np.mean([r.distance for r in res])))
    if not values:
        raise EmptySequence("no queries given")
    return values, float(np.median(values))


def compute_analytics(queries, dataset, k: int = DEFAULT_K) -> AnalyticsReport:
    """Run all three retrieval analytics over one query set."""
    query_entries = [_as_entry(q) for q in queries]
    dataset_entries = [_as_entry(e) for e in dataset]
    hist = semantic_relevance(query_entries, dataset_entries, k=k)
    dzs, skipped = first_interaction_height_alignment(query_entries, dataset_entries, k=k)
    values, median = distance_distribution(query_entries, dataset_entries, k=k)
    return AnalyticsReport(
        skill_histogram=hist,
        first_interaction_dz=tuple(dzs),
        distance_values=tuple(values),
        distance_median=median,
        alignment_skipped=skipped,
    )


def warm_kernels() -> None:
    """Force numba compilation of the distance kernels (startup helper)."""
    pts = np.zeros((2, 3), dtype=np.float64)
    _dp_kernel(pts, pts)
    _batch_kernel(pts, pts, np.array([0, 2], dtype=np.int64), np.empty(1, dtype=np.float64))
