"""
Retrieval analytics over a trajectory dataset
=============================================

Build a clustered synthetic dataset, run the full analytics pass, and plot
the three standard figures: semantic relevance of retrieved neighbors,
first-interaction height alignment, and the distance distribution.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from trajsketch import TrajectoryEntry, compute_analytics

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(3)

# Three well-separated skill clusters; each entry also carries the EE
# height at its first gripper event so alignment can be scored.
centers = {"pick": (0.0, 0.0, 0.5), "stack": (2.0, 0.0, 0.5), "wipe": (0.0, 2.0, 0.3)}
dataset = []
for skill, center in centers.items():
    for i in range(14):
        n = int(rng.integers(8, 16))
        walk = np.cumsum(rng.normal(scale=0.02, size=(n, 3)), axis=0) + center
        grasp_z = float(walk[n // 2, 2])
        dataset.append(
            TrajectoryEntry(f"{skill}-{i:02d}", skill, walk, first_interaction_z=grasp_z)
        )
print(f"dataset of {len(dataset)} entries")

# Queries are drawn from the dataset itself, so every query's best match
# is itself at distance zero and the k=1 distances collapse to 0.
report = compute_analytics(dataset, dataset, k=8)
print(f"median mean-top-8 distance over queries: {report.distance_median:.4f}")
print(f"height alignment pairs: {len(report.first_interaction_dz)}, "
      f"skipped {report.alignment_skipped}")

fig, ax = plt.subplots(figsize=(7, 4))
skills = sorted(report.skill_histogram)
match_skills = sorted({m for v in report.skill_histogram.values() for m in v})
bottoms = [0.0] * len(skills)
for match in match_skills:
    heights = [report.skill_histogram[s].get(match, 0) for s in skills]
    ax.bar(skills, heights, bottom=bottoms, label=match)
    bottoms = [b + h for b, h in zip(bottoms, heights)]
ax.set_xlabel("query skill")
ax.set_ylabel("top-8 match count")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "semantic_relevance.png", dpi=120)
plt.close(fig)

fig, ax = plt.subplots(figsize=(7, 4))
ax.hist(report.first_interaction_dz, bins=24)
ax.axvline(0.0, color="red", linestyle="--")
ax.set_xlabel("first-interaction height difference (m)")
ax.set_ylabel("pairs")
fig.tight_layout()
fig.savefig(OUT / "height_alignment.png", dpi=120)
plt.close(fig)

fig, ax = plt.subplots(figsize=(7, 4))
ax.hist(report.distance_values, bins=24)
ax.axvline(report.distance_median, color="red", label=f"median {report.distance_median:.3f}")
ax.set_xlabel("mean top-8 distance (m)")
ax.set_ylabel("queries")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "distance_distribution.png", dpi=120)
plt.close(fig)

for name in ("semantic_relevance", "height_alignment", "distance_distribution"):
    print(f"wrote {OUT / (name + '.png')}")
