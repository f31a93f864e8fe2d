"""
Trajectory retrieval by Fréchet distance
========================================

Build a synthetic library of end-effector trajectories in three skill
families, then retrieve the nearest neighbors of a new query motion and
check that they come from the right family.
"""

import numpy as np

from trajsketch import TrajectoryEntry, semantic_relevance, top_k_similar

rng = np.random.default_rng(12)

# Each skill family is a noisy variation on a template motion.
def arc(height):
    t = np.linspace(0.0, 1.0, 20)
    return np.stack([t * 0.4 - 0.2, np.zeros_like(t), 0.2 + height * np.sin(np.pi * t)], axis=1)

def sweep():
    t = np.linspace(0.0, 1.0, 20)
    return np.stack([0.3 * np.cos(2 * np.pi * t), 0.3 * np.sin(2 * np.pi * t), np.full_like(t, 0.3)], axis=1)

def poke():
    t = np.linspace(0.0, 1.0, 20)
    return np.stack([np.full_like(t, 0.1), t * 0.0, 0.6 - 0.4 * t], axis=1)

templates = {"pick": lambda: arc(0.35), "wipe": sweep, "press": poke}

library = []
for skill, make in templates.items():
    for i in range(12):
        noisy = make() + rng.normal(scale=0.015, size=(20, 3))
        library.append(TrajectoryEntry(f"{skill}-{i:02d}", skill, noisy))
print(f"library of {len(library)} trajectories across {len(templates)} skills")

# Query: a fresh pick-like arc the library has never seen.
query = arc(0.32) + rng.normal(scale=0.015, size=(20, 3))
results = top_k_similar(query, library, k=5)
print("top-5 neighbors of the query:")
for r in results:
    print(f"  {r.episode_id:10s} {r.skill:6s} distance {r.distance:.4f}")

# Aggregate view: for every library trajectory used as a query, how often
# do its top-5 matches share its skill?
histogram = semantic_relevance(library, library, k=5)
for skill in sorted(histogram):
    matches = histogram[skill]
    own = matches.get(skill, 0)
    total = sum(matches.values())
    print(f"  {skill:6s}: {own}/{total} of top-5 mass is same-skill")
