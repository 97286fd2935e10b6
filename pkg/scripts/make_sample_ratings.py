"""Regenerate src/testscore/data/sample_ratings.csv.

Synthetic single-task rating log: each coder solves some number of tasks
receives an integer rating in [0, 100]. Skill varies per coder so the
empirical distributions differ; a slice of coders has fewer than 10 rated
solutions and gets dropped at ingest time.
"""

import csv
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "testscore" / "data" / "sample_ratings.csv"

rng = np.random.Generator(np.random.Philox(key=[20240915, 0]))

rows = []
n_coders = 160
for c in range(n_coders):
    coder = f"coder{c:03d}"
    # ~1 in 5 coders lacks the 10-solution minimum
    if rng.random() < 0.2:
        n_solved = int(rng.integers(2, 10))
    else:
        n_solved = int(rng.integers(10, 41))
    skill = rng.normal(87.5, 6.0)
    for t in range(n_solved):
        task = f"task{c:03d}_{t:02d}"
        rating = float(np.clip(np.round(rng.normal(skill, 5.0)), 0.0, 100.0))
        rows.append((coder, task, int(rating)))

with open(OUT, "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["coder_id", "task_id", "rating"])
    w.writerows(rows)

kept = {}
for coder, _, rating in rows:
    kept.setdefault(coder, []).append(rating)
q = [c for c, rs in kept.items() if len(rs) >= 10]
all_ratings = [r for rs in kept.values() for r in rs]
print(f"{len(rows)} rows, {len(kept)} coders, {len(q)} with >=10 solutions")
print(f"rating mean {np.mean(all_ratings):.2f}, min {min(all_ratings)}, max {max(all_ratings)}")
