"""
A planar process that fails (H) although both coordinates satisfy it.

X_t = B_t (1, 1) + t (-1, 1): a Brownian motion along the diagonal with a
drift across it.  Each coordinate is a 1-D Brownian motion with drift and
so satisfies (H).  Along (1, -1) the process is uniform motion, and
decide_H reports the failure through condition (S).

Run from the repository root: ``python3 demos/diagonal_drift.py``.
"""
import math
from pathlib import Path

import numpy as np

from levyhunt import Hyperplane, SimPlan, decide_H, hitting_estimate, load_spec, project_triplet, simulate_paths

SPEC = Path(__file__).resolve().parent / "specs" / "drift_diagonal.json"

t = load_spec(SPEC).triplet
print("triplet: a =", t.a, " Q =", t.Q.tolist(), " physical drift =", t.physical_drift())

v = decide_H(t)
print("\nverdict:", v.status)
for e in v.trace:
    print(f"  {e.rule:<32s} {e.result.status:<8s} {e.result.notes}")

print("\ncoordinate projections:")
for k in range(2):
    p = project_triplet(t, np.eye(2)[:, [k]]).projected_triplet
    print(f"  axis {k + 1}: Q = {p.Q[0, 0]:g}, a = {p.a[0]:g} ->", decide_H(p).status)

r = 1 / math.sqrt(2)
anti = project_triplet(t, np.array([[r], [-r]])).projected_triplet
print(f"\nonto (1,-1)/sqrt2: Q = {anti.Q[0, 0]:g}, a = {anti.a[0]:.6f}, jumps = {len(anti.mu)} ->", decide_H(anti).status)

# every path sits on the line <x, (1,-1)> = -2t, so the hyperplane at -1 is hit at t = 1/2 exactly
ens = simulate_paths(t, SimPlan(paths=2000, step_count=50, seed=1))
proj = ens.X @ np.array([1.0, -1.0])
print("\nmax |<X_t,(1,-1)> + 2t| over all paths:", float(np.abs(proj + 2 * ens.grid).max()))
est = hitting_estimate(ens, Hyperplane((1.0, -1.0), -1.0))
print("P(hit {<x,(1,-1)> = -1} by t=1) =", est.probability)
print("  before t=1/2:", hitting_estimate(ens, Hyperplane((1.0, -1.0), -1.0), (0.0, 0.48)).probability)

print("\nsame from the command line:")
print("  levyhunt check -i demos/specs/drift_diagonal.json -o verdict.json")
print("  levyhunt project -i demos/specs/drift_diagonal.json --subspace 0.70710678118654757,-0.70710678118654757")
