"""
Energies and hitting probabilities for Brownian motion and uniform motion.

For a unit mass at the origin the lambda-energy of 1-D Brownian motion is
pi sqrt(2/lambda), which goes to zero; for uniform motion it is pi at every
lambda.  The first case is the (H) behaviour, the second is not.  The Monte
Carlo part compares a simulated first-passage probability with the
reflection-principle value 2 P(N > 0.5).

Run from the repository root: ``python3 demos/brownian_energy_hitting.py``.
"""
import math

from scipy import stats

from levyhunt import Atoms, Hyperplane, LevyTriplet, PointTube, SimPlan, energy_limit, hitting_estimate, one_energy, simulate_paths

unit = Atoms([[0.0]], [1.0])
bm = LevyTriplet.brownian(1)
drift = LevyTriplet([-1.0])

print("lambda-energy of a unit atom")
for name, t in (("Brownian", bm), ("uniform motion", drift)):
    rep = energy_limit(t, unit)
    print(f"\n  {name}: 1-energy {rep.one_energy:.10f}, trend {rep.trend} (slope {rep.slope:.3f})")
    for lam, e in zip(rep.lambda_ladder, rep.values):
        ref = math.pi * math.sqrt(2 / lam) if t is bm else math.pi
        print(f"    lambda={lam:8g}  E={e:.12f}  closed form {ref:.12f}")

print("\n2-D Brownian motion: 1-energy of a point mass =", one_energy(LevyTriplet.brownian(2), Atoms([[0.0, 0.0]], [1.0])))

ens = simulate_paths(bm, SimPlan(paths=100_000, step_count=100, seed=0))
est = hitting_estimate(ens, Hyperplane((1.0,), 0.5))
print(f"\nBrownian level 0.5 by t=1: {est.probability:.4f} +- {est.ci95:.4f}  (exact {2 * stats.norm.sf(0.5):.4f})")
print("  hit-time histogram:", est.hit_time_counts)

plane = simulate_paths(LevyTriplet.brownian(2), SimPlan(paths=20_000, step_count=200, seed=0))
for eps in (0.1, 0.01, 0.001):
    p = hitting_estimate(plane, PointTube((1.0, 0.0), eps))
    print(f"2-D Brownian, tube of radius {eps:g} around (1,0): {p.probability:.4f}  caveat={p.discretization_caveat}")
