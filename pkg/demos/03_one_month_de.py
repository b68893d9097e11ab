"""Optimize one month of a synthetic instance and compare with random search."""

import numpy as np

from stockblend.baseline import random_search_baseline
from stockblend.de import DEConfig, solve_one_month
from stockblend.fitness import is_feasible
from stockblend.instances import generate_instance, shape_label

inst = generate_instance(months=1, parcels=2, stockpiles=(6, 7), seed=1)
print(shape_label(inst), "targets:", inst.target_concentrate[0].round(2))
print("bounds:", inst.bounds)

cfg = DEConfig(pop_size=10, scale=1.2, crossover=0.5, max_evals=5000, seed=1)
result = solve_one_month(inst, cfg)
best = result.best
print("feasible:", is_feasible(best.fitness, inst))
print("copper:", round(best.fitness.copper, 4))
for p, x in enumerate(best.decoded.fractions[0]):
    print(f"parcel {p}: {best.decoded.durations[0][p]:7.2f} h, fractions {x.round(3)}")

# Best-so-far copper over generations.
curve = np.array([fv.copper for fv in result.history])
print(curve[[0, 10, 100, len(curve) - 1]].round(3))

# Random search with the same budget.
baseline = random_search_baseline(inst, 5000, seed=1)
print("random search copper:", round(baseline.fitness.copper, 4))
