"""The two repair steps every candidate plan goes through."""

import numpy as np

from stockblend import Material, ProcessParams
from stockblend.process import concentrate_f3
from stockblend.repair import band_bisection, normalize_fractions, repair_duration_for_grades

# DE arithmetic produces arbitrary weight vectors; repair turns them into blends.
raw = np.array([0.7, -0.2, 1.1, 0.0])
x = normalize_fractions(raw)
print(x, x.sum())

# Zero (or all negative) weights fall back to an even split.
print(normalize_fractions(np.zeros(3)))

# Already normalized vectors come back unchanged, so the step is idempotent.
print(np.array_equal(normalize_fractions(x), x))

# Duration repair: concentrate grows linearly with time, so bisection on the
# duration finds a time whose concentrate lands within one tonne of the target.
t, evals = band_bisection(lambda d: 6.4 * d, 320.0, 720.0)
print(f"t = {t:.4f} h, k = {6.4 * t:.3f} t, {evals} evaluations")

# With the real process model.
params = ProcessParams()
g = np.zeros(len(Material))
g[Material.Cu] = 0.025
g[Material.Fe] = 0.1
for target in (500.0, 2500.0, 1e6):
    t = repair_duration_for_grades(g, target, 720.0, params)
    print(f"target {target:>9.0f} t -> {t:8.3f} h, concentrate {concentrate_f3(t, g, params):10.2f} t")
# The last target is out of reach, so the whole month is used.
