"""Plan several months at once, carrying an archive of feasible partial plans."""

from stockblend.de import DEConfig
from stockblend.fitness import evaluate
from stockblend.instances import generate_instance, solution_to_dict
from stockblend.longterm import solve_long_term

inst = generate_instance(months=3, parcels=2, stockpiles=(4, 5), seed=2)
result = solve_long_term(inst, DEConfig(max_evals=3000, seed=1))
report = result.report
print("feasible:", report.feasible, "copper:", round(report.copper, 3))
print("archive size per month:", report.archive_sizes)
print("months without a feasible extension:", report.flagged_months)
print("largest Cu grade spread:", round(report.cu_spread, 5), "limit", report.cu_spread_limit)

# The stored copper is reproduced exactly by re-simulating the plan.
fv, _, states = evaluate(result.solution, inst)
print(fv.copper == report.copper)

# Inventory at the end of each month.
for m, s in enumerate(states[1:], start=1):
    print(m, s.tonnage.round(0))

# The plan as it would be written to disk.
doc = solution_to_dict(result.solution, inst)
print(doc["months"][0]["parcels"][0])
