"""Walk through the plant surrogate: how feed grades turn into concentrate and copper."""

import numpy as np

from stockblend import Material, ProcessParams
from stockblend.process import (
    concentrate_f3,
    concentrate_grade,
    copper_tonnes_f1,
    cu_recovery,
    f_recovery_f4,
    parcel_volume_f2,
    throughput,
)

params = ProcessParams()
print(params)

# A blend at 2% Cu, 15% Fe and a trace of fluorine.
g = np.zeros(len(Material))
g[Material.Cu] = 0.02
g[Material.Fe] = 0.15
g[Material.F] = 0.004

# Feed rate grows with Cu and Fe content.
print("throughput t/h:", throughput(g, params))

# Everything downstream is linear in the processing time.
for hours in (0.0, 50.0, 100.0):
    w = parcel_volume_f2(hours, g, params)
    k = concentrate_f3(hours, g, params)
    c = copper_tonnes_f1(hours, g, 1, params)
    print(f"{hours:6.1f} h  feed {w:9.1f} t  concentrate {k:8.2f} t  copper {c:7.2f} t")

# Recoveries and the copper share of the concentrate.
print("Cu recovery:", cu_recovery(g[Material.Cu], params))
print("F recovery:", f_recovery_f4(g[Material.F], params))
print("concentrate Cu fraction:", concentrate_grade(g[Material.Cu], params))

# Copper produced later is worth less: one discount step per month.
print([round(copper_tonnes_f1(100.0, g, m, params), 3) for m in (1, 2, 3)])

# Sweep the Cu grade and watch concentrate per hour respond.
grades = np.linspace(0.01, 0.04, 7)
rates = []
for cu in grades:
    g[Material.Cu] = cu
    rates.append(concentrate_f3(1.0, g, params))
print(np.column_stack([grades, rates]).round(4))
