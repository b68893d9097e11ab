"""Run reports and summary statistics over repeated runs."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from .fitness import FitnessVector, evaluate, is_feasible
from .model import Instance, Solution, max_cu_grade_spread


@dataclass
class RunReport:
    """Outcome of one solver run, re-derived from the returned plan."""

    copper: float
    fitness: FitnessVector
    feasible: bool
    cu_spread: float
    cu_spread_limit: float
    evaluations: int
    parcels: list = field(default_factory=list)
    archive_sizes: list = field(default_factory=list)
    flagged_months: list = field(default_factory=list)
    wall_time_s: float | None = None

    @property
    def cu_spread_ok(self) -> bool:
        return self.cu_spread <= self.cu_spread_limit

    def to_dict(self) -> dict:
        return {
            "copper": self.copper,
            "feasible": self.feasible,
            "fitness": self.fitness.to_dict(),
            "cu_spread": self.cu_spread,
            "cu_spread_limit": self.cu_spread_limit,
            "cu_spread_ok": self.cu_spread_ok,
            "evaluations": self.evaluations,
            "archive_sizes": list(self.archive_sizes),
            "flagged_months": list(self.flagged_months),
            "parcels": self.parcels,
            "wall_time_s": self.wall_time_s,
        }


def build_report(
    instance: Instance, solution: Solution, evaluations: int, **extra
) -> RunReport:
    fv, outcomes, _ = evaluate(solution, instance)
    parcels = [
        {
            "month": m + 1,
            "parcel": p,
            "duration": float(solution.durations[m][p]),
            "volume": o.volume,
            "concentrate": o.concentrate,
            "target_concentrate": float(instance.target_concentrate[m][p]),
            "copper": o.copper,
            "cu_grade": o.cu_grade,
            "cu_recovery": o.cu_recovery,
            "f_recovery": o.f_recovery,
            "u_recovery": o.u_recovery,
        }
        for m, month in enumerate(outcomes)
        for p, o in enumerate(month)
    ]
    return RunReport(
        copper=fv.copper,
        fitness=fv,
        feasible=is_feasible(fv) and fv.parcels == instance.total_parcels,
        cu_spread=max_cu_grade_spread(outcomes),
        cu_spread_limit=instance.bounds.cu_spread,
        evaluations=evaluations,
        parcels=parcels,
        **extra,
    )


@dataclass(frozen=True)
class Summary:
    """Max/Min/Mean/Std of a sample; ``std`` uses the n-1 denominator (0 for one value)."""

    max: float
    min: float
    mean: float
    std: float
    n: int


def summarize(values) -> Summary:
    values = [float(v) for v in values]
    if not values:
        raise ValueError("summarize needs at least one value")
    if not all(math.isfinite(v) for v in values):
        raise ValueError("summarize needs finite values")
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return Summary(max(values), min(values), statistics.mean(values), std, len(values))
