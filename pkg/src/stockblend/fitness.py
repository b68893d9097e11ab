"""Lexicographic fitness: plan simulation, feasibility and candidate comparison.

A plan is scored by six violation measures, compared in a fixed priority
order, followed by the total copper. The bi-objective mode adds the share of
each month's richest stockpile in the blend, which is minimized alongside the
copper maximization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (
    ContractError,
    Instance,
    Material,
    ParcelOutcome,
    Solution,
    StockpileState,
    update_stockpile_month_start,
)
from .process import (
    concentrate_grade,
    cu_recovery,
    f_recovery_f4,
    throughput,
    u_recovery_f5,
)

CU, F, U = int(Material.Cu), int(Material.F), int(Material.U)

#: Absolute tolerance below which a violation measure counts as zero.
FEASIBILITY_TOL = 1e-9
#: Default relative tolerance of the bi-objective dominance test.
BI_EPSILON = 1e-6


@dataclass(frozen=True)
class FitnessVector:
    """Score of a (partial) plan.

    Attributes
    ----------
    concentrate_miss : float
        Sum over parcels of ``max(|K - k|, 1)``; equals ``parcels`` when every
        parcel is within one tonne of its target.
    duration_overrun : float
        Hours scheduled beyond each month's available duration.
    negative_inventory : float
        Sum of negative stockpile tonnages after each parcel (<= 0).
    u_recovery_excess, f_recovery_excess : float
        Recovery above the U and F bounds, summed over parcels.
    cu_grade_shortfall : float
        Cu grade below the lower bound, summed over parcels.
    copper : float
        Discounted copper tonnes.
    high_grade_usage : float
        Sum of the fractions drawn from each month's highest-Cu stockpile.
    parcels : int
        Number of parcels scored.
    """

    concentrate_miss: float
    duration_overrun: float
    negative_inventory: float
    u_recovery_excess: float
    f_recovery_excess: float
    cu_grade_shortfall: float
    copper: float
    high_grade_usage: float
    parcels: int
    _violations: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        raw = (
            self.concentrate_miss - self.parcels,
            self.duration_overrun,
            -self.negative_inventory,
            self.u_recovery_excess,
            self.f_recovery_excess,
            self.cu_grade_shortfall,
        )
        object.__setattr__(
            self, "_violations", tuple(0.0 if v <= FEASIBILITY_TOL else v for v in raw)
        )

    def violations(self) -> tuple:
        """Violation measures in priority order, smaller is better, zero when satisfied."""
        return self._violations

    def __add__(self, other: "FitnessVector") -> "FitnessVector":
        return FitnessVector(
            self.concentrate_miss + other.concentrate_miss,
            self.duration_overrun + other.duration_overrun,
            self.negative_inventory + other.negative_inventory,
            self.u_recovery_excess + other.u_recovery_excess,
            self.f_recovery_excess + other.f_recovery_excess,
            self.cu_grade_shortfall + other.cu_grade_shortfall,
            self.copper + other.copper,
            self.high_grade_usage + other.high_grade_usage,
            self.parcels + other.parcels,
        )

    def to_dict(self) -> dict:
        return {
            "concentrate_miss": self.concentrate_miss,
            "duration_overrun": self.duration_overrun,
            "negative_inventory": self.negative_inventory,
            "u_recovery_excess": self.u_recovery_excess,
            "f_recovery_excess": self.f_recovery_excess,
            "cu_grade_shortfall": self.cu_grade_shortfall,
            "copper": self.copper,
            "high_grade_usage": self.high_grade_usage,
            "parcels": self.parcels,
        }


ZERO_FITNESS = FitnessVector(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0)


def month_start_state(instance: Instance, month: int, carried: StockpileState) -> StockpileState:
    """Stockpiles after the haul of ``month`` (0-based) lands on ``carried``."""
    return update_stockpile_month_start(
        carried, instance.haul_tonnage[month], instance.haul_grades[month]
    )


def richest_stockpile(state: StockpileState) -> int:
    """Index of the highest-Cu stockpile; ties go to the lowest index."""
    return int(np.argmax(state.grades[:, CU]))


def evaluate_month(
    instance: Instance,
    month: int,
    carried: StockpileState,
    fractions,
    durations,
) -> tuple[FitnessVector, list[ParcelOutcome], StockpileState]:
    """Simulate one month (0-based index) from the inventory carried into it.

    Returns the month's fitness, the parcel outcomes and the end-of-month state.
    """
    start = month_start_state(instance, month, carried)
    return simulate_month(instance, month, start, fractions, durations)


class MonthContext:
    """Per-month quantities that do not depend on the blending decisions."""

    def __init__(self, instance: Instance, month: int, start: StockpileState):
        self.start = start
        self.access = instance.access[month]
        self.index = [np.array(a, dtype=np.intp) for a in self.access]
        self.grades = [start.grades[i] for i in self.index]
        self.s_star = richest_stockpile(start)
        self.star_pos = [a.index(self.s_star) if self.s_star in a else -1 for a in self.access]
        self.targets = instance.target_concentrate[month].tolist()
        self.available = float(instance.available_duration[month])
        self.discount = instance.process.discount**month


def simulate_month(
    instance: Instance,
    month: int,
    start: StockpileState,
    fractions,
    durations,
    context: MonthContext | None = None,
) -> tuple[FitnessVector, list[ParcelOutcome], StockpileState]:
    """Like :func:`evaluate_month`, from the inventory after the month's haul.

    ``context`` may carry a precomputed :class:`MonthContext` for ``start``.
    """
    ctx = MonthContext(instance, month, start) if context is None else context
    params = instance.process
    bounds = instance.bounds
    n_parcels = len(ctx.access)
    if len(fractions) != n_parcels or len(durations) != n_parcels:
        raise ContractError(
            f"month {month + 1}: expected {n_parcels} parcels, "
            f"got {len(fractions)} fraction blocks and {len(durations)} durations"
        )
    tonnage = start.tonnage.copy()

    miss = neg = u_exc = f_exc = cu_short = copper = usage = 0.0
    total_time = 0.0
    outcomes = []
    for p in range(n_parcels):
        x = np.asarray(fractions[p], dtype=float)
        t = float(durations[p])
        g = x @ ctx.grades[p]
        gl = g.tolist()
        g_cu = gl[CU]
        w = t * throughput(gl, params)
        r_cu = cu_recovery(g_cu, params)
        cu_mass = w * g_cu * r_cu
        k = cu_mass / concentrate_grade(g_cu, params)
        r_f = f_recovery_f4(gl[F], params)
        r_u = u_recovery_f5(gl[U], params)
        c = ctx.discount * cu_mass
        tonnage[ctx.index[p]] -= x * w
        outcomes.append(ParcelOutcome(g, w, k, c, r_cu, r_f, r_u))

        miss += max(abs(ctx.targets[p] - k), 1.0)
        if tonnage.min() < 0.0:
            neg += float(np.minimum(tonnage, 0.0).sum())
        u_exc += max(r_u - bounds.u_recovery, 0.0)
        f_exc += max(r_f - bounds.f_recovery, 0.0)
        cu_short += max(bounds.cu_grade - g_cu, 0.0)
        copper += c
        total_time += t
        if ctx.star_pos[p] >= 0:
            usage += float(x[ctx.star_pos[p]])

    overrun = max(total_time - ctx.available, 0.0)
    fv = FitnessVector(miss, overrun, neg, u_exc, f_exc, cu_short, copper, usage, n_parcels)
    return fv, outcomes, StockpileState(tonnage, start.grades)


def evaluate(
    solution: Solution, instance: Instance, initial: StockpileState | None = None
) -> tuple[FitnessVector, list[list[ParcelOutcome]], list[StockpileState]]:
    """Simulate a plan from the instance's initial inventory.

    Returns
    -------
    fitness : FitnessVector
        Summed over all months of the solution.
    outcomes : list of list of ParcelOutcome
        Per month, per parcel.
    states : list of StockpileState
        ``states[0]`` is the initial inventory, ``states[m]`` the inventory at
        the end of month ``m``.
    """
    if solution.months > instance.months:
        raise ContractError(f"solution covers {solution.months} months, instance has {instance.months}")
    state = instance.initial_state if initial is None else initial
    states = [state]
    outcomes = []
    total = ZERO_FITNESS
    for m in range(solution.months):
        fv, out, state = evaluate_month(
            instance, m, state, solution.fractions[m], solution.durations[m]
        )
        total = total + fv
        outcomes.append(out)
        states.append(state)
    return total, outcomes, states


def is_feasible(fv: FitnessVector, instance: Instance | None = None) -> bool:
    """True when every violation measure is at its floor (within 1e-9)."""
    if instance is not None and fv.parcels != instance.total_parcels:
        raise ContractError(
            f"fitness covers {fv.parcels} parcels, instance has {instance.total_parcels}"
        )
    return not any(fv.violations())


def lex_key(fv: FitnessVector) -> tuple:
    """Sort key, smaller is better: violations in priority order, then more copper."""
    return fv.violations() + (-fv.copper,)


def _sign(x: float) -> int:
    return int(x > 0) - int(x < 0)


def compare_lex(a: FitnessVector, b: FitnessVector) -> int:
    """1 if ``a`` is better, -1 if ``b`` is better, 0 if tied."""
    ka, kb = lex_key(a), lex_key(b)
    return int(ka < kb) - int(ka > kb)


def dominates(a: FitnessVector, b: FitnessVector, eps: float = BI_EPSILON) -> bool:
    """Copper at least as high and high-grade usage at least as low, one strictly, up to ``eps``."""
    tol_c = eps * max(1.0, abs(a.copper), abs(b.copper))
    tol_s = eps * max(1.0, abs(a.high_grade_usage), abs(b.high_grade_usage))
    weakly = a.copper >= b.copper - tol_c and a.high_grade_usage <= b.high_grade_usage + tol_s
    strictly = a.copper > b.copper + tol_c or a.high_grade_usage < b.high_grade_usage - tol_s
    return weakly and strictly


def compare_bi(a: FitnessVector, b: FitnessVector, eps: float = BI_EPSILON) -> int:
    """Like :func:`compare_lex`, with copper/high-grade-usage dominance among violation ties.

    Mutually non-dominated candidates are ordered by copper, then by lower usage.
    """
    va, vb = a.violations(), b.violations()
    if va != vb:
        return 1 if va < vb else -1
    if dominates(a, b, eps):
        return 1
    if dominates(b, a, eps):
        return -1
    if a.copper != b.copper:
        return _sign(a.copper - b.copper)
    return _sign(b.high_grade_usage - a.high_grade_usage)


COMPARATORS = {"lex": compare_lex, "bi": compare_bi}


def best_index(fitnesses, compare=compare_lex) -> int:
    """Index of the best fitness; the earliest wins ties."""
    best = 0
    for i in range(1, len(fitnesses)):
        if compare(fitnesses[i], fitnesses[best]) > 0:
            best = i
    return best

