"""Month-by-month optimization of multi-month plans with a feasible-plan archive.

Each month, every archived partial plan is extended by a one-month DE run
started from that plan's end-of-month inventory. The feasible members of the
final DE populations are pooled, and at most ``pop_size`` of them, drawn
uniformly without replacement, become the archive for the next month.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .de import DEConfig, solve_one_month
from .fitness import COMPARATORS, FitnessVector, is_feasible
from .model import Instance, Solution, StockpileState
from .report import RunReport, build_report


@dataclass
class ArchiveEntry:
    """A partial plan covering months ``1 .. len(month_fitness)``."""

    solution: Solution
    state: StockpileState
    copper: float = 0.0
    high_grade_usage: float = 0.0
    month_fitness: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return all(is_feasible(fv) for fv in self.month_fitness)

    def extend(self, ind) -> "ArchiveEntry":
        fv: FitnessVector = ind.fitness
        return ArchiveEntry(
            Solution(
                self.solution.fractions + ind.decoded.fractions,
                self.solution.durations + ind.decoded.durations,
            ),
            ind.end_state,
            self.copper + fv.copper,
            self.high_grade_usage + fv.high_grade_usage,
            self.month_fitness + [fv],
        )


@dataclass
class LongTermResult:
    solution: Solution
    report: RunReport
    archive: list


def _stream(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))


def _month_slice(solution: Solution | None, m: int) -> Solution | None:
    if solution is None or solution.months <= m:
        return None
    return Solution([solution.fractions[m]], [solution.durations[m]])


def solve_long_term(
    instance: Instance,
    config: DEConfig = DEConfig(mode="bi"),
    month_budget: int | None = None,
    mode: str = "bi",
    warm_start: Solution | None = None,
) -> LongTermResult:
    """Optimize ``instance`` one month at a time.

    Parameters
    ----------
    instance : Instance
    config : DEConfig
        DE settings; ``config.max_evals`` is the evaluation budget of a whole
        month, shared evenly by the archived parents.
    month_budget : int, optional
        Overrides ``config.max_evals``.
    mode : {"bi", "lex"}
        Comparator of the monthly DE runs.
    warm_start : Solution, optional
        Plan whose month ``m`` seeds every DE run of month ``m``.

    Returns
    -------
    LongTermResult
        The archived full plan with the most copper (feasible plans first),
        its report and the final archive. Months in which no parent produced a
        feasible extension are listed in ``report.flagged_months``; the least
        violating extension is carried forward instead.
    """
    started = time.perf_counter()
    budget = config.max_evals if month_budget is None else month_budget
    compare = COMPARATORS[mode]
    archive = [ArchiveEntry(Solution([], []), instance.initial_state)]
    sizes, flagged = [], []
    evaluations = 0

    for m in range(instance.months):
        per_parent = max(config.pop_size, budget // len(archive))
        month_cfg = replace(config, max_evals=per_parent, mode=mode)
        pool, fallback = [], None
        for j, parent in enumerate(archive):
            result = solve_one_month(
                instance,
                month_cfg,
                month=m,
                carried=parent.state,
                warm_start=_month_slice(warm_start, m),
                seed=_stream(config.seed, 0, m, j),
            )
            evaluations += result.evaluations
            pool.extend(parent.extend(ind) for ind in result.population if is_feasible(ind.fitness))
            if fallback is None or compare(result.best.fitness, fallback[1].fitness) > 0:
                fallback = (parent, result.best)
        if not pool:
            flagged.append(m + 1)
            pool = [fallback[0].extend(fallback[1])]
        if len(pool) > config.pop_size:
            rng = np.random.default_rng(_stream(config.seed, 1, m))
            keep = np.sort(rng.choice(len(pool), size=config.pop_size, replace=False))
            pool = [pool[i] for i in keep]
        archive = pool
        sizes.append(len(archive))

    best = max(archive, key=lambda e: (e.feasible, e.copper))
    report = build_report(
        instance,
        best.solution,
        evaluations,
        archive_sizes=sizes,
        flagged_months=flagged,
        wall_time_s=time.perf_counter() - started,
    )
    return LongTermResult(best.solution, report, archive)
