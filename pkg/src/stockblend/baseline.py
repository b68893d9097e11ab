"""Random-search baseline: independent repaired random plans, best kept."""

from __future__ import annotations

from dataclasses import dataclass

from .de import MonthProblem, child_rng
from .fitness import ZERO_FITNESS, FitnessVector, compare_lex
from .model import Instance, Solution


@dataclass
class BaselineResult:
    solution: Solution
    fitness: FitnessVector
    evaluations: int


def sample_plan(instance: Instance, rng, first_month: MonthProblem | None = None):
    """One random plan: uniform weights, normalized, durations repaired month by month."""
    fractions, durations = [], []
    fitness = ZERO_FITNESS
    carried = instance.initial_state
    for m in range(instance.months):
        problem = first_month if m == 0 and first_month is not None else MonthProblem(instance, m, carried)
        ind = problem.individual(problem.random_genome(rng))
        fractions.append(ind.decoded.fractions[0])
        durations.append(ind.decoded.durations[0])
        fitness = fitness + ind.fitness
        carried = ind.end_state
    return Solution(fractions, durations), fitness


def random_search_baseline(instance: Instance, budget: int, seed: int = 1) -> BaselineResult:
    """Best of ``budget`` repaired random plans under the lexicographic order.

    Sample ``i`` draws from stream ``i`` of ``seed``; one sample is one
    fitness evaluation.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    first = MonthProblem(instance, 0)
    best_sol, best_fv = None, None
    for i in range(budget):
        sol, fv = sample_plan(instance, child_rng(seed, i), first)
        if best_fv is None or compare_lex(fv, best_fv) > 0:
            best_sol, best_fv = sol, fv
    return BaselineResult(best_sol, best_fv, budget)
