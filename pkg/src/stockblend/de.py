"""Differential evolution for the one-month blending problem.

Each individual is a flat genome: the stockpile weights of every parcel,
block after block, followed by one duration per parcel. After mutation and
crossover every weight block is normalized and every duration is recomputed
by the band repair, and the repaired values are written back into the genome.

Randomness: every (generation, individual) pair draws from its own child of
the run's :class:`numpy.random.SeedSequence` (generation 0 is initialization),
so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fitness import (
    COMPARATORS,
    FitnessVector,
    MonthContext,
    best_index,
    month_start_state,
    simulate_month,
)
from .model import ContractError, Instance, Solution, StockpileState
from .repair import normalize_fractions, repair_duration_for_grades

MODES = ("lex", "bi")


@dataclass(frozen=True)
class DEConfig:
    """DE settings; defaults are the published experimental setup."""

    pop_size: int = 10
    scale: float = 1.2
    crossover: float = 0.5
    max_evals: int = 100_000
    seed: int = 1
    mode: str = "lex"

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError(f"pop_size must be >= 4, got {self.pop_size}")
        if not self.scale > 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if not 0.0 <= self.crossover <= 1.0:
            raise ValueError(f"crossover must be in [0, 1], got {self.crossover}")
        if self.max_evals < self.pop_size:
            raise ValueError(
                f"max_evals must be >= pop_size ({self.pop_size}), got {self.max_evals}"
            )
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class Individual:
    genome: np.ndarray
    fitness: FitnessVector
    decoded: Solution
    end_state: StockpileState = field(repr=False)


@dataclass
class DEResult:
    best: Individual
    population: list
    evaluations: int
    #: Best fitness after initialization and after every generation (the last may be partial).
    history: list


def mutate_target_to_best(x_t, x_best, x_r1, x_r2, scale: float, indices=None) -> np.ndarray:
    """Target-to-best/1 mutant ``x_t + F (x_best - x_t) + F (x_r1 - x_r2)``.

    ``indices``, when given as ``(t, r1, r2)``, are checked for distinctness.
    """
    if indices is not None and len(set(indices)) != 3:
        raise ContractError(f"target and donor indices must be distinct, got {tuple(indices)}")
    x_t = np.asarray(x_t, dtype=float)
    return x_t + scale * (np.asarray(x_best) - x_t) + scale * (np.asarray(x_r1) - np.asarray(x_r2))


def crossover_binomial(x_t, v_t, cr: float, rng: np.random.Generator) -> np.ndarray:
    """Binomial crossover.

    Draws the forced index first, then one uniform per component; component
    ``i`` comes from the mutant when its uniform is ``<= cr`` or ``i`` is forced.
    """
    x_t = np.asarray(x_t, dtype=float)
    n = x_t.shape[0]
    forced = rng.integers(n)
    take = rng.random(n) <= cr
    take[forced] = True
    return np.where(take, v_t, x_t)


def child_rng(seed, *key: int) -> np.random.Generator:
    """Generator for the stream ``key`` below ``seed`` (an int or a SeedSequence)."""
    if isinstance(seed, np.random.SeedSequence):
        base_entropy, base_key = seed.entropy, tuple(seed.spawn_key)
    else:
        base_entropy, base_key = int(seed), ()
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(base_entropy, spawn_key=base_key + tuple(int(k) for k in key))
    ))


def _pick_donors(rng: np.random.Generator, n: int, t: int) -> tuple[int, int]:
    """Two distinct indices in ``range(n)``, both different from ``t``."""
    r1 = int(rng.integers(n - 1))
    r2 = int(rng.integers(n - 2))
    r2 += r2 >= r1
    return r1 + (r1 >= t), r2 + (r2 >= t)


class MonthProblem:
    """Genome layout, repair and scoring for one month of an instance."""

    def __init__(self, instance: Instance, month: int = 0, carried: StockpileState | None = None):
        if not 0 <= month < instance.months:
            raise ContractError(f"month index {month} out of range for {instance.months} months")
        self.instance = instance
        self.month = month
        self.carried = instance.initial_state if carried is None else carried
        self.start = month_start_state(instance, month, self.carried)
        self.access = instance.access[month]
        self.targets = instance.target_concentrate[month]
        self.available = float(instance.available_duration[month])
        self.n_parcels = len(self.access)
        sizes = [len(a) for a in self.access]
        edges = np.cumsum([0] + sizes)
        self.blocks = [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
        self.n_fractions = int(edges[-1])
        self.dim = self.n_fractions + self.n_parcels
        self.context = MonthContext(instance, month, self.start)

    def random_genome(self, rng: np.random.Generator) -> np.ndarray:
        genome = np.zeros(self.dim)
        genome[: self.n_fractions] = rng.uniform(0.0, 1.0, self.n_fractions)
        return genome

    def repair(self, genome: np.ndarray) -> np.ndarray:
        """Normalize each weight block and recompute each duration, in place."""
        params = self.instance.process
        for p, block in enumerate(self.blocks):
            x = normalize_fractions(genome[block])
            genome[block] = x
            genome[self.n_fractions + p] = repair_duration_for_grades(
                (x @ self.context.grades[p]).tolist(), self.context.targets[p], self.available, params
            )
        return genome

    def decode(self, genome: np.ndarray) -> Solution:
        return Solution(
            [[genome[b].copy() for b in self.blocks]],
            [genome[self.n_fractions :].copy()],
        )

    def encode(self, solution: Solution, month: int = 0) -> np.ndarray:
        """Genome for month ``month`` of ``solution``."""
        genome = np.zeros(self.dim)
        for p, block in enumerate(self.blocks):
            genome[block] = solution.fractions[month][p]
        genome[self.n_fractions :] = solution.durations[month]
        return genome

    def individual(self, genome: np.ndarray) -> Individual:
        """Repair ``genome`` and score it."""
        self.repair(genome)
        sol = self.decode(genome)
        fv, _, end = simulate_month(
            self.instance, self.month, self.start, sol.fractions[0], sol.durations[0], self.context
        )
        return Individual(genome, fv, sol, end)


def solve_one_month(
    instance: Instance,
    config: DEConfig = DEConfig(),
    month: int = 0,
    carried: StockpileState | None = None,
    warm_start: Solution | None = None,
    seed=None,
) -> DEResult:
    """Run DE with both repair operators on one month.

    Parameters
    ----------
    instance : Instance
    config : DEConfig
    month : int
        0-based month index.
    carried : StockpileState, optional
        Inventory at the end of the previous month, before this month's haul.
        Defaults to the instance's initial inventory.
    warm_start : Solution, optional
        Single-month solution placed in slot 0 of the initial population
        (repaired like every other individual).
    seed : int or SeedSequence, optional
        Overrides ``config.seed``.

    Returns
    -------
    DEResult
        The comparator-best individual of the final population, the
        population itself and the number of evaluations used.
    """
    problem = MonthProblem(instance, month, carried)
    compare = COMPARATORS[config.mode]
    seed = config.seed if seed is None else seed
    np_ = config.pop_size

    population = []
    for i in range(np_):
        if i == 0 and warm_start is not None:
            genome = problem.encode(warm_start)
        else:
            genome = problem.random_genome(child_rng(seed, 0, i))
        population.append(problem.individual(genome))
    evals = np_
    fits = [ind.fitness for ind in population]
    b = best_index(fits, compare)
    history = [fits[b]]

    generation = 0
    while evals < config.max_evals:
        generation += 1
        for t in range(np_):
            if evals >= config.max_evals:
                break
            rng = child_rng(seed, generation, t)
            r1, r2 = _pick_donors(rng, np_, t)
            mutant = mutate_target_to_best(
                population[t].genome,
                population[b].genome,
                population[r1].genome,
                population[r2].genome,
                config.scale,
            )
            trial = problem.individual(
                crossover_binomial(population[t].genome, mutant, config.crossover, rng)
            )
            evals += 1
            if compare(trial.fitness, fits[t]) > 0:
                population[t] = trial
                fits[t] = trial.fitness
                # The incumbent best changes only when strictly beaten.
                if t == b or compare(trial.fitness, fits[b]) > 0:
                    b = t
        history.append(fits[b])

    return DEResult(population[b], population, evals, history)
