"""Domain types and the exact parts of the blending model.

Grades are mass fractions in [0, 1], tonnages are tonnes and durations hours.
Stockpiles and parcels are indexed from 0; months are numbered from 1 where a
month number appears (discounting), and indexed from 0 in arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .process import ProcessParams


class Material(enum.IntEnum):
    Cu = 0
    Ag = 1
    Fe = 2
    Au = 3
    U = 4
    F = 5
    S = 6


N_MATERIALS = len(Material)
MATERIAL_NAMES = tuple(m.name for m in Material)


class ContractError(ValueError):
    """An operation was called with inputs that violate its preconditions."""


@dataclass(frozen=True)
class Bounds:
    """Product requirements shared by every parcel.

    ``cu_grade`` is the minimum parcel Cu grade, ``f_recovery`` and
    ``u_recovery`` the maximum F/U recoveries, ``cu_spread`` the allowed
    difference between any two parcel Cu grades.
    """

    cu_grade: float
    f_recovery: float
    u_recovery: float
    cu_spread: float


@dataclass(frozen=True, eq=False)
class StockpileState:
    """Inventory of every stockpile: ``tonnage`` (S,) and ``grades`` (S, 7)."""

    tonnage: np.ndarray
    grades: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tonnage, dtype=float)
        g = np.asarray(self.grades, dtype=float)
        if t.ndim != 1 or g.shape != (t.shape[0], N_MATERIALS):
            raise ContractError(
                f"expected tonnage (S,) and grades (S, {N_MATERIALS}), "
                f"got {t.shape} and {g.shape}"
            )
        object.__setattr__(self, "tonnage", t)
        object.__setattr__(self, "grades", g)

    @property
    def n_stockpiles(self) -> int:
        return self.tonnage.shape[0]

    def copy(self) -> "StockpileState":
        return StockpileState(self.tonnage.copy(), self.grades.copy())

    def __eq__(self, other):
        if not isinstance(other, StockpileState):
            return NotImplemented
        return np.array_equal(self.tonnage, other.tonnage) and np.array_equal(
            self.grades, other.grades
        )


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable problem description.

    Per-month data is held in month-major arrays: ``haul_tonnage`` is (M, S),
    ``haul_grades`` (M, S, 7). ``target_concentrate[m]`` and ``access[m]``
    have one entry per parcel scheduled in month ``m``; ``access[m][p]`` lists
    the stockpiles parcel ``p`` may draw from, in ascending order.
    """

    available_duration: np.ndarray
    haul_tonnage: np.ndarray
    haul_grades: np.ndarray
    initial_state: StockpileState
    target_concentrate: tuple
    access: tuple
    bounds: Bounds
    process: "ProcessParams"
    name: str = "instance"
    seed: int | None = None

    def __post_init__(self):
        d = np.asarray(self.available_duration, dtype=float)
        h = np.asarray(self.haul_tonnage, dtype=float)
        g = np.asarray(self.haul_grades, dtype=float)
        targets = tuple(np.asarray(k, dtype=float) for k in self.target_concentrate)
        access = tuple(
            tuple(tuple(int(s) for s in acc) for acc in month) for month in self.access
        )
        for arr in (d, h, g, *targets):
            arr.setflags(write=False)
        object.__setattr__(self, "available_duration", d)
        object.__setattr__(self, "haul_tonnage", h)
        object.__setattr__(self, "haul_grades", g)
        object.__setattr__(self, "target_concentrate", targets)
        object.__setattr__(self, "access", access)
        self._validate()

    def _validate(self):
        m_count, s_count = self.months, self.n_stockpiles
        if m_count < 1:
            raise ContractError("instance needs at least one month")
        if self.haul_tonnage.shape != (m_count, s_count):
            raise ContractError(
                f"haul_tonnage: expected shape {(m_count, s_count)}, got {self.haul_tonnage.shape}"
            )
        if self.haul_grades.shape != (m_count, s_count, N_MATERIALS):
            raise ContractError(
                f"haul_grades: expected shape {(m_count, s_count, N_MATERIALS)}, "
                f"got {self.haul_grades.shape}"
            )
        if len(self.target_concentrate) != m_count or len(self.access) != m_count:
            raise ContractError("target_concentrate and access need one entry per month")
        if np.any(self.available_duration <= 0):
            raise ContractError("available_duration: must be > 0")
        if np.any(self.haul_tonnage < 0):
            raise ContractError("haul_tonnage: must be >= 0")
        _check_fraction(self.haul_grades, "haul_grades")
        if np.any(self.initial_state.tonnage < 0):
            raise ContractError("initial_state.tonnage: must be >= 0")
        _check_fraction(self.initial_state.grades, "initial_state.grades")
        for m in range(m_count):
            k, acc = self.target_concentrate[m], self.access[m]
            if k.ndim != 1 or len(acc) != k.shape[0] or k.shape[0] < 1:
                raise ContractError(f"month {m + 1}: needs >= 1 parcel with a target and access set")
            if np.any(k <= 0):
                raise ContractError(f"month {m + 1}: target_concentrate must be > 0")
            for p, a in enumerate(acc):
                if not a:
                    raise ContractError(f"month {m + 1} parcel {p}: empty stockpile access set")
                if list(a) != sorted(set(a)) or a[0] < 0 or a[-1] >= s_count:
                    raise ContractError(
                        f"month {m + 1} parcel {p}: access must be sorted distinct "
                        f"stockpile indices in [0, {s_count})"
                    )
        b = self.bounds
        for name in ("cu_grade", "f_recovery", "u_recovery", "cu_spread"):
            v = getattr(b, name)
            if not 0.0 <= v <= 1.0:
                raise ContractError(f"bounds.{name}: must be in [0, 1], got {v}")

    @property
    def months(self) -> int:
        return self.available_duration.shape[0]

    @property
    def n_stockpiles(self) -> int:
        return self.initial_state.n_stockpiles

    @property
    def parcels_per_month(self) -> list[int]:
        return [len(a) for a in self.access]

    @property
    def total_parcels(self) -> int:
        return sum(self.parcels_per_month)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            np.array_equal(self.available_duration, other.available_duration)
            and np.array_equal(self.haul_tonnage, other.haul_tonnage)
            and np.array_equal(self.haul_grades, other.haul_grades)
            and self.initial_state == other.initial_state
            and len(self.target_concentrate) == len(other.target_concentrate)
            and all(
                np.array_equal(a, b)
                for a, b in zip(self.target_concentrate, other.target_concentrate)
            )
            and self.access == other.access
            and self.bounds == other.bounds
            and self.process == other.process
            and self.name == other.name
            and self.seed == other.seed
        )

    __hash__ = None


def _check_fraction(arr: np.ndarray, name: str):
    if np.any(arr < 0) or np.any(arr > 1):
        raise ContractError(f"{name}: grades must be in [0, 1]")


@dataclass
class Solution:
    """Blending fractions and durations for every parcel of a plan.

    ``fractions[m][p]`` holds weights over ``instance.access[m][p]`` only;
    ``durations[m]`` holds one duration per parcel of month ``m``.
    """

    fractions: list = field(default_factory=list)
    durations: list = field(default_factory=list)

    @property
    def months(self) -> int:
        return len(self.durations)

    def copy(self) -> "Solution":
        return Solution(
            [[np.array(x, dtype=float) for x in month] for month in self.fractions],
            [np.array(d, dtype=float) for d in self.durations],
        )

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return (
            len(self.fractions) == len(other.fractions)
            and all(
                len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))
                for a, b in zip(self.fractions, other.fractions)
            )
            and len(self.durations) == len(other.durations)
            and all(np.array_equal(a, b) for a, b in zip(self.durations, other.durations))
        )


@dataclass(frozen=True)
class ParcelOutcome:
    """Processing results of one parcel."""

    grades: np.ndarray
    volume: float
    concentrate: float
    copper: float
    cu_recovery: float
    f_recovery: float
    u_recovery: float

    @property
    def cu_grade(self) -> float:
        return float(self.grades[Material.Cu])


def mix_parcel_grades(
    state: StockpileState, fractions, access: Sequence[int] | None = None
) -> np.ndarray:
    """Blend stockpile grades with the given weights.

    Parameters
    ----------
    state : StockpileState
        Stockpile grades at the start of the month.
    fractions : array_like
        Nonnegative weights summing to one, one per entry of ``access``.
    access : sequence of int, optional
        Stockpiles the weights refer to; all stockpiles when omitted.

    Returns
    -------
    np.ndarray
        Grade of each material in the blend, shape (7,).
    """
    x = np.asarray(fractions, dtype=float)
    if np.any(x < 0) or abs(x.sum() - 1.0) > 1e-9:
        raise ContractError(f"fractions must be nonnegative and sum to 1, got sum {x.sum()!r}")
    grades = state.grades if access is None else state.grades[list(access)]
    if grades.shape[0] != x.shape[0]:
        raise ContractError(f"{x.shape[0]} fractions for {grades.shape[0]} stockpiles")
    return x @ grades


def update_stockpile_month_start(
    state: StockpileState, haul_tonnage, haul_grades
) -> StockpileState:
    """Add a month's haul to every stockpile, mixing grades by mass.

    A stockpile whose combined tonnage is not positive keeps its old grades.
    """
    h = np.asarray(haul_tonnage, dtype=float)
    hg = np.asarray(haul_grades, dtype=float)
    if np.any(h < 0):
        raise ContractError("haul tonnage must be >= 0")
    total = state.tonnage + h
    grades = state.grades.copy()
    ok = (total > 0) & (h > 0)
    if np.any(ok):
        grades[ok] = (
            state.grades[ok] * state.tonnage[ok, None] + hg[ok] * h[ok, None]
        ) / total[ok, None]
    return StockpileState(total, grades)


def claim_from_stockpiles(
    state: StockpileState, fractions, parcel_volume: float, access: Sequence[int] | None = None
) -> StockpileState:
    """Remove ``fractions * parcel_volume`` tonnes from the accessed stockpiles.

    Grades are unchanged. The result may hold negative tonnage; that is a
    penalized violation, not an error.
    """
    x = np.asarray(fractions, dtype=float)
    tonnage = state.tonnage.copy()
    idx = np.arange(tonnage.shape[0]) if access is None else list(access)
    tonnage[idx] -= x * parcel_volume
    return StockpileState(tonnage, state.grades)


def max_cu_grade_spread(outcomes) -> float:
    """Largest difference between the Cu grades of any two parcels.

    ``outcomes`` is a flat or month-nested iterable of :class:`ParcelOutcome`
    or plain Cu grades.
    """
    grades = [_cu_of(o) for o in _flatten(outcomes)]
    if not grades:
        raise ContractError("max_cu_grade_spread needs at least one parcel")
    return max(grades) - min(grades)


def _cu_of(o) -> float:
    return o.cu_grade if isinstance(o, ParcelOutcome) else float(o)


def _flatten(items):
    for it in items:
        if isinstance(it, (list, tuple)):
            yield from _flatten(it)
        else:
            yield it
