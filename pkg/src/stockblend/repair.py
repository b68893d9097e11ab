"""Repair operators: fraction normalization and concentrate-band duration repair."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .model import ContractError, StockpileState, mix_parcel_grades
from .process import ProcessParams, concentrate_rate

MAX_BISECTION_ITERATIONS = 200
# Rounding slack per element when deciding a vector already sums to one.
_SUM_SLACK = 4 * np.finfo(float).eps


def normalize_fractions(raw) -> np.ndarray:
    """Scale nonnegative weights so they sum to one.

    Negative weights (from DE arithmetic) are clamped to zero first; an
    all-zero vector becomes the uniform distribution. Vectors already summing
    to one within rounding are returned unchanged, which makes the operator
    idempotent.
    """
    x = np.maximum(np.asarray(raw, dtype=float), 0.0)
    total = float(x.sum())
    if not 0.0 < total < math.inf:
        return np.full(x.shape, 1.0 / x.shape[0])
    if abs(total - 1.0) <= _SUM_SLACK * x.shape[0]:
        return x
    return x / total


def band_bisection(
    concentrate: Callable[[float], float],
    target: float,
    available: float,
    tolerance: float = 1.0,
    max_iter: int = MAX_BISECTION_ITERATIONS,
) -> tuple[float, int]:
    """Find a duration whose concentrate lies within ``target +/- tolerance``.

    ``concentrate`` must be nondecreasing on ``[0, available]``. The first
    probe is the midpoint. When no duration reaches the band the nearer end
    of ``[0, available]`` is returned.

    Returns
    -------
    (duration, evaluations)
        ``evaluations`` counts calls of ``concentrate``.
    """
    lo_band, hi_band = target - tolerance, target + tolerance

    def k(t):
        value = concentrate(t)
        if not math.isfinite(value):
            raise ContractError(f"concentrate({t!r}) is not finite")
        return value

    lo, hi = 0.0, float(available)
    d = 0.5 * hi
    kd = k(d)
    if lo_band <= kd <= hi_band:
        return d, 1
    if kd < lo_band:
        k_hi = k(hi)
        if k_hi <= hi_band:
            # Either hits the band at the end or the band is out of reach above.
            return hi, 2
        lo, k_lo = d, kd
    else:
        k_lo = k(lo)
        if k_lo >= lo_band:
            return lo, 2
        hi, k_hi = d, kd
    evals = 2
    while evals < max_iter:
        d = 0.5 * (lo + hi)
        kd = k(d)
        evals += 1
        if lo_band <= kd <= hi_band:
            return d, evals
        if kd > hi_band:
            hi, k_hi = d, kd
        else:
            lo, k_lo = d, kd
    # Band skipped over (discontinuous k or a band narrower than float spacing).
    return (lo if lo_band - k_lo <= k_hi - hi_band else hi), evals


def repair_duration(
    fractions,
    month_state: StockpileState,
    target: float,
    available: float,
    params: ProcessParams,
    access: Sequence[int] | None = None,
) -> float:
    """Duration that brings a parcel's concentrate within one tonne of ``target``.

    ``month_state`` carries the stockpile grades after the month's haul.
    """
    if not target > 0 or not available > 0:
        raise ContractError("target and available duration must be > 0")
    grades = mix_parcel_grades(month_state, fractions, access)
    return repair_duration_for_grades(grades, target, available, params)


def repair_duration_for_grades(grades, target: float, available: float, params: ProcessParams) -> float:
    # Concentrate is linear in duration for a fixed blend: k(t) = rate * t.
    rate = concentrate_rate(grades, params)
    t, _ = band_bisection(lambda d: rate * d, target, available)
    return t
